"""Scaling table B_k/k over the default weight sweep, as CSV and JSON.

    python scripts/run_scaling.py [--out-dir results] [--config cfg.json]
"""
import argparse
from pathlib import Path

from cuspbergman.cli import main

p = argparse.ArgumentParser()
p.add_argument("--out-dir", default="results")
p.add_argument("--config")
a = p.parse_args()
out = Path(a.out_dir)
out.mkdir(parents=True, exist_ok=True)
extra = ["--config", a.config] if a.config else []
for fmt in ("csv", "json"):
    code = main(extra + ["--format", fmt, "--out", str(out / f"scaling.{fmt}"), "scaling"])
    if code:
        raise SystemExit(code)
print(f"wrote {out / 'scaling.csv'} and {out / 'scaling.json'}")
