"""Command-line front end: basis | scaling | models | chern | que.

Exit codes: 0 ok, 2 bad input, 3 Gram failure, 4 truncation failure.
Output is deterministic: fixed row order, 17 significant digits, LF endings.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

import numpy as np
import scipy

from . import __version__
from .bergman import (
    DERIVED_LIMIT,
    PUBLISHED_HALF_BOUND,
    PUBLISHED_INTEGRAL_BOUND,
    build_ortho,
    hyperbolic_bump,
    mass,
    que_average,
    scaling_row,
)
from .chern import MetricWeight, chern_density_closed, chern_density_numeric, convergence_order
from .config import MODEL_M, MODEL_T, RunConfig
from .forms import TruncationError, cusp_basis, format_weight, parse_weight
from .models import (
    P1_AREA,
    TORUS_LANDAU_GAP,
    HeatTruncationError,
    curvature_alpha,
    p1_bergman,
    torus_fd_spectrum,
    verify_bouche_limit,
)
from .pet import ConditioningError, GramNotPDError

EXIT_OK, EXIT_INPUT, EXIT_GRAM, EXIT_TRUNC = 0, 2, 3, 4


class InputError(ValueError):
    pass


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, Fraction):
        return format_weight(v)
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def _json_value(v):
    if isinstance(v, Fraction):
        return format_weight(v)
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else fmt(v)
    return v


def render(columns, rows, fmt_kind: str, meta: dict, notes=()) -> str:
    if fmt_kind == "json":
        doc = {
            "columns": list(columns),
            "rows": [{c: _json_value(r.get(c)) for c in columns} for r in rows],
            "metadata": meta,
            "notes": list(notes),
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    lines = [",".join(columns)]
    lines += [",".join(fmt(r.get(c)) for c in columns) for r in rows]
    lines += [f"# {k}: {v}" for k, v in meta.items()]
    lines += [f"# note: {n}" for n in notes]
    return "\n".join(lines) + "\n"


def emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def metadata(cfg: RunConfig | None = None, **extra) -> dict:
    meta = {"package_version": __version__, "numpy": np.__version__, "scipy": scipy.__version__}
    if cfg is not None:
        meta["config_sha256"] = cfg.digest()
    meta.update({k: fmt(v) for k, v in extra.items()})
    return meta


def _xy(text: str) -> tuple[float, float]:
    try:
        x, y = (float(s) for s in text.split(","))
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"expected 'x,y', got {text!r}") from err
    return x, y


def _weight(text: str) -> str:
    try:
        return format_weight(parse_weight(text))
    except (ValueError, ZeroDivisionError) as err:
        raise argparse.ArgumentTypeError(str(err)) from err


def load_config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    return cfg.with_overrides(
        output=args.out, format=args.format, precision=args.precision, trunc=args.trunc,
    )


# -- subcommands -------------------------------------------------------------------


def cmd_basis(args, cfg: RunConfig) -> int:
    k = parse_weight(args.k)
    basis = cusp_basis(k, cfg.trunc)
    members = [json.loads(f.to_json()) for f in basis.members]
    if cfg.format == "json":
        doc = {
            "weight": format_weight(k),
            "kind": basis.kind,
            "jk": len(basis),
            "lead_exps": [format_weight(e) for e in basis.lead_exps],
            "members": members,
        }
        emit(json.dumps(doc, indent=2) + "\n", cfg.output)
    else:
        rows = [
            {"index": i, "lead_exp": format_weight(f.lead_exp), "name": f.name, "trunc": f.trunc,
             "a0": str(f.coeffs[0]), "a1": str(f.coeffs[1]) if f.trunc > 1 else ""}
            for i, f in enumerate(basis.members)
        ]
        emit(render(["index", "lead_exp", "name", "trunc", "a0", "a1"], rows, "csv",
                    {"weight": format_weight(k), "jk": len(basis)}), cfg.output)
    return EXIT_OK


SCALING_COLUMNS = [
    "k", "jk", "probe_x", "probe_y", "B", "B_over_k", "sup_trunc", "sup_over_k",
    "argmax_x", "argmax_y", "gram_cond", "tail_bound", "residual", "mass",
    "published_bound", "published_bound_source", "derived_limit", "derived_limit_source",
]

BOUND_NOTE = (
    "half-integral weights: the stated asymptotic bound 1/(8 pi) is emitted for reference only; "
    "the bundle-power count gives 1/(4 pi), which is the limit asserted"
)


def scaling_records(rows) -> list[dict]:
    out = []
    for row in rows:
        kf = float(row.k)
        integral = row.k.denominator == 1
        for z, b, ratio in row.points:
            out.append({
                "k": row.k, "jk": row.jk, "probe_x": z.real, "probe_y": z.imag,
                "B": b, "B_over_k": ratio, "sup_trunc": row.sup_trunc, "sup_over_k": row.sup_trunc / kf,
                "argmax_x": row.argmax.real, "argmax_y": row.argmax.imag,
                "gram_cond": row.gram_cond, "tail_bound": row.tail_bound, "residual": row.residual,
                "mass": row.mass,
                "published_bound": PUBLISHED_INTEGRAL_BOUND if integral else PUBLISHED_HALF_BOUND,
                "published_bound_source": "published",
                "derived_limit": DERIVED_LIMIT, "derived_limit_source": "derived",
            })
    return out


def cmd_scaling(args, cfg: RunConfig) -> int:
    if args.weights:
        cfg = cfg.with_overrides(weights=tuple(args.weights))
    if args.probes:
        cfg = cfg.with_overrides(probes=tuple(args.probes))
    if args.y_cut is not None:
        cfg = cfg.with_overrides(y_cut=args.y_cut)
    q = cfg.quadrature
    rows = []
    for k in cfg.weights:
        ortho = build_ortho(k, cfg.trunc, q.panels, q.nodes, q.y_cap, cfg.precision)
        rows.append(scaling_row(ortho, cfg.probe_points, cfg.y_cut, cfg.coarse, cfg.refine_steps,
                                with_mass=not args.no_mass))
    meta = metadata(cfg)
    emit(render(SCALING_COLUMNS, scaling_records(rows), cfg.format, meta, [BOUND_NOTE]), cfg.output)
    return EXIT_OK


MODEL_COLUMNS = [
    "kind", "m", "t", "heat", "bergman", "bouche_rhs", "rel_err", "rel_err_shifted", "tail",
    "heat_ge_bergman", "constancy",
]


def p1_constancy(m: int, n: int = 100, seed: int = 0) -> float:
    """Relative spread of the projective-line Bergman density over random chart points."""
    rng = np.random.default_rng(seed)
    z = rng.normal(size=n) + 1j * rng.normal(size=n)
    b = p1_bergman(m, z)
    return float((b.max() - b.min()) / b.mean())


def model_records(kinds, m_list, t_list, Q: int | None) -> list[dict]:
    out = []
    for kind in kinds:
        for m in m_list:
            const = p1_constancy(m) if kind == "projective-line" else 0.0
            for t in t_list:
                (row,) = verify_bouche_limit(kind, t, [m], Q)
                out.append({
                    "kind": kind, "m": m, "t": float(t), "heat": row.heat, "bergman": row.bergman,
                    "bouche_rhs": row.bouche_rhs, "rel_err": row.rel_err,
                    "rel_err_shifted": row.rel_err_shifted, "tail": row.tail,
                    "heat_ge_bergman": row.heat >= row.bergman, "constancy": const,
                })
    return out


def cmd_models(args, cfg: RunConfig) -> int:
    kinds = ["torus", "projective-line"] if args.kind == "both" else [args.kind]
    m_list = args.m or list(MODEL_M)
    t_list = args.t or list(MODEL_T)
    if any(m < 1 for m in m_list) or any(t <= 0 for t in t_list):
        raise InputError("need m >= 1 and t > 0")
    rows = model_records(kinds, m_list, t_list, args.Q)
    extra = {}
    notes = ["rel_err compares (1/m) hk(t) with alpha/(4 pi sinh(alpha t)); "
             "rel_err_shifted first multiplies by exp(-alpha t), the lowest-level offset"]
    if "torus" in kinds:
        fd = torus_fd_spectrum(3, 64)
        gap = (np.mean(fd[3:6]) - np.mean(fd[0:3])) / 3.0
        extra = {"landau_gap_frozen": TORUS_LANDAU_GAP, "landau_gap_fd_m3_n64": gap,
                 "landau_gap_rel_diff": abs(gap - TORUS_LANDAU_GAP) / TORUS_LANDAU_GAP,
                 "alpha_torus": curvature_alpha("torus")}
    if "projective-line" in kinds:
        extra["alpha_projective_line"] = curvature_alpha("projective-line")
        extra["projective_line_area"] = P1_AREA
    emit(render(MODEL_COLUMNS, rows, cfg.format, metadata(cfg, **extra), notes), cfg.output)
    return EXIT_OK


CHERN_COLUMNS = ["w", "x", "y", "h", "numeric", "closed", "rel_err", "order", "halving_ratio", "flag"]


def chern_records(w_list, points, h: float | None) -> list[dict]:
    out = []
    for w in w_list:
        w = Fraction(w)
        for x, y in points:
            z = complex(x, y)
            step = h if h is not None else y / 100.0
            num = chern_density_numeric(MetricWeight(w), z, step).value_mu_hyp
            closed = chern_density_closed(w)
            row = {"w": w, "x": x, "y": y, "h": step, "numeric": num, "closed": closed}
            if w == 0:
                row["flag"] = "flat"
            else:
                order = convergence_order(w, z, max(step, y / 40.0))
                row.update(rel_err=abs(num - closed) / abs(closed), order=order, halving_ratio=2.0**order,
                           flag="positive" if w > 0 else "negative")
            out.append(row)
    return out


def cmd_chern(args, cfg: RunConfig) -> int:
    w_list = args.w or ["1/2", "1", "0", "2"]
    points = args.points or [(0.0, 1.0), (0.1, 1.5)]
    if any(y <= 0 for _, y in points):
        raise InputError("points must lie in the upper half-plane")
    rows = chern_records([Fraction(w) for w in w_list], points, args.h)
    emit(render(CHERN_COLUMNS, rows, cfg.format, metadata(cfg)), cfg.output)
    return EXIT_OK


QUE_COLUMNS = ["k", "jk", "testfn", "lhs", "rhs", "deviation", "mass", "mass_rel_err"]


def que_records(weights, center: complex, width: float, cfg: RunConfig) -> list[dict]:
    q = cfg.quadrature
    out = []
    bump = hyperbolic_bump(center, width)
    for k in weights:
        ortho = build_ortho(k, cfg.trunc, q.panels, q.nodes, q.y_cap, cfg.precision)
        if ortho.dim == 0:
            raise InputError(f"weight {k} has no cusp forms")
        mu = mass(ortho)
        for name, fn in (("constant", lambda z: np.ones(np.shape(z))), ("bump", bump)):
            lhs, rhs, dev = que_average(fn, ortho)
            out.append({"k": ortho.weight, "jk": ortho.dim, "testfn": name, "lhs": lhs, "rhs": rhs,
                        "deviation": dev, "mass": mu, "mass_rel_err": abs(mu - ortho.dim) / ortho.dim})
    return out


def cmd_que(args, cfg: RunConfig) -> int:
    weights = args.k or ["12", "120"]
    cx, cy = args.center
    if cy <= 0 or args.width <= 0:
        raise InputError("bump centre must lie in the upper half-plane and width must be positive")
    rows = que_records(weights, complex(cx, cy), args.width, cfg)
    emit(render(QUE_COLUMNS, rows, cfg.format, metadata(cfg, bump_center_x=cx, bump_center_y=cy,
                                                         bump_width=args.width)), cfg.output)
    return EXIT_OK


# -- parser --------------------------------------------------------------------------


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = {"default": argparse.SUPPRESS} if suppress else {}
    p.add_argument("--config", help="JSON run configuration", **({"default": None} | d))
    p.add_argument("--out", help="output path (default stdout)", **({"default": None} | d))
    p.add_argument("--format", choices=("csv", "json"), **({"default": None} | d))
    p.add_argument("--precision", type=int, help="evaluation bits: 53 or 64", **({"default": None} | d))
    p.add_argument("--trunc", type=int, help="q-expansion length", **({"default": None} | d))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cuspbergman", description=__doc__.splitlines()[0])
    _global_flags(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("basis", help="cusp-form basis of one weight")
    b.add_argument("--k", required=True, type=_weight)

    s = sub.add_parser("scaling", help="B_k/k at probes and truncated sup, per weight")
    s.add_argument("--weights", nargs="+", type=_weight)
    s.add_argument("--probes", nargs="+", type=_xy, metavar="X,Y")
    s.add_argument("--y-cut", type=float)
    s.add_argument("--no-mass", action="store_true", help="skip the mass identity quadrature")

    m = sub.add_parser("models", help="heat/Bergman tables on the torus and projective line")
    m.add_argument("--kind", choices=("torus", "projective-line", "both"), default="both")
    m.add_argument("--m", nargs="+", type=int)
    m.add_argument("--t", nargs="+", type=float)
    m.add_argument("--Q", type=int, help="number of spectral levels (default: sized from the tail)")

    c = sub.add_parser("chern", help="Chern density of Petersson metrics")
    c.add_argument("--w", nargs="+")
    c.add_argument("--points", nargs="+", type=_xy, metavar="X,Y")
    c.add_argument("--h", type=float)

    q = sub.add_parser("que", help="Bergman-weighted averages of a test function")
    q.add_argument("--k", nargs="+", type=_weight)
    q.add_argument("--center", type=_xy, default=(0.1, 1.5), metavar="X,Y")
    q.add_argument("--width", type=float, default=0.25)

    for sp in (b, s, m, c, q):
        _global_flags(sp, suppress=True)
    return p


COMMANDS = {"basis": cmd_basis, "scaling": cmd_scaling, "models": cmd_models, "chern": cmd_chern, "que": cmd_que}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        return COMMANDS[args.command](args, cfg)
    except (GramNotPDError, ConditioningError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_GRAM
    except (TruncationError, HeatTruncationError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_TRUNC
    except (ValueError, ZeroDivisionError, OSError, json.JSONDecodeError, TypeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
