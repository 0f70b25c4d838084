"""Bergman-weighted averages of a bump at 0.1+1.5i across weights 12..120."""
import sys

from cuspbergman.cli import main

sys.exit(main(["que", "--k", "12", "24", "48", "72", "96", "120", "25/2", "121/2"]))
