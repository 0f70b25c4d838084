"""Chern densities of Petersson metrics: finite differences against w/(4 pi)."""
import sys

from cuspbergman.cli import main

sys.exit(main(["chern", "--w", "1/2", "1", "0", "2", "12", "--points", "0,1", "0.1,1.5", "0.4,5"]))
