"""The command line front end, driven in-process on the shipped corpus.

Run: python demos/07_command_line.py
The same reports come from ``ezfib VERB FILES...`` or ``python -m ezfib``.
"""

import os

from ezfib.cli import run
from ezfib.fixtures import data_dir

os.chdir(data_dir())
for argv in (
    ["validate", "cube1.psh"],
    ["check-fib", "cube1-boundary-inclusion.map"],
    ["bdeq", "codiscrete2.psh", "2"],
    ["minimal-model", "codiscrete2.psh"],
    ["--kappa", "32", "univalence", "glue-p0.map", "glue-w.map", "vertex0.map",
     "codiscrete2-family.map"],
):
    text, status = run(argv)
    print("$ ezfib " + " ".join(argv))
    print(text, end="")
    print(f"(exit {status})\n")
