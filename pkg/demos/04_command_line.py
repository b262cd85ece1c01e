"""
Driving the command line tool
=============================

Every table the library produces is also available from ``twocenter``.
This script calls the entry point in-process and shows the start of each
output; from a shell the same arguments work after ``twocenter``.
"""

import contextlib
import io

from twocenter_susy.cli import main


def show(*argv, lines=6):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(list(argv))
    print("$ twocenter", " ".join(argv), f"  (exit {code})")
    print("\n".join(buf.getvalue().splitlines()[:lines]))
    print()


show("norm", "--hbar", "0.2,1,10", "--delta", "0.5", "--kind", "bosonic_I")
show("norm", "--wtype", "IIb", "--kappa", "3", "--delta", "0.5", "--hbar", "2")
show("spectrum", "--delta", "1", "--hbar", "1", lines=8)
show("density", "--delta", "1", "--bound", "1,1,odd", "--grid", "-2,2,-2,2,5,5", lines=12)
show("verify", "--quick", lines=5)
