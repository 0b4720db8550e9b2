"""The standalone workflow through the command line.

presolve writes a reduced MPS plus a postsolve record; any external solver
handles the reduced file; postsolve maps its solution back.  The verbose
log feeds the report command.
"""
import subprocess
import sys
import tempfile
from pathlib import Path

MPS = """NAME demo
ROWS
 N  COST
 L  CAP
COLUMNS
    M1 'MARKER' 'INTORG'
    X1 COST -2 CAP 7
    X2 COST -1 CAP 8
    M2 'MARKER' 'INTEND'
RHS
    RHS CAP 13
BOUNDS
 UP BND X1 1
 UP BND X2 1
ENDATA
"""


def run(*args):
    cmd = [sys.executable, "-m", "premip.cli", *args]
    print("$", " ".join(str(a) for a in args))
    proc = subprocess.run(cmd, capture_output=True, text=True)
    sys.stdout.write(proc.stdout)
    if proc.returncode not in (0,):
        sys.stderr.write(proc.stderr)
        raise SystemExit(proc.returncode)
    return proc


with tempfile.TemporaryDirectory() as tmp:
    base = Path(tmp)
    original = base / "demo.mps"
    original.write_text(MPS)
    reduced = base / "reduced.mps"
    record = base / "demo.postsolve"
    log = base / "demo.log"

    run("presolve", original, "-r", reduced, "-v", record,
        "--log", log, "--verbosity", "4")

    print("\nreduced file:")
    print(reduced.read_text())

    # stand-in for an external solver: the reduced optimum is (1, 0)
    solution = base / "reduced.sol"
    solution.write_text("=obj= -2\nX1 1\nX2 0\n")

    out = base / "original.sol"
    run("postsolve", "--record", record, "--solution", solution,
        "-o", out, "--problem", original)
    print("\noriginal-space solution:")
    print(out.read_text())

    run("report", log)
