"""Run the default verification suite and store text and JSON reports.

    python scripts/run_suite.py [results_dir] [extra CLI flags...]
"""

import pathlib
import sys
from contextlib import redirect_stdout

from slicegrav.cli import main

out_dir = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "results")
out_dir.mkdir(parents=True, exist_ok=True)
flags = sys.argv[2:]
with open(out_dir / "report.txt", "w") as fh, redirect_stdout(fh):
    code = main(["--format", "both", "--out", str(out_dir / "report.json"), *flags])
lines = (out_dir / "report.txt").read_text().splitlines()
if len(lines) >= 2:
    print(lines[-2])
print(f"exit code {code}; reports in {out_dir}/")
sys.exit(code)
