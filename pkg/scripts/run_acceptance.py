#!/usr/bin/env python3
"""Run the acceptance criteria and print one PASS/FAIL line per criterion."""
import pathlib
import subprocess
import sys

root = pathlib.Path(__file__).resolve().parent.parent
proc = subprocess.run([sys.executable, "-m", "pytest", str(root / "tests" / "test_acceptance.py"), "-q", "-s",
                       "-p", "no:cacheprovider"], capture_output=True, text=True)
lines = [l for l in proc.stdout.splitlines() if l.startswith("CRITERION")]
print("\n".join(lines) if lines else proc.stdout)
sys.exit(proc.returncode)
