"""Run every CLI experiment with one config and collect the artifacts.

    python3 scripts/run_all.py --out results/ [--config scenario.json]
"""

import argparse
import sys
import time

from huygens_relay.cli import COMMANDS, main


def run(out: str, config: str | None) -> int:
    failures = 0
    for cmd in COMMANDS:
        argv = [cmd, "--out", out.rstrip("/") + "/"]
        if config:
            argv += ["--config", config]
        t0 = time.perf_counter()
        code = main(argv)
        print(f"  [{cmd}] exit={code} {time.perf_counter() - t0:.1f} s")
        failures += code != 0
    # the hard-mode trace is the comparison baseline for the soft one
    argv = ["handover", "--mode", "hard", "--out", out.rstrip("/") + "/handover_hard.csv"]
    failures += main(argv + (["--config", config] if config else [])) != 0
    return failures


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/")
    ap.add_argument("--config")
    a = ap.parse_args()
    sys.exit(1 if run(a.out, a.config) else 0)
