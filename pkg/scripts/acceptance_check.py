#!/usr/bin/env python3
"""
Acceptance run - executes every command on the documented parameters and
summarizes the reports.
"""

import argparse
import itertools
import json
import sys
import tempfile
import time
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from dotenv import load_dotenv
from rich.console import Console
from rich.table import Table

# Add parent to path
sys.path.append(str(Path(__file__).parent.parent))

load_dotenv()

from cli import EXIT_OK, run_command  # noqa: E402
from joinings import DiscreteMeasure2D, cost_matrix, kr_distance  # noqa: E402

PRESET = ["--alpha-cf", "2,3,80,500", "--kappa", "963/1124"]

console = Console()


def _runs(atoms: int, witness: bool) -> List[Tuple[str, List[str]]]:
    n = str(atoms)
    runs = [
        (
            "rotation correspondence",
            ["orbit", *PRESET, "--x", "0.3", "--length", "1000"],
        ),
        ("tower rigidity", ["tower", *PRESET, "--k-max", "20"]),
        ("crossing dichotomy", ["renorm-find", *PRESET]),
        (
            "switch verification",
            ["switch", *PRESET, "--a", "0", "--b", "1", "--eps", "0.05"],
        ),
        (
            "weak closure",
            ["weak-closure", *PRESET, "--k", "1", "--horizon", "1000", "--atoms", n],
        ),
        ("power approximation", ["approx-powers", *PRESET, "--atoms", n]),
        ("bary recursion", ["bary", "--gamma", "1,0", "--a", "0.7", "--b", "0.3"]),
    ]
    if witness:
        runs.append(
            (
                "non-simplicity witness",
                ["witness", *PRESET, "--levels", "3", "--atoms", n],
            )
        )
    return runs


def kr_oracle(cases: int, seed: int) -> Tuple[bool, str]:
    """Exact KR against exhaustive matching, plus the metric axioms."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(cases):
        n = int(rng.integers(1, 7))
        mu = DiscreteMeasure2D.uniform(rng.random(n), rng.random(n))
        nu = DiscreteMeasure2D.uniform(rng.random(n), rng.random(n))
        cost = cost_matrix(mu.points, nu.points)
        brute = min(
            sum(cost[i, p[i]] for i in range(n)) / n
            for p in itertools.permutations(range(n))
        )
        worst = max(worst, abs(kr_distance(mu, nu) - brute))
    violations = 0
    for _ in range(cases):
        a, b, c = (
            DiscreteMeasure2D.uniform(rng.random(4), rng.random(4)) for _ in range(3)
        )
        if kr_distance(a, c) > kr_distance(a, b) + kr_distance(b, c) + 1e-12:
            violations += 1
        if abs(kr_distance(a, b) - kr_distance(b, a)) > 1e-12:
            violations += 1
    passed = worst <= 1e-9 and violations == 0
    return passed, f"max oracle error {worst:.2e}, {violations} axiom violations"


Results = Dict[str, Tuple[bool, str, float]]


def run_all(out_dir: Path, atoms: int, witness: bool) -> Results:
    results: Results = {}
    for name, argv in _runs(atoms, witness):
        console.print(f"[bold]{name}[/bold]: ietjoinings {' '.join(argv)}")
        command_dir = out_dir / argv[0]
        start = time.perf_counter()
        code = run_command([*argv, "--out", str(command_dir), "--quiet"])
        elapsed = time.perf_counter() - start
        report_file = command_dir / f"{argv[0]}.json"
        detail = f"exit {code}"
        if report_file.exists():
            report = json.loads(report_file.read_text(encoding="utf-8"))
            failing = [c["name"] for c in report["checks"] if not c["passed"]]
            if failing:
                detail += f", failing: {', '.join(failing)}"
            else:
                detail += ", all checks passed"
        results[name] = (code == EXIT_OK, detail, elapsed)

    start = time.perf_counter()
    passed, detail = kr_oracle(1000, 7)
    results["KR exactness"] = (passed, detail, time.perf_counter() - start)
    return results


def summary(results: Results) -> Table:
    table = Table(title="Acceptance")
    table.add_column("criterion")
    table.add_column("ok")
    table.add_column("seconds", justify="right")
    table.add_column("detail")
    for name, (passed, detail, elapsed) in results.items():
        status = "[green]yes[/green]" if passed else "[red]no[/red]"
        table.add_row(name, status, f"{elapsed:.1f}", detail)
    return table


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--atoms", type=int, default=100_000, help="Atoms per joining")
    parser.add_argument("--out", help="Keep reports here, not in a temporary directory")
    parser.add_argument(
        "--skip-witness", action="store_true", help="Leave out the witness"
    )
    args = parser.parse_args(argv)

    if args.out:
        results = run_all(Path(args.out), args.atoms, not args.skip_witness)
    else:
        with tempfile.TemporaryDirectory() as tmp:
            results = run_all(Path(tmp), args.atoms, not args.skip_witness)

    console.print(summary(results))
    passed = sum(1 for ok, _, _ in results.values() if ok)
    console.print(f"\nPassed: {passed} of {len(results)}")
    return 0 if passed == len(results) else 1


if __name__ == "__main__":
    sys.exit(main())
