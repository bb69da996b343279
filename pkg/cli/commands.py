"""One handler per subcommand; each returns its checks and report payload."""

import argparse
import csv
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config_manager import ExperimentConfig, SeedBank, build_iet
from construction import (
    SwitchSpec,
    build_switch,
    geometric_eps,
    ksv_check,
    non_simplicity_witness,
    run_schedule,
)
from database_manager import DatabaseManager
from iet_core import (
    Iet3,
    Interval,
    InvalidParametersError,
    RotationRep,
    SearchFailure,
    convergents,
    partial_quotients,
    psi_count,
    rotate,
)
from joinings import (
    BaryState,
    DiscreteMeasure2D,
    approx_by_powers,
    bary_recursion,
    coefficient_stability,
    fit_power_mixture,
    kr_bound,
    sample_power_joining,
    stratified_points,
    weak_closure_check,
)
from models import CheckResult
from renorm import crossing_profile, find_renorm_times, scan_renorm_candidates
from towers import (
    SuggestedTower,
    build_tower,
    levels_to_csv,
    suggest_towers,
    tower_stats,
)

logger = logging.getLogger(__name__)

ROUND_TRIP_TOL = 1e-12
POWER_TOL = 1e-9
DICHOTOMY_SAMPLES = 10_000
DICHOTOMY_FRACTION = 0.99
DICHOTOMY_MIN_SHARE = 0.1
TOWER_COVERAGE = 0.9
TOWER_RIGIDITY = 0.05
APPROX_COVERAGE = 0.95
APPROX_TOL = 0.1
COEFFICIENT_TOL = 1e-12
WEAK_CLOSURE_TOL = 0.1
DECAY_TOL = 1e-6
STABILITY_SHIFTS = (1, 2, -1, -2)


@dataclass
class CommandContext:
    """
    Everything a handler needs.

    Attributes:
        args: Parsed command line
        config: Effective configuration
        seeds: Per-task generators of the run
        out_dir: Where data files go
    """

    args: argparse.Namespace
    config: ExperimentConfig
    seeds: SeedBank
    out_dir: Path
    _iet: Optional[Iet3] = field(default=None, repr=False)

    @property
    def iet(self) -> Iet3:
        if self._iet is None:
            self._iet = build_iet(self.config)
        return self._iet

    def rng(self, task: str) -> np.random.Generator:
        return self.seeds.rng(f"{self.args.command}/{task}")

    def path(self, name: str) -> str:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return str(self.out_dir / name)


@dataclass
class CommandOutput:
    checks: List[CheckResult] = field(default_factory=list)
    data: Dict[str, Any] = field(default_factory=dict)


def parse_ints(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise ValueError(f"Expected comma-separated integers, got {text!r}") from e


def parse_floats(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise ValueError(f"Expected comma-separated numbers, got {text!r}") from e


def write_intervals(path: str, pieces: Sequence[Tuple[float, float]]) -> None:
    """Rows "a,b" with 17 significant digits."""
    with open(path, "w", newline="\n", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["a", "b"])
        for a, b in pieces:
            writer.writerow([f"{a:.17g}", f"{b:.17g}"])


def ks_to_uniform(values: np.ndarray) -> float:
    """Kolmogorov distance of the empirical distribution to the uniform one on [0,1)."""
    ys = np.sort(np.asarray(values, dtype=float))
    n = len(ys)
    i = np.arange(n)
    return float(max(np.max((i + 1) / n - ys), np.max(ys - i / n)))


def cmd_iet_info(ctx: CommandContext) -> CommandOutput:
    iet = ctx.iet
    rep = iet.to_rotation()
    alpha, kappa = iet.exact_rotation()
    quotients = partial_quotients(alpha, ctx.args.cf_terms)
    try:
        back = Iet3.from_rotation(rep, iet.mode)
        error = max(
            abs(float(x) - float(y))
            for x, y in zip((iet.l1, iet.l2, iet.l3), (back.l1, back.l2, back.l3))
        )
        check = CheckResult.at_most("rotation_round_trip", error, ROUND_TRIP_TOL)
    except InvalidParametersError as e:
        check = CheckResult("rotation_round_trip", False, detail=str(e))
    data = {
        "iet": iet.to_dict(),
        "mode": iet.mode.tag.value,
        "alpha": float(rep.alpha),
        "kappa": float(rep.kappa),
        "discontinuities": [float(d) for d in iet.discontinuities],
        "shifts": [float(s) for s in iet.shifts],
        "partial_quotients": quotients,
        "convergents": [list(pq) for pq in convergents(quotients)],
    }
    return CommandOutput([check], data)


def _rotation_correspondence(iet: Iet3, x: float, steps: int) -> CheckResult:
    """Rescaled T^(psi_M(u)) x against R^M u at the first M >= steps with R^M u in K."""
    alpha, kappa = iet.exact_rotation()
    rep = RotationRep(alpha, kappa)
    u = kappa * Fraction(x)
    for M in range(max(steps, 1), max(steps, 1) + 1000):
        target = rotate(rep, u, M)
        if target < kappa:
            j = psi_count(rep, u, M)
            image = float(kappa) * float(iet.apply_pow(j, x))
            return CheckResult.at_most(
                "rotation_correspondence",
                abs(image - float(target)),
                POWER_TOL,
                f"M={M}, psi={j}",
            )
    return CheckResult.vacuous("rotation_correspondence", "no return to K found")


def cmd_orbit(ctx: CommandContext) -> CommandOutput:
    iet, length = ctx.iet, ctx.args.length
    if length < 1:
        raise ValueError("Orbit length must be positive")
    segment = iet.orbit(ctx.args.x, length)
    x0 = float(segment.start)
    direct = float(iet.apply_pow(length - 1, segment.start))
    checks = [
        CheckResult.at_most(
            "power_consistency", abs(direct - float(segment.points[-1])), POWER_TOL
        ),
        _rotation_correspondence(iet, x0, length),
    ]
    path = ctx.path("orbit.csv")
    with open(path, "w", newline="\n", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["i", "x"])
        for i, p in enumerate(segment.points):
            writer.writerow([i, f"{float(p):.17g}"])
    return CommandOutput(checks, {"orbit": segment.to_dict(), "csv": "orbit.csv"})


def _dichotomy(
    iet: Iet3, q: int, m: int, rng: np.random.Generator
) -> List[CheckResult]:
    profile = crossing_profile(iet, q)
    xs = rng.random(DICHOTOMY_SAMPLES) * float(profile.kappa)
    counts = profile.counts_at(xs)
    share_m = float(np.mean(counts == m))
    share_next = float(np.mean(counts == m + 1))
    return [
        CheckResult.at_least(
            f"dichotomy_q{q}",
            share_m + share_next,
            DICHOTOMY_FRACTION,
            f"counts in {{{m},{m + 1}}}",
        ),
        CheckResult.at_least(
            f"dichotomy_share_q{q}", min(share_m, share_next), DICHOTOMY_MIN_SHARE
        ),
    ]


def cmd_renorm_find(ctx: CommandContext) -> CommandOutput:
    c = ctx.config
    times = find_renorm_times(ctx.iet, c.delta, c.t_max, section_tol=c.section_tol)
    if not times:
        raise SearchFailure(f"No renormalization time accepted up to t={c.t_max}")
    rng = ctx.rng("dichotomy")
    checks: List[CheckResult] = []
    for rt in times:
        checks.extend(_dichotomy(ctx.iet, rt.q, rt.m, rng))
    data: Dict[str, Any] = {"times": [rt.to_dict() for rt in times]}
    if ctx.args.all:
        data["candidates"] = [
            cand.to_dict()
            for cand in scan_renorm_candidates(
                ctx.iet, c.delta, c.t_max, section_tol=c.section_tol
            )
        ]
    return CommandOutput(checks, data)


def _pick_tower(suggestions: List[SuggestedTower], coverage: float) -> SuggestedTower:
    """Most rigid suggestion above the coverage floor, else the best-covering one."""
    if not suggestions:
        raise SearchFailure("No tower certified")
    for s in suggestions:
        if s.stats.coverage > coverage:
            return s
    return max(suggestions, key=lambda s: s.stats.coverage)


def _tower_checks(stats) -> List[CheckResult]:
    nested = (
        stats.tilde_measure <= stats.hat_measure + 1e-12
        and stats.hat_measure <= stats.coverage + 1e-12
    )
    return [
        CheckResult.at_least("coverage", stats.coverage, TOWER_COVERAGE),
        CheckResult.at_most("rigidity", stats.rigidity, TOWER_RIGIDITY),
        CheckResult(
            "subtower_nesting",
            bool(nested),
            stats.hat_measure,
            stats.coverage,
            None,
            "tilde <= hat <= coverage",
        ),
    ]


def cmd_tower(ctx: CommandContext) -> CommandOutput:
    iet, args = ctx.iet, ctx.args
    if args.base:
        if args.height is None:
            raise ValueError("--base needs --height")
        a, b = parse_floats(args.base)
        base = Interval(iet.mode.coerce(a), iet.mode.coerce(b))
        tower = build_tower(iet, base, args.height)
        stats = tower_stats(tower, iet)
        data: Dict[str, Any] = {"tower": tower.to_dict(), "stats": stats.to_dict()}
    else:
        suggestions = suggest_towers(iet, args.k_max)
        chosen = _pick_tower(suggestions, TOWER_COVERAGE)
        tower, stats = chosen.tower, chosen.stats
        data = {
            "tower": chosen.to_dict(),
            "stats": stats.to_dict(),
            "candidates": [s.to_dict() for s in suggestions],
        }
    levels_to_csv(tower, ctx.path("tower_levels.csv"))
    data["csv"] = "tower_levels.csv"
    return CommandOutput(_tower_checks(stats), data)


def cmd_joining_sample(ctx: CommandContext) -> CommandOutput:
    a, n = ctx.args.power, ctx.config.n_atoms
    measure = sample_power_joining(ctx.iet, a, n, ctx.rng("atoms"))
    measure.to_csv(ctx.path("joining.csv"))
    measure.histogram_to_csv(ctx.path("joining_hist.csv"), ctx.args.hist_grid)
    # T^a has at most 2|a|+1 pieces, each moving the stratified count by one
    bound = (2 * abs(a) + 3) / n
    checks = [
        CheckResult.at_most("x_marginal", ks_to_uniform(measure.xs), 1.0 / n + 1e-12),
        CheckResult.at_most("y_marginal", ks_to_uniform(measure.ys), bound),
    ]
    data = {
        "power": a,
        "n_atoms": n,
        "csv": "joining.csv",
        "histogram": "joining_hist.csv",
        "mean_displacement": float(np.mean(np.abs(measure.ys - measure.xs))),
    }
    return CommandOutput(checks, data)


def cmd_kr(ctx: CommandContext) -> CommandOutput:
    c = ctx.config
    mu = DiscreteMeasure2D.from_csv(ctx.args.mu)
    nu = DiscreteMeasure2D.from_csv(ctx.args.nu)
    result = kr_bound(mu, nu, c.ground_metric, c.kr_exact_limit, c.kr_grid)
    data = {"mu_atoms": mu.n_atoms, "nu_atoms": nu.n_atoms, "kr": result.to_dict()}
    return CommandOutput([], data)


def cmd_approx_powers(ctx: CommandContext) -> CommandOutput:
    iet, c, args = ctx.iet, ctx.config, ctx.args
    if args.measure:
        measure = DiscreteMeasure2D.from_csv(args.measure)
    else:
        rng = ctx.rng("product")
        measure = DiscreteMeasure2D.uniform(
            stratified_points(c.n_atoms, rng), rng.random(c.n_atoms)
        )
    chosen = _pick_tower(suggest_towers(iet, args.k_max), APPROX_COVERAGE)
    result = approx_by_powers(iet, measure, chosen.tower, c.bins)
    checks = [
        CheckResult.at_least("tower_coverage", chosen.stats.coverage, APPROX_COVERAGE),
        CheckResult.at_most(
            "coefficient_total", result.coefficients.total, 1.0 + COEFFICIENT_TOL
        ),
        CheckResult.at_most("l2_error_coord", result.l2_errors["coord"], APPROX_TOL),
    ]
    xbar = (result.coefficients.base_bin + 0.5) / result.bins
    stability = coefficient_stability(iet, result, STABILITY_SHIFTS, xbar)
    data: Dict[str, Any] = {
        "tower": chosen.to_dict(),
        "approximation": result.to_dict(),
        "stability": [s.to_dict() for s in stability],
    }
    if args.strands >= 1:
        mixture = fit_power_mixture(
            iet,
            measure,
            chosen.tower,
            args.strands,
            ctx.rng("mixture"),
            c.bins,
            min(measure.n_atoms, c.kr_exact_limit),
        )
        data["mixture"] = mixture.to_dict()
    return CommandOutput(checks, data)


def cmd_weak_closure(ctx: CommandContext) -> CommandOutput:
    result = weak_closure_check(
        ctx.iet, ctx.args.k, ctx.args.horizon, ctx.config.n_atoms, ctx.rng("atoms")
    )
    check = CheckResult.at_most(
        "weak_closure",
        result.kr_error,
        WEAK_CLOSURE_TOL,
        f"n={result.best_n}, solver slack {result.slack:.3g}",
    )
    return CommandOutput([check], {"result": result.to_dict()})


def cmd_bary(ctx: CommandContext) -> CommandOutput:
    args = ctx.args
    state = BaryState(parse_floats(args.gamma), args.a, args.b, args.drift)
    report = bary_recursion(state, args.steps)
    checks: List[CheckResult] = []
    if len(state.gamma) == 2 and args.drift == 0:
        expected = abs(args.a - args.b) / (args.a + args.b)
        if report.decay_rate is None:
            checks.append(CheckResult.vacuous("decay_rate", "gap vanished"))
        else:
            checks.append(
                CheckResult.at_most(
                    "decay_rate",
                    abs(report.decay_rate - expected),
                    DECAY_TOL,
                    f"expected |a-b|/(a+b) = {expected:.6g}",
                )
            )
    if args.drift == 0:
        checks.append(CheckResult.at_most("mean_preserved", report.mean_drift, 1e-12))
    return CommandOutput(checks, {"recursion": report.to_dict()})


def cmd_switch(ctx: CommandContext) -> CommandOutput:
    c, args = ctx.config, ctx.args
    spec = SwitchSpec(
        args.a,
        args.b,
        c.eps,
        t=args.t,
        delta=c.delta,
        t_max=c.t_max,
        samples=c.samples,
        seed=c.seed,
    )
    result = build_switch(ctx.iet, spec, ctx.rng("verify"))
    write_intervals(ctx.path("switch_A.csv"), result.A.to_list())
    write_intervals(ctx.path("switch_B.csv"), result.B.to_list())
    data = {
        "spec": spec.to_dict(),
        "switch": result.to_dict(),
        "csv": ["switch_A.csv", "switch_B.csv"],
    }
    return CommandOutput(list(result.diagnostics), data)


def cmd_schedule(ctx: CommandContext) -> CommandOutput:
    c = ctx.config
    eps = geometric_eps(c.eps, c.levels)
    rng = ctx.rng("schedule")
    result = run_schedule(
        ctx.iet,
        parse_ints(ctx.args.exponents),
        eps,
        c.levels,
        c.n_atoms,
        rng,
        delta=c.delta,
        t_max=c.t_max,
        samples=c.samples,
    )
    schedule = result.schedule
    ksv = ksv_check(ctx.iet, schedule, ctx.rng("ksv"))
    result.average.histogram_to_csv(ctx.path("schedule_hist.csv"), 64)
    checks = [
        CheckResult(
            "schedule_complete",
            schedule.completed,
            detail=schedule.failure or f"{len(schedule.levels)} levels",
        )
    ] + ksv.checks
    data = {
        "schedule": schedule.to_dict(),
        "ksv": ksv.to_dict(),
        "histogram": "schedule_hist.csv",
    }
    return CommandOutput(checks, data)


def cmd_witness(ctx: CommandContext) -> CommandOutput:
    c = ctx.config
    report = non_simplicity_witness(
        ctx.iet,
        c.levels,
        c.n_atoms,
        ctx.rng("witness"),
        exponents=parse_ints(ctx.args.exponents),
        delta=c.delta,
        t_max=c.t_max,
        samples=c.samples,
        bins=c.bins,
    )
    return CommandOutput(list(report.checks), {"witness": report.to_dict()})


def cmd_history(ctx: CommandContext) -> CommandOutput:
    if not ctx.config.database_url:
        raise ValueError(
            "history needs a run ledger: pass --db or set IETJ_DATABASE_URL"
        )
    db = DatabaseManager(ctx.config.database_url)
    data: Dict[str, Any] = {}
    if ctx.args.prune_days is not None:
        if ctx.args.prune_days < 0:
            raise ValueError("--prune-days must be non-negative")
        data["pruned"] = db.cleanup_old_runs(ctx.args.prune_days)
    if ctx.args.run_id is not None:
        run = db.get_run(ctx.args.run_id)
        if run is None:
            raise ValueError(f"No run with id {ctx.args.run_id}")
        data["runs"] = [run.to_dict()]
    else:
        runs = db.get_runs(ctx.args.history_command, ctx.args.limit)
        data["runs"] = [r.to_dict() for r in runs]
    return CommandOutput([], data)


HANDLERS: Dict[str, Callable[[CommandContext], CommandOutput]] = {
    "iet-info": cmd_iet_info,
    "orbit": cmd_orbit,
    "renorm-find": cmd_renorm_find,
    "tower": cmd_tower,
    "joining-sample": cmd_joining_sample,
    "kr": cmd_kr,
    "approx-powers": cmd_approx_powers,
    "weak-closure": cmd_weak_closure,
    "bary": cmd_bary,
    "switch": cmd_switch,
    "schedule": cmd_schedule,
    "witness": cmd_witness,
    "history": cmd_history,
}
