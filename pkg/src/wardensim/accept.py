"""Acceptance suite: the ratio, ordering and structural checks the
simulator must reproduce.

Absolute durations are hardware- and stack-bound in any real deployment,
so every check here is a ratio, an ordering, a trend sign, or an exact
structural property. Each criterion runs on 20 seeded trials per scenario
(deterministic in the root seed) and reports one pass/fail line.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import channels, rules
from .endpoints import SenderStrategy
from .packets import PacketKind, default_packet
from .experiments import (
    Aggregate,
    ScenarioConfig,
    aggregate_results,
    dynamic_scenario,
    run_trials,
)
from .simkernel import TrialResult, run_trial
from .warden import DynamicWarden, NoWarden, RegularWarden, Warden, variant_warden


@dataclass(frozen=True)
class CriterionResult:
    cid: str
    name: str
    passed: bool
    measured: str
    requirement: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.cid} {self.name}: {status} [{self.measured}; requires {self.requirement}]"


class ScenarioCache:
    """Runs each scenario once and shares aggregates across criteria."""

    def __init__(self, root_seed: int = 42, trials: int = 20, jobs: int = 1):
        self.root_seed = root_seed
        self.trials = trials
        self.jobs = jobs
        self._store: dict[str, tuple[Aggregate, list[TrialResult], int]] = {}

    def get(self, cfg: ScenarioConfig) -> tuple[Aggregate, list[TrialResult]]:
        key = cfg.scenario_key()
        if key not in self._store:
            results, timeouts = run_trials(cfg, jobs=self.jobs)
            agg = aggregate_results(cfg, results, timeouts)
            self._store[key] = (agg, results, timeouts)
        agg, results, _ = self._store[key]
        return agg, results

    # Scenario builders (all share the cache's root seed and trial count).

    def _cfg(self, label: str, warden, **kw) -> ScenarioConfig:
        return ScenarioConfig(
            label=label, warden=warden, trials=self.trials,
            root_seed=self.root_seed, **kw,
        )

    def none(self, target: int = 400) -> ScenarioConfig:
        return self._cfg("none", NoWarden(), target=target)

    def regular(self, target: int = 400) -> ScenarioConfig:
        return self._cfg("regular95", RegularWarden(0.95), target=target)

    def dynamic(self, rd: float, fr: float, target: int = 400,
                strategy: SenderStrategy = SenderStrategy.ADAPTIVE_SWITCHING
                ) -> ScenarioConfig:
        return dynamic_scenario(
            rd, fr, target=target, trials=self.trials,
            root_seed=self.root_seed, strategy=strategy,
        )

    def variant(self, name: str, target: int = 400) -> ScenarioConfig:
        return self._cfg(name, variant_warden(name), target=target)


def spearman(xs: list[float], ys: list[float]) -> float:
    """Spearman rank correlation (average ranks on ties)."""

    def ranks(values: list[float]) -> np.ndarray:
        arr = np.asarray(values, dtype=float)
        order = np.argsort(arr, kind="stable")
        rank = np.empty(len(arr), dtype=float)
        rank[order] = np.arange(1, len(arr) + 1)
        for v in np.unique(arr):
            mask = arr == v
            if mask.sum() > 1:
                rank[mask] = rank[mask].mean()
        return rank

    rx, ry = ranks(xs), ranks(ys)
    rx -= rx.mean()
    ry -= ry.mean()
    denom = float(np.sqrt((rx ** 2).sum() * (ry ** 2).sum()))
    return float((rx * ry).sum() / denom)


# --- criteria ---

FR_TREND_GRID = (1.0, 2.0, 5.0, 10.0, 20.0, 35.0)


def criterion_regular_near_transparency(cache: ScenarioCache) -> CriterionResult:
    none_agg, _ = cache.get(cache.none(400))
    reg_agg, _ = cache.get(cache.regular(400))
    inflation = reg_agg.time_mean / none_agg.time_mean - 1.0
    return CriterionResult(
        "C01", "regular_near_transparency",
        passed=inflation <= 0.05,
        measured=f"inflation={inflation * 100:.2f}% "
                 f"(regular {reg_agg.time_mean:.2f}s vs none {none_agg.time_mean:.2f}s)",
        requirement="<=5%",
    )


def criterion_dynamic_slowdown(cache: ScenarioCache) -> CriterionResult:
    reg_agg, _ = cache.get(cache.regular(400))
    dyn_agg, _ = cache.get(cache.dynamic(0.4, 2.0))
    ratio = dyn_agg.time_mean / reg_agg.time_mean
    return CriterionResult(
        "C02", "dynamic_slowdown_vs_regular",
        passed=ratio >= 1.15,
        measured=f"time ratio={ratio:.3f} "
                 f"(dynamic {dyn_agg.time_mean:.2f}s vs regular {reg_agg.time_mean:.2f}s)",
        requirement=">=1.15x",
    )


def criterion_reload_trend(cache: ScenarioCache) -> CriterionResult:
    means = []
    for fr in FR_TREND_GRID:
        agg, _ = cache.get(cache.dynamic(0.4, fr))
        means.append(agg.time_mean)
    rho = spearman(list(FR_TREND_GRID), means)
    pretty = ", ".join(f"{fr:g}s:{m:.1f}" for fr, m in zip(FR_TREND_GRID, means))
    return CriterionResult(
        "C03", "reload_interval_trend",
        passed=rho <= -0.5,
        measured=f"spearman={rho:.3f} ({pretty})",
        requirement="<=-0.5",
    )


def criterion_traffic_inflation(cache: ScenarioCache) -> CriterionResult:
    reg_agg, _ = cache.get(cache.regular(400))
    dyn_agg, _ = cache.get(cache.dynamic(0.4, 2.0))
    ratio = dyn_agg.total_mean / reg_agg.total_mean
    return CriterionResult(
        "C04", "traffic_inflation",
        passed=ratio >= 1.2,
        measured=f"total-packet ratio={ratio:.3f} "
                 f"(dynamic {dyn_agg.total_mean:.0f} vs regular {reg_agg.total_mean:.0f})",
        requirement=">=1.2x",
    )


def criterion_normalized_ordering(cache: ScenarioCache) -> CriterionResult:
    reg_agg, _ = cache.get(cache.regular(400))
    means = {}
    for rd in (0.2, 0.3, 0.4):
        agg, _ = cache.get(cache.dynamic(rd, 2.0))
        means[rd] = agg.normalized_mean
    ordered = means[0.2] < means[0.3] < means[0.4] < reg_agg.normalized_mean
    return CriterionResult(
        "C05", "normalized_count_ordering",
        passed=ordered,
        measured=(f"normalized means 20%:{means[0.2]:.0f} < 30%:{means[0.3]:.0f} "
                  f"< 40%:{means[0.4]:.0f} < regular:{reg_agg.normalized_mean:.0f}"
                  if ordered else
                  f"normalized means 20%:{means[0.2]:.0f}, 30%:{means[0.3]:.0f}, "
                  f"40%:{means[0.4]:.0f}, regular:{reg_agg.normalized_mean:.0f}"),
        requirement="strictly increasing",
    )


def criterion_length_linearity(cache: ScenarioCache) -> CriterionResult:
    long_agg, _ = cache.get(cache.dynamic(0.4, 2.0, target=400))
    short_agg, _ = cache.get(cache.dynamic(0.4, 2.0, target=100))
    ratio = long_agg.time_mean / short_agg.time_mean
    return CriterionResult(
        "C06", "transfer_length_linearity",
        passed=3.5 <= ratio <= 4.5,
        measured=f"time(400)/time(100)={ratio:.3f} "
                 f"({long_agg.time_mean:.1f}s / {short_agg.time_mean:.1f}s)",
        requirement="in [3.5, 4.5]",
    )


def criterion_fixed_channel_multiplier(cache: ScenarioCache) -> CriterionResult:
    none_agg, _ = cache.get(cache.none(400))
    fixed_agg, _ = cache.get(
        cache.dynamic(0.4, 2.0, strategy=SenderStrategy.FIXED_SINGLE_CHANNEL)
    )
    multiplier = fixed_agg.time_mean / none_agg.time_mean
    expected = 1.0 / (1.0 - 20 / 50)
    ok = abs(multiplier - expected) <= 0.1 * expected
    return CriterionResult(
        "C07", "fixed_channel_multiplier",
        passed=ok,
        measured=f"multiplier={multiplier:.3f} (analytic {expected:.3f})",
        requirement="within +/-10% of 1/(1-20/50)",
    )


def criterion_random_variant_ordering(cache: ScenarioCache) -> CriterionResult:
    means = {}
    for name in ("V2", "V3", "V4"):
        agg, _ = cache.get(cache.variant(name, 400))
        means[name] = agg.time_mean
    ok = means["V3"] >= means["V2"] and means["V3"] >= means["V4"]
    return CriterionResult(
        "C08", "random_variant_ordering",
        passed=ok,
        measured=(f"V2:{means['V2']:.1f}s V3:{means['V3']:.1f}s "
                  f"V4:{means['V4']:.1f}s"),
        requirement="V3 slowest of {V2, V3, V4}",
    )


def _structural_failures(cache: ScenarioCache) -> list[str]:
    problems: list[str] = []

    # Channel<->rule pairing must be exactly the identity matrix.
    base = default_packet(PacketKind.COM, 0)
    for spec in channels.catalog():
        signal = channels.encode(spec, base, 1)
        for r in rules.all_rules():
            expected = r.id == spec.id
            if r.matches(signal) != expected:
                problems.append(f"rule {r.id} vs channel {spec.id} matrix mismatch")

    # Normalization must erase every channel's bit.
    for spec in channels.catalog():
        signal = channels.encode(spec, base, 1)
        scrubbed, disposition = rules.apply_ruleset(rules.ALL_RULE_IDS, signal)
        if disposition is not rules.Disposition.NORMALIZED:
            problems.append(f"channel {spec.id} signal not normalized")
        if channels.decode(spec, scrubbed) != 0:
            problems.append(f"channel {spec.id} bit survives normalization")

    # Exact active-set cardinalities.
    for fraction, expected in ((0.95, 48),):
        w = Warden(RegularWarden(fraction), np.random.default_rng(1))
        if len(w.active) != expected:
            problems.append(f"regular {fraction} has {len(w.active)} rules")
    for fraction, expected in ((0.4, 20), (0.3, 15), (0.2, 10)):
        w = Warden(DynamicWarden(fraction, 2.0), np.random.default_rng(1))
        for step in range(1, 51):
            w.maybe_reload(step * 2.0)
            if len(w.active) != expected:
                problems.append(f"dynamic {fraction} has {len(w.active)} rules")
                break

    # Ruleset constant between reload boundaries.
    w = Warden(DynamicWarden(0.4, 2.0), np.random.default_rng(7))
    last_interval = 0
    last_active = w.active
    t = 0.0
    while t < 100.0:
        w.maybe_reload(t)
        interval = int(t // 2.0)
        if interval == last_interval and w.active != last_active:
            problems.append(f"active set changed mid-interval at t={t:.2f}")
            break
        last_interval, last_active = interval, w.active
        t += 0.31
    if w.reload_count != 49:
        problems.append(f"expected 49 reloads over [0,100), saw {w.reload_count}")

    # Rule inclusion frequency across 10^4 independent reloads.
    w = Warden(DynamicWarden(0.4, 1.0), np.random.default_rng(3))
    counts = np.zeros(rules.RULE_COUNT, dtype=int)
    for step in range(1, 10_001):
        w.maybe_reload(float(step))
        counts[list(w.active)] += 1
    freq = counts / 10_000.0
    if not np.all(np.abs(freq - 0.4) <= 0.02):
        worst = float(np.max(np.abs(freq - 0.4)))
        problems.append(f"rule inclusion frequency off by {worst:.4f} (>0.02)")

    # Bit-identical repetition of a full trial.
    cfg = cache.dynamic(0.4, 2.0)
    seed = 90210
    if run_trial(cfg, seed) != run_trial(cfg, seed):
        problems.append("repeated seed produced different TrialResult")

    return problems


def criterion_structural_properties(cache: ScenarioCache) -> CriterionResult:
    problems = _structural_failures(cache)
    return CriterionResult(
        "C09", "structural_properties",
        passed=not problems,
        measured="all exact checks hold" if not problems else "; ".join(problems[:4]),
        requirement="bijection, destruction, cardinality, constancy, "
                    "uniformity, determinism",
    )


def criterion_cost_proxies(cache: ScenarioCache) -> CriterionResult:
    _, dyn_results = cache.get(cache.dynamic(0.4, 2.0))
    _, reg_results = cache.get(cache.regular(400))
    problems = []
    for r in dyn_results:
        if r.rule_evaluations != 20 * r.total_packets:
            problems.append("dynamic per-packet evaluations not exactly 20")
            break
        if abs(r.reload_count - r.completion_time / 2.0) > 1.0:
            problems.append(
                f"reloads {r.reload_count} vs duration/f_R "
                f"{r.completion_time / 2.0:.2f} off by more than 1"
            )
            break
    for r in reg_results:
        if r.rule_evaluations != 48 * r.total_packets:
            problems.append("regular per-packet evaluations not exactly 48")
            break
    return CriterionResult(
        "C10", "cost_proxies",
        passed=not problems,
        measured=("per-packet evaluation ratio exactly 20/48"
                  f" (= {Fraction(20, 48)}); reloads track duration/f_R"
                  if not problems else "; ".join(problems)),
        requirement="evals ratio 20/48 exact, reloads within +/-1",
    )


CRITERIA: tuple[tuple[str, Callable[[ScenarioCache], CriterionResult]], ...] = (
    ("regular_near_transparency", criterion_regular_near_transparency),
    ("dynamic_slowdown_vs_regular", criterion_dynamic_slowdown),
    ("reload_interval_trend", criterion_reload_trend),
    ("traffic_inflation", criterion_traffic_inflation),
    ("normalized_count_ordering", criterion_normalized_ordering),
    ("transfer_length_linearity", criterion_length_linearity),
    ("fixed_channel_multiplier", criterion_fixed_channel_multiplier),
    ("random_variant_ordering", criterion_random_variant_ordering),
    ("structural_properties", criterion_structural_properties),
    ("cost_proxies", criterion_cost_proxies),
)


def run_acceptance(
    root_seed: int = 42,
    trials: int = 20,
    jobs: int = 1,
    cache: Optional[ScenarioCache] = None,
) -> list[CriterionResult]:
    cache = cache or ScenarioCache(root_seed=root_seed, trials=trials, jobs=jobs)
    return [fn(cache) for _, fn in CRITERIA]
