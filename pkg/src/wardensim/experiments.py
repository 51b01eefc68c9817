"""Scenario definitions, seeded multi-trial runs and CSV emission.

Trial ``i`` of a scenario draws its seed from a keyed hash of
``(root_seed, scenario_key, i)``, where the scenario key is a canonical
description of the configuration. Rows of a sweep are therefore
independent of sweep order, and adding scenarios never perturbs existing
ones.
"""

from __future__ import annotations

import hashlib
import multiprocessing
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .endpoints import EndpointTiming, SenderStrategy
from .simkernel import LinkConfig, TrialResult, TrialTimeout, run_trial
from .warden import (
    DynamicWarden,
    NoWarden,
    RandomDynamicWarden,
    RegularWarden,
    WardenConfig,
    variant_warden,
)

DEFAULT_FR_SWEEP: tuple[float, ...] = (1, 2, 3, 4, 5, 10, 15, 20, 25, 30, 35)
TABLE_VARIANTS = ("V1", "V2", "V3", "V4")
TABLE_TARGETS = (400, 200, 100)

CSV_HEADER = (
    "scenario,f_R,R_D,target,trials,timeouts,"
    "time_mean,time_std,normalized_mean,normalized_std,"
    "forwarded_mean,forwarded_std,total_mean,total_std,"
    "rule_evals_mean,reloads_mean"
)


@dataclass(frozen=True)
class ScenarioConfig:
    label: str
    warden: WardenConfig
    strategy: SenderStrategy = SenderStrategy.ADAPTIVE_SWITCHING
    target: int = 400
    trials: int = 20
    root_seed: int = 42
    timing: EndpointTiming = field(default_factory=EndpointTiming)
    warden_link: LinkConfig = field(default_factory=LinkConfig)
    nel_link: LinkConfig = field(default_factory=LinkConfig)
    timeout_factor: float = 10.0

    def scenario_key(self) -> str:
        """Canonical parameter string used for per-trial seed derivation."""
        w = self.warden
        if isinstance(w, NoWarden):
            wkey = "none"
        elif isinstance(w, RegularWarden):
            wkey = f"regular:{w.active_fraction!r}"
        elif isinstance(w, DynamicWarden):
            wkey = f"dynamic:{w.active_fraction!r}:{w.reload_interval!r}"
        elif isinstance(w, RandomDynamicWarden):
            wkey = (
                f"random:{w.interval_range[0]!r}-{w.interval_range[1]!r}"
                f":{w.fraction_range[0]!r}-{w.fraction_range[1]!r}"
            )
        else:
            raise TypeError(f"unknown warden config: {w!r}")
        t = self.timing
        tkey = (
            f"{t.probe_repeats}:{t.probe_spacing!r}:{t.probe_timeout!r}"
            f":{t.nel_pause!r}:{t.com_burst}:{t.com_pacing!r}"
        )
        return f"{wkey}|{self.strategy.value}|target={self.target}|{tkey}"


def derive_trial_seed(root_seed: int, scenario_key: str, index: int) -> int:
    """Keyed seed mixing: 64-bit blake2b of ``root:key:index``."""
    digest = hashlib.blake2b(
        f"{root_seed}:{scenario_key}:{index}".encode(), digest_size=8
    ).digest()
    return int.from_bytes(digest, "big")


@dataclass(frozen=True)
class Aggregate:
    """Mean/population-std of per-trial metrics over completed trials."""

    label: str
    f_r: Optional[float]
    r_d: Optional[float]
    target: int
    trials: int
    timeouts: int
    time_mean: float
    time_std: float
    normalized_mean: float
    normalized_std: float
    forwarded_mean: float
    forwarded_std: float
    total_mean: float
    total_std: float
    rule_evals_mean: float
    reloads_mean: float

    @property
    def n(self) -> int:
        return self.trials - self.timeouts


def _mean_std(values: Sequence[float]) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    return float(arr.mean()), float(arr.std())


def aggregate_results(
    cfg: ScenarioConfig, results: Sequence[TrialResult], timeouts: int
) -> Aggregate:
    if not results:
        raise ValueError(f"scenario {cfg.label!r}: no completed trials to aggregate")
    f_r = r_d = None
    if isinstance(cfg.warden, DynamicWarden):
        f_r = cfg.warden.reload_interval
        r_d = cfg.warden.active_fraction
    time_mean, time_std = _mean_std([r.completion_time for r in results])
    norm_mean, norm_std = _mean_std([r.normalized for r in results])
    forw_mean, forw_std = _mean_std([r.forwarded for r in results])
    total_mean, total_std = _mean_std([r.total_packets for r in results])
    evals_mean, _ = _mean_std([r.rule_evaluations for r in results])
    reloads_mean, _ = _mean_std([r.reload_count for r in results])
    return Aggregate(
        label=cfg.label, f_r=f_r, r_d=r_d, target=cfg.target,
        trials=cfg.trials, timeouts=timeouts,
        time_mean=time_mean, time_std=time_std,
        normalized_mean=norm_mean, normalized_std=norm_std,
        forwarded_mean=forw_mean, forwarded_std=forw_std,
        total_mean=total_mean, total_std=total_std,
        rule_evals_mean=evals_mean, reloads_mean=reloads_mean,
    )


def _trial_task(args: tuple[ScenarioConfig, int]) -> Optional[TrialResult]:
    cfg, seed = args
    try:
        return run_trial(cfg, seed)
    except TrialTimeout:
        return None


def run_trials(
    cfg: ScenarioConfig, jobs: int = 1
) -> tuple[list[TrialResult], int]:
    """All trials of a scenario; returns (completed results, timeout count)."""
    key = cfg.scenario_key()
    seeds = [derive_trial_seed(cfg.root_seed, key, i) for i in range(cfg.trials)]
    tasks = [(cfg, s) for s in seeds]
    if jobs > 1:
        with multiprocessing.Pool(jobs) as pool:
            outcomes = pool.map(_trial_task, tasks)
    else:
        outcomes = [_trial_task(t) for t in tasks]
    results = [r for r in outcomes if r is not None]
    timeouts = sum(1 for r in outcomes if r is None)
    return results, timeouts


def run_scenario(cfg: ScenarioConfig, jobs: int = 1) -> Aggregate:
    results, timeouts = run_trials(cfg, jobs=jobs)
    return aggregate_results(cfg, results, timeouts)


def dynamic_scenario(
    rd_fraction: float,
    reload_interval: float,
    *,
    target: int = 400,
    trials: int = 20,
    root_seed: int = 42,
    timing: EndpointTiming | None = None,
    strategy: SenderStrategy = SenderStrategy.ADAPTIVE_SWITCHING,
) -> ScenarioConfig:
    label = f"dynamic_rd{int(round(rd_fraction * 100))}_fr{reload_interval:g}"
    if strategy is SenderStrategy.FIXED_SINGLE_CHANNEL:
        label = "fixed_" + label
    return ScenarioConfig(
        label=label,
        warden=DynamicWarden(rd_fraction, reload_interval),
        strategy=strategy,
        target=target, trials=trials, root_seed=root_seed,
        timing=timing or EndpointTiming(),
    )


def sweep_fr(
    rd_fraction: float,
    fr_values: Sequence[float] = DEFAULT_FR_SWEEP,
    *,
    target: int = 400,
    trials: int = 20,
    root_seed: int = 42,
    timing: EndpointTiming | None = None,
    jobs: int = 1,
) -> list[Aggregate]:
    """One aggregate row per reload interval, rows independent of order."""
    rows = []
    for fr in fr_values:
        cfg = dynamic_scenario(
            rd_fraction, float(fr), target=target, trials=trials,
            root_seed=root_seed, timing=timing,
        )
        rows.append(run_scenario(cfg, jobs=jobs))
    return rows


def table1_scenarios(
    *,
    trials: int = 20,
    root_seed: int = 42,
    targets: Sequence[int] = TABLE_TARGETS,
    timing: EndpointTiming | None = None,
) -> list[ScenarioConfig]:
    cfgs = []
    for variant in TABLE_VARIANTS:
        for target in targets:
            cfgs.append(ScenarioConfig(
                label=variant,
                warden=variant_warden(variant),
                target=target, trials=trials, root_seed=root_seed,
                timing=timing or EndpointTiming(),
            ))
    return cfgs


def run_table1(
    *,
    trials: int = 20,
    root_seed: int = 42,
    targets: Sequence[int] = TABLE_TARGETS,
    timing: EndpointTiming | None = None,
    jobs: int = 1,
) -> list[Aggregate]:
    """Random-dynamic variant grid: V1..V4 by transfer length.

    CPU/RAM columns of the reference layout are replaced by the
    rule-evaluation and reload-count proxies; absolute values are not
    comparable across machines, only orderings are.
    """
    return [
        run_scenario(cfg, jobs=jobs)
        for cfg in table1_scenarios(
            trials=trials, root_seed=root_seed, targets=targets, timing=timing
        )
    ]


def _format_cell(value: Optional[float]) -> str:
    if value is None:
        return ""
    return repr(float(value)) if isinstance(value, float) else str(value)


def csv_rows(rows: Sequence[Aggregate]) -> list[str]:
    lines = [CSV_HEADER]
    for a in rows:
        cells = [
            a.label, _format_cell(a.f_r), _format_cell(a.r_d),
            str(a.target), str(a.trials), str(a.timeouts),
            repr(a.time_mean), repr(a.time_std),
            repr(a.normalized_mean), repr(a.normalized_std),
            repr(a.forwarded_mean), repr(a.forwarded_std),
            repr(a.total_mean), repr(a.total_std),
            repr(a.rule_evals_mean), repr(a.reloads_mean),
        ]
        lines.append(",".join(cells))
    return lines


def emit_csv(rows: Sequence[Aggregate], path: str) -> None:
    """Write aggregates as CSV with a fixed, documented column order."""
    if not rows:
        raise ValueError("refusing to write an empty aggregate table")
    lines = csv_rows(rows)
    try:
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write aggregate CSV to {path!r}: {exc}") from exc


def parse_csv(text: str) -> list[Aggregate]:
    """Inverse of ``csv_rows``: reload aggregates from CSV text."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError("unrecognized aggregate CSV header")
    rows = []
    for line in lines[1:]:
        c = line.split(",")
        rows.append(Aggregate(
            label=c[0],
            f_r=float(c[1]) if c[1] else None,
            r_d=float(c[2]) if c[2] else None,
            target=int(c[3]), trials=int(c[4]), timeouts=int(c[5]),
            time_mean=float(c[6]), time_std=float(c[7]),
            normalized_mean=float(c[8]), normalized_std=float(c[9]),
            forwarded_mean=float(c[10]), forwarded_std=float(c[11]),
            total_mean=float(c[12]), total_std=float(c[13]),
            rule_evals_mean=float(c[14]), reloads_mean=float(c[15]),
        ))
    return rows


def read_csv(path: str) -> list[Aggregate]:
    with open(path) as fh:
        return parse_csv(fh.read())


# --- flat key=value scenario files ---

SCENARIO_FILE_KEYS = (
    "label", "warden", "rr", "rd", "fr", "fr_lo", "fr_hi", "rd_lo", "rd_hi",
    "variant", "strategy", "target", "trials", "seed",
    "pacing", "burst", "probe_repeats", "probe_spacing", "probe_timeout",
    "nel_pause", "warden_latency", "nel_latency", "warden_loss", "nel_loss",
    "timeout_factor",
)


def parse_scenario_text(text: str) -> dict[str, str]:
    mapping: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"scenario file line {lineno}: expected key=value")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in SCENARIO_FILE_KEYS:
            raise ValueError(f"scenario file line {lineno}: unknown key {key!r}")
        mapping[key] = value.strip()
    return mapping


def scenario_from_mapping(mapping: dict[str, str]) -> ScenarioConfig:
    kind = mapping.get("warden", "none").lower()
    if kind == "none":
        warden: WardenConfig = NoWarden()
    elif kind == "regular":
        warden = RegularWarden(float(mapping.get("rr", "0.95")))
    elif kind == "dynamic":
        warden = DynamicWarden(
            float(mapping.get("rd", "0.4")), float(mapping.get("fr", "2"))
        )
    elif kind in ("random", "random-dynamic", "random_dynamic"):
        if "variant" in mapping:
            warden = variant_warden(mapping["variant"])
        else:
            warden = RandomDynamicWarden(
                (float(mapping.get("fr_lo", "1")), float(mapping.get("fr_hi", "35"))),
                (float(mapping.get("rd_lo", "0.2")), float(mapping.get("rd_hi", "0.4"))),
            )
    else:
        raise ValueError(f"unknown warden kind: {kind!r}")
    timing = EndpointTiming(
        probe_repeats=int(mapping.get("probe_repeats", "5")),
        probe_spacing=float(mapping.get("probe_spacing", "0.0")),
        probe_timeout=float(mapping.get("probe_timeout", "5.0")),
        nel_pause=float(mapping.get("nel_pause", "1.0")),
        com_burst=int(mapping.get("burst", "5")),
        com_pacing=float(mapping.get("pacing", "1.0")),
    )
    strategy = (
        SenderStrategy.FIXED_SINGLE_CHANNEL
        if mapping.get("strategy", "adaptive").lower().startswith("fixed")
        else SenderStrategy.ADAPTIVE_SWITCHING
    )
    return ScenarioConfig(
        label=mapping.get("label", kind),
        warden=warden,
        strategy=strategy,
        target=int(mapping.get("target", "400")),
        trials=int(mapping.get("trials", "20")),
        root_seed=int(mapping.get("seed", "42")),
        timing=timing,
        warden_link=LinkConfig(
            float(mapping.get("warden_latency", "0.01")),
            float(mapping.get("warden_loss", "0.0")),
        ),
        nel_link=LinkConfig(
            float(mapping.get("nel_latency", "0.01")),
            float(mapping.get("nel_loss", "0.0")),
        ),
        timeout_factor=float(mapping.get("timeout_factor", "10.0")),
    )

