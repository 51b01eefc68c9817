"""Report generation: per-figure CSV tables plus rendered PNG figures.

``write_report`` produces a ``plotdata/`` directory with one CSV per
figure (fig4.csv .. fig12.csv, table1.csv) and, unless disabled, a
``figures/`` directory with the matching matplotlib renderings.

Figures 4-8 show warden effectiveness and cost against the reload
interval for the regular warden, the no-warden baseline and dynamic
wardens with 20/30/40% active rules. Figures 9-12 repeat the dynamic
40% scenario for 100/200/400-packet transfers. The table collects the
four random-dynamic variants.
"""

from __future__ import annotations

import os
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .endpoints import EndpointTiming
from .experiments import (
    Aggregate,
    DEFAULT_FR_SWEEP,
    ScenarioConfig,
    dynamic_scenario,
    emit_csv,
    run_scenario,
    run_table1,
)
from .warden import NoWarden, RegularWarden

EFFECTIVENESS_FIGS = ("fig4", "fig5", "fig6", "fig7", "fig8")
LENGTH_FIGS = ("fig9", "fig10", "fig11", "fig12")

_METRIC_BY_FIG = {
    "fig4": ("time_mean", "completion time [s]"),
    "fig5": ("normalized_mean", "normalized packets"),
    "fig6": ("forwarded_mean", "forwarded packets"),
    "fig7": ("total_mean", "total packets"),
    "fig9": ("time_mean", "completion time [s]"),
    "fig10": ("normalized_mean", "normalized packets"),
    "fig11": ("forwarded_mean", "forwarded packets"),
    "fig12": ("total_mean", "total packets"),
}


def effectiveness_rows(
    *,
    trials: int = 20,
    root_seed: int = 42,
    fr_values: Sequence[float] = DEFAULT_FR_SWEEP,
    timing: Optional[EndpointTiming] = None,
    jobs: int = 1,
) -> list[Aggregate]:
    timing = timing or EndpointTiming()
    rows = [
        run_scenario(ScenarioConfig(
            label="none", warden=NoWarden(), trials=trials,
            root_seed=root_seed, timing=timing,
        ), jobs=jobs),
        run_scenario(ScenarioConfig(
            label="regular95", warden=RegularWarden(0.95), trials=trials,
            root_seed=root_seed, timing=timing,
        ), jobs=jobs),
    ]
    for rd in (0.2, 0.3, 0.4):
        for fr in fr_values:
            rows.append(run_scenario(dynamic_scenario(
                rd, float(fr), trials=trials, root_seed=root_seed, timing=timing,
            ), jobs=jobs))
    return rows


def length_rows(
    *,
    trials: int = 20,
    root_seed: int = 42,
    fr_values: Sequence[float] = DEFAULT_FR_SWEEP,
    targets: Sequence[int] = (100, 200, 400),
    timing: Optional[EndpointTiming] = None,
    jobs: int = 1,
) -> list[Aggregate]:
    timing = timing or EndpointTiming()
    rows = []
    for target in targets:
        for fr in fr_values:
            rows.append(run_scenario(dynamic_scenario(
                0.4, float(fr), target=target, trials=trials,
                root_seed=root_seed, timing=timing,
            ), jobs=jobs))
    return rows


def _render_effectiveness(rows: list[Aggregate], fig: str, path: str) -> None:
    if fig == "fig8":
        # shuffle work falls with the interval; per-packet rule work is flat
        _, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
        for rd in (0.2, 0.3, 0.4):
            series = [r for r in rows if r.r_d == rd]
            series.sort(key=lambda r: r.f_r)
            xs = [r.f_r for r in series]
            ax1.plot(xs, [r.reloads_mean for r in series],
                     marker="o", label=f"dynamic {int(rd * 100)}%")
            ax2.plot(xs, [r.rule_evals_mean / r.total_mean for r in series],
                     marker="o", label=f"dynamic {int(rd * 100)}%")
        reg = [r for r in rows if r.label == "regular95"]
        if reg:
            ax2.axhline(reg[0].rule_evals_mean / reg[0].total_mean,
                        linestyle="--", color="gray", label="regular95")
        ax1.set_xlabel("reload interval [s]")
        ax1.set_ylabel("ruleset reloads per trial")
        ax2.set_xlabel("reload interval [s]")
        ax2.set_ylabel("rule evaluations per packet")
        ax1.legend(fontsize=8)
        ax2.legend(fontsize=8)
        ax1.set_title("cost proxies vs reload interval")
        plt.tight_layout()
        plt.savefig(path, dpi=120)
        plt.close()
        return
    metric, ylabel = _METRIC_BY_FIG[fig]
    plt.figure(figsize=(7, 4.5))
    for rd in (0.2, 0.3, 0.4):
        series = [r for r in rows if r.r_d == rd]
        series.sort(key=lambda r: r.f_r)
        plt.plot([r.f_r for r in series],
                 [getattr(r, metric) for r in series],
                 marker="o", label=f"dynamic {int(rd * 100)}%")
    for label, style in (("regular95", "--"), ("none", ":")):
        ref = [r for r in rows if r.label == label]
        if ref:
            plt.axhline(getattr(ref[0], metric), linestyle=style,
                        color="gray", label=label)
    plt.xlabel("reload interval [s]")
    plt.ylabel(ylabel)
    plt.legend(fontsize=8)
    plt.title(f"{ylabel} vs reload interval (400 packets)")
    plt.tight_layout()
    plt.savefig(path, dpi=120)
    plt.close()


def _render_length(rows: list[Aggregate], fig: str, path: str) -> None:
    metric, ylabel = _METRIC_BY_FIG[fig]
    plt.figure(figsize=(7, 4.5))
    for target in sorted({r.target for r in rows}):
        series = [r for r in rows if r.target == target]
        series.sort(key=lambda r: r.f_r)
        plt.plot([r.f_r for r in series],
                 [getattr(r, metric) for r in series],
                 marker="o", label=f"{target} packets")
    plt.xlabel("reload interval [s]")
    plt.ylabel(ylabel)
    plt.legend(fontsize=8)
    plt.title(f"{ylabel} vs reload interval (dynamic 40%)")
    plt.tight_layout()
    plt.savefig(path, dpi=120)
    plt.close()


def write_report(
    outdir: str,
    *,
    trials: int = 20,
    root_seed: int = 42,
    fr_values: Sequence[float] = DEFAULT_FR_SWEEP,
    timing: Optional[EndpointTiming] = None,
    jobs: int = 1,
    figures: bool = True,
) -> dict[str, str]:
    """Generate plot data and figures; returns {artifact: path}."""
    plotdir = os.path.join(outdir, "plotdata")
    os.makedirs(plotdir, exist_ok=True)
    artifacts: dict[str, str] = {}

    eff = effectiveness_rows(trials=trials, root_seed=root_seed,
                             fr_values=fr_values, timing=timing, jobs=jobs)
    for fig in EFFECTIVENESS_FIGS:
        path = os.path.join(plotdir, f"{fig}.csv")
        emit_csv(eff, path)
        artifacts[f"{fig}.csv"] = path

    length = length_rows(trials=trials, root_seed=root_seed,
                         fr_values=fr_values, timing=timing, jobs=jobs)
    for fig in LENGTH_FIGS:
        path = os.path.join(plotdir, f"{fig}.csv")
        emit_csv(length, path)
        artifacts[f"{fig}.csv"] = path

    table = run_table1(trials=trials, root_seed=root_seed, timing=timing, jobs=jobs)
    table_path = os.path.join(plotdir, "table1.csv")
    emit_csv(table, table_path)
    artifacts["table1.csv"] = table_path

    if figures:
        figdir = os.path.join(outdir, "figures")
        os.makedirs(figdir, exist_ok=True)
        for fig in EFFECTIVENESS_FIGS:
            path = os.path.join(figdir, f"{fig}.png")
            _render_effectiveness(eff, fig, path)
            artifacts[f"{fig}.png"] = path
        for fig in LENGTH_FIGS:
            path = os.path.join(figdir, f"{fig}.png")
            _render_length(length, fig, path)
            artifacts[f"{fig}.png"] = path
    return artifacts
