"""Command-line front end.

Subcommands:

* ``channels list``  -- print the covert-channel catalog as CSV
* ``trial``          -- run one seeded trial, print one result row
* ``sweep``          -- reload-interval sweep for a dynamic warden
* ``table1``         -- random-dynamic variant grid (V1..V4 x lengths)
* ``accept``         -- run the acceptance suite, one line per criterion
* ``report``         -- emit per-figure plot data CSVs and PNG figures

Exit codes: 0 success, 1 usage error, 2 when trial timeouts dominate a
run (>50% of trials), 3 when acceptance criteria fail.

Data rows contain no timestamps or locale-dependent formatting, so output
for a fixed command line and seed is byte-identical across runs.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, Sequence

from . import accept as accept_mod
from . import channels, report
from .endpoints import EndpointTiming, SenderStrategy
from .experiments import (
    DEFAULT_FR_SWEEP,
    ScenarioConfig,
    csv_rows,
    dynamic_scenario,
    emit_csv,
    parse_scenario_text,
    run_scenario,
    run_table1,
    scenario_from_mapping,
)
from .simkernel import LinkConfig, Simulation, TrialTimeout, trace_csv_lines
from .warden import (
    DynamicWarden,
    NoWarden,
    RandomDynamicWarden,
    RegularWarden,
    reload_log_csv_lines,
    variant_warden,
)

TRIAL_HEADER = (
    "seed,status,completion_time,normalized,forwarded,total,"
    "rule_evaluations,reload_count,received,com_sent,probes_sent"
)


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kw):
        kw.setdefault("formatter_class", argparse.ArgumentDefaultsHelpFormatter)
        super().__init__(*args, **kw)

    # usage problems exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _out_path(path: Optional[str]) -> Optional[str]:
    """Resolve relative output paths against $WARDENSIM_OUTDIR if set."""
    if path is None:
        return None
    base = os.environ.get("WARDENSIM_OUTDIR")
    if base and not os.path.isabs(path):
        os.makedirs(base, exist_ok=True)
        return os.path.join(base, path)
    return path


def _write_or_print(lines: list[str], path: Optional[str]) -> None:
    text = "\n".join(lines) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_timing_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--pacing", type=float, default=1.0,
                   help="gap between covert payload packets [s]")
    p.add_argument("--burst", type=int, default=5,
                   help="payload packets per channel hop")
    p.add_argument("--probe-repeats", type=int, default=5,
                   help="probe copies per announcement")
    p.add_argument("--probe-spacing", type=float, default=0.0,
                   help="gap between probe copies [s]")
    p.add_argument("--probe-timeout", type=float, default=5.0,
                   help="receiver verdict window [s]")
    p.add_argument("--nel-pause", type=float, default=1.0,
                   help="sender pause after each probe burst [s]")
    p.add_argument("--latency", type=float, default=0.01,
                   help="one-way latency of both links [s]")
    p.add_argument("--loss", type=float, default=0.0,
                   help="loss probability of both links")
    p.add_argument("--timeout-factor", type=float, default=10.0,
                   help="trial cap as a multiple of the ideal transfer time")


def _timing_from_args(args) -> EndpointTiming:
    return EndpointTiming(
        probe_repeats=args.probe_repeats,
        probe_spacing=args.probe_spacing,
        probe_timeout=args.probe_timeout,
        nel_pause=args.nel_pause,
        com_burst=args.burst,
        com_pacing=args.pacing,
    )


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wardensim")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_channels = sub.add_parser("channels", help="covert channel catalog")
    ch_sub = p_channels.add_subparsers(dest="channels_command", required=True)
    p_list = ch_sub.add_parser("list", help="print the catalog as CSV")
    p_list.add_argument("--out", help="write CSV here instead of stdout")

    p_trial = sub.add_parser("trial", help="run a single seeded trial")
    p_trial.add_argument("--scenario", help="flat key=value scenario file")
    p_trial.add_argument("--warden", default="none",
                         choices=["none", "regular", "dynamic", "random-dynamic"])
    p_trial.add_argument("--rr", type=float, default=0.95,
                         help="regular warden: fraction of rules kept active")
    p_trial.add_argument("--rd", type=float, default=0.4,
                         help="dynamic warden: fraction of rules per interval")
    p_trial.add_argument("--fr", type=float, default=2.0,
                         help="dynamic warden: reload interval [s]")
    p_trial.add_argument("--variant", choices=["V1", "V2", "V3", "V4"],
                         help="random-dynamic preset")
    p_trial.add_argument("--fr-range", type=_float_list, default=[1.0, 35.0],
                         metavar="LO,HI", help="random-dynamic interval range")
    p_trial.add_argument("--rd-range", type=_float_list, default=[0.2, 0.4],
                         metavar="LO,HI", help="random-dynamic fraction range")
    p_trial.add_argument("--strategy", choices=["adaptive", "fixed"],
                         default="adaptive")
    p_trial.add_argument("--target", type=int, default=400)
    p_trial.add_argument("--seed", type=int, default=1)
    _add_timing_flags(p_trial)
    p_trial.add_argument("--out", help="write the result row here")
    p_trial.add_argument("--trace", help="write a time,actor,event,detail CSV here")
    p_trial.add_argument("--reload-log",
                         help="write the warden reload history CSV here")

    p_sweep = sub.add_parser("sweep", help="reload-interval sweep (dynamic warden)")
    p_sweep.add_argument("--rd", type=float, default=0.4)
    p_sweep.add_argument("--fr", type=_float_list,
                         default=list(DEFAULT_FR_SWEEP), metavar="F1,F2,...")
    p_sweep.add_argument("--target", type=int, default=400)
    p_sweep.add_argument("--trials", type=int, default=20)
    p_sweep.add_argument("--seed", type=int, default=42)
    p_sweep.add_argument("--jobs", type=int, default=1)
    _add_timing_flags(p_sweep)
    p_sweep.add_argument("--out", help="write the aggregate CSV here")

    p_table = sub.add_parser("table1", help="random-dynamic variant grid")
    p_table.add_argument("--trials", type=int, default=20)
    p_table.add_argument("--seed", type=int, default=42)
    p_table.add_argument("--targets", type=_int_list, default=[400, 200, 100],
                         metavar="N1,N2,...")
    p_table.add_argument("--jobs", type=int, default=1)
    _add_timing_flags(p_table)
    p_table.add_argument("--out", help="write the aggregate CSV here")

    p_accept = sub.add_parser("accept", help="run the acceptance suite")
    p_accept.add_argument("--suite", default="primary", choices=["primary"])
    p_accept.add_argument("--seed", type=int, default=42)
    p_accept.add_argument("--trials", type=int, default=20)
    p_accept.add_argument("--jobs", type=int, default=1)
    p_accept.add_argument("--out", help="also write the report lines here")

    p_report = sub.add_parser("report", help="figure plot data + PNG renderings")
    p_report.add_argument("--outdir", default=None,
                          help="output directory (default $WARDENSIM_OUTDIR or .)")
    p_report.add_argument("--trials", type=int, default=20)
    p_report.add_argument("--seed", type=int, default=42)
    p_report.add_argument("--fr", type=_float_list,
                          default=list(DEFAULT_FR_SWEEP), metavar="F1,F2,...")
    p_report.add_argument("--jobs", type=int, default=1)
    p_report.add_argument("--no-figures", action="store_true",
                          help="emit plot data only")
    return parser


def _warden_from_args(args):
    if args.warden == "none":
        return NoWarden()
    if args.warden == "regular":
        return RegularWarden(args.rr)
    if args.warden == "dynamic":
        return DynamicWarden(args.rd, args.fr)
    if args.variant:
        return variant_warden(args.variant)
    if len(args.fr_range) != 2 or len(args.rd_range) != 2:
        raise SystemExit("--fr-range and --rd-range take exactly LO,HI")
    return RandomDynamicWarden(tuple(args.fr_range), tuple(args.rd_range))


def _trial_scenario(args) -> ScenarioConfig:
    if args.scenario:
        with open(args.scenario) as fh:
            return scenario_from_mapping(parse_scenario_text(fh.read()))
    strategy = (SenderStrategy.FIXED_SINGLE_CHANNEL if args.strategy == "fixed"
                else SenderStrategy.ADAPTIVE_SWITCHING)
    link = LinkConfig(args.latency, args.loss)
    return ScenarioConfig(
        label=args.warden,
        warden=_warden_from_args(args),
        strategy=strategy,
        target=args.target,
        trials=1,
        root_seed=args.seed,
        timing=_timing_from_args(args),
        warden_link=link,
        nel_link=link,
        timeout_factor=args.timeout_factor,
    )


def cmd_channels_list(args) -> int:
    _write_or_print(channels.catalog_csv_lines(), _out_path(args.out))
    return 0


def cmd_trial(args) -> int:
    scenario = _trial_scenario(args)
    sim = Simulation(scenario, args.seed, collect_trace=bool(args.trace))
    status = 0
    try:
        result = sim.run()
        row = (
            f"{args.seed},ok,{result.completion_time!r},{result.normalized},"
            f"{result.forwarded},{result.total_packets},{result.rule_evaluations},"
            f"{result.reload_count},{result.received},{result.com_packets_sent},"
            f"{result.probe_packets_sent}"
        )
    except TrialTimeout as exc:
        row = f"{args.seed},timeout,{exc.cap!r},,,,,,,,"
        status = 2
    _write_or_print([TRIAL_HEADER, row], _out_path(args.out))
    if args.trace and sim.trace_rows is not None:
        _write_or_print(trace_csv_lines(sim.trace_rows), _out_path(args.trace))
    if args.reload_log:
        _write_or_print(reload_log_csv_lines(sim.warden), _out_path(args.reload_log))
    return status


def cmd_sweep(args) -> int:
    rows = []
    for fr in args.fr:
        cfg = dynamic_scenario(
            args.rd, float(fr), target=args.target, trials=args.trials,
            root_seed=args.seed, timing=_timing_from_args(args),
        )
        rows.append(run_scenario(cfg, jobs=args.jobs))
    out = _out_path(args.out)
    if out:
        emit_csv(rows, out)
    else:
        _write_or_print(csv_rows(rows), None)
    return 2 if any(r.timeouts * 2 > r.trials for r in rows) else 0


def cmd_table1(args) -> int:
    rows = run_table1(
        trials=args.trials, root_seed=args.seed, targets=args.targets,
        timing=_timing_from_args(args), jobs=args.jobs,
    )
    out = _out_path(args.out)
    if out:
        emit_csv(rows, out)
    else:
        _write_or_print(csv_rows(rows), None)
    return 2 if any(r.timeouts * 2 > r.trials for r in rows) else 0


def cmd_accept(args) -> int:
    results = accept_mod.run_acceptance(
        root_seed=args.seed, trials=args.trials, jobs=args.jobs,
    )
    lines = [r.line() for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} criteria passed")
    _write_or_print(lines, None)
    if args.out:
        _write_or_print(lines, _out_path(args.out))
    return 0 if passed == len(results) else 3


def cmd_report(args) -> int:
    outdir = args.outdir or os.environ.get("WARDENSIM_OUTDIR") or "."
    artifacts = report.write_report(
        outdir, trials=args.trials, root_seed=args.seed,
        fr_values=args.fr, jobs=args.jobs, figures=not args.no_figures,
    )
    for name in sorted(artifacts):
        sys.stdout.write(f"{name}: {artifacts[name]}\n")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "channels":
        return cmd_channels_list(args)
    if args.command == "trial":
        return cmd_trial(args)
    if args.command == "sweep":
        return cmd_sweep(args)
    if args.command == "table1":
        return cmd_table1(args)
    if args.command == "accept":
        return cmd_accept(args)
    if args.command == "report":
        return cmd_report(args)
    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
