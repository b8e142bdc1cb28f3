"""Command line entry point: ``renewal-kac {simulate,converge,poisson-check,report}``.

Exit codes: 0 on success, 1 when ``--assert`` (or ``poisson-check``) finds a
failed check, 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from .config import ExperimentConfig, load_config
from .distributions import Exponential, kac_constant, law_from_spec
from .errors import ConfigError, DegenerateLaw, InvalidLaw
from .experiment import ExperimentReport, run_experiment
from .kac_stroock import DEFAULT_GRID, KacProcessParams, evaluate_path
from .renewal import simulate_path
from .rng import RngStream
from .stats import SampleSet, ks_normal


def _law_arg(text: str) -> dict:
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"--law must be JSON: {exc}") from None
    if not isinstance(spec, dict):
        raise argparse.ArgumentTypeError("--law must be a JSON object")
    return spec


def _n_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--n expects integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="renewal-kac", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, n_help):
        p.add_argument("--seed", type=int, help="master seed (overrides the config)")
        p.add_argument("--law", type=_law_arg, help='inter-arrival law, e.g. \'{"kind":"gamma","shape":2,"scale":3}\'')
        p.add_argument("--n", type=_n_list, help=n_help)
        p.add_argument("--replicates", type=int)
        p.add_argument("--grid", type=int)
        p.add_argument("--out", type=Path, help="output directory (default: stdout)")

    sim = sub.add_parser("simulate", help="emit one path evaluation (t, x, w, r)")
    common(sim, "scale index")
    sim.add_argument("--format", choices=("csv", "json"), default="csv")
    sim.add_argument("--replicate", type=int, default=0, help="replicate index of the stream to use")

    conv = sub.add_parser("converge", help="run the diagnostic sweep over n values")
    common(conv, "comma separated scale indices")
    conv.add_argument("--config", type=Path, help="experiment config JSON (default: shipped config)")
    conv.add_argument("--format", choices=("csv", "json"), default="json")
    conv.add_argument("--assert", dest="assert_", action="store_true", help="exit 1 if any check fails")

    pc = sub.add_parser("poisson-check", help="exponential(1) law with C forced to 1")
    pc.add_argument("--n", type=int, default=1000)
    pc.add_argument("--replicates", type=int, default=500)
    pc.add_argument("--seed", type=int, default=42)

    rep = sub.add_parser("report", help="render a JSON report as a table")
    rep.add_argument("report", type=Path)
    return parser


def _emit(text: str, out: Path | None, name: str) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text)


def cmd_simulate(args) -> int:
    law = law_from_spec(args.law or {"kind": "exponential", "rate": 1.0})
    n = (args.n or [100])[0]
    seed = 0 if args.seed is None else args.seed
    grid = args.grid or DEFAULT_GRID
    stream = RngStream(seed).child(n).child(args.replicate)
    params = KacProcessParams.for_law(law, n)
    path = simulate_path(law, n, stream)
    ev = evaluate_path(path, params, grid, metadata={"law": law.to_spec(), "seed": seed, "stream": stream.provenance()})
    buf = io.StringIO()
    if args.format == "csv":
        ev.write_csv(buf)
    else:
        ev.write_json(buf)
    _emit(buf.getvalue(), args.out, f"path_n{n}_seed{seed}.{args.format}")
    return 0


def _converge_config(args) -> ExperimentConfig:
    base = load_config(args.config)
    data = base.to_dict()
    if args.seed is not None:
        data["seed"] = args.seed
    if args.law is not None:
        data["law"] = args.law
    if args.n is not None:
        data["n_values"] = args.n
    if args.replicates is not None:
        data["replicates"] = args.replicates
    if args.grid is not None:
        data["grid"] = args.grid
    return ExperimentConfig.from_dict(data)


def _ks_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "t", "M", "seed", "statistic", "p_value"])
    for entry in report.results:
        for ks in entry.get("ks", []) if isinstance(entry.get("ks"), list) else []:
            writer.writerow([ks["n"], ks["t"], ks["M"], ks["seed"], f"{ks['statistic']:.17g}", f"{ks['p_value']:.17g}"])
    return buf.getvalue()


def cmd_converge(args) -> int:
    config = _converge_config(args)
    report = run_experiment(config)
    out = args.out or (Path(config.output["dir"]) if config.output.get("dir") else None)
    if args.format == "json":
        _emit(report.render(), out, config.output.get("report", "report.json"))
    else:
        _emit(_ks_csv(report), out, "ks.csv")
    if args.assert_:
        for a in report.assertions:
            if not a["passed"]:
                print(f"FAIL n={a['n']} {a['name']}: {a['detail']}", file=sys.stderr)
        return 0 if report.passed else 1
    return 0


def cmd_poisson_check(args) -> int:
    law = Exponential(1.0)
    derived = kac_constant(law)
    forced = 1.0
    params = KacProcessParams(args.n, forced)
    base = RngStream(args.seed).child(args.n)
    ends = []
    for r in range(args.replicates):
        path = simulate_path(law, args.n, base.child(r))
        ends.append(evaluate_path(path, params, 1).x_values[-1])
    ks = ks_normal(SampleSet(ends, f"X_n(1), n={args.n}"))
    summary = {
        "law": law.to_spec(),
        "kac_constant": derived,
        "forced_C": forced,
        "constants_match": derived == forced,
        "ks": {**ks.to_dict(), "n": args.n, "seed": args.seed},
    }
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0 if derived == forced else 1


def render_table(report: ExperimentReport) -> str:
    lines = [f"renewal_kac {report.toolkit_version}  law={json.dumps(report.config['law'])}  seed={report.config['seed']}"]
    hyp = report.hypotheses
    lines.append(f"hypotheses: {'ok' if hyp['within_hypotheses'] else hyp.get('flag')}  {hyp['moment_certificate']}")
    lines.append(f"{'n':>8} {'M':>6} {'check':<28} {'result':<6} detail")
    for a in report.assertions:
        entry = next(e for e in report.results if e["n"] == a["n"])
        lines.append(f"{a['n']:>8} {entry['M']:>6} {a['name']:<28} {'pass' if a['passed'] else 'FAIL':<6} {a['detail']}")
    lines.append(f"wall clock: {report.wall_clock_seconds:.2f} s")
    return "\n".join(lines) + "\n"


def cmd_report(args) -> int:
    try:
        report = ExperimentReport.parse(args.report.read_text())
    except (OSError, json.JSONDecodeError, TypeError) as exc:
        raise ConfigError(f"cannot read report {args.report}: {exc}") from exc
    sys.stdout.write(render_table(report))
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "converge": cmd_converge,
    "poisson-check": cmd_poisson_check,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, InvalidLaw, DegenerateLaw, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
