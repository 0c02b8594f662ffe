"""Command-line workflow: ingest, fit, elicit, forecast, backtest, serve.

Every failure path prints a single machine-parseable JSON line to stderr
(`{"error": "<module/code>", "message": "..."}`) and exits nonzero.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import yaml

from . import elicitation, forecast as fc, pipeline, synthetic
from .config import JobConfig, parse_horizons
from .errors import ConfigError, EngineError
from .market import COV_WA, Horizon, covariate_names, ingest

PROG = "cfdcast"


def _add_data_arg(parser):
    parser.add_argument("--data", help="data directory (or set $CFDCAST_DATA)")


def _load_panel(args):
    return ingest(JobConfig.resolve_data_dir(getattr(args, "data", None)))


def _horizon(value: str) -> Horizon:
    try:
        return Horizon(value)
    except ValueError:
        raise ConfigError(f"unknown horizon {value!r} (valid: {', '.join(h.value for h in Horizon)})")


# --- subcommands -----------------------------------------------------------

def cmd_ingest(args) -> int:
    panel = _load_panel(args)
    out = Path(args.out)
    panel.export(out)
    with open(out / "diagnostics.txt", "w") as fh:
        for diag in panel.diagnostics:
            fh.write(f"{diag}\n")
    print(json.dumps(panel.summary(), indent=2))
    return 0


def cmd_fit(args) -> int:
    panel = _load_panel(args)
    horizons = parse_horizons(args.horizon) if args.horizon else None
    fits, skipped = pipeline.fit_all(panel, horizons, drop_stale=args.drop_stale)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    records = [fits[key].to_record() for key in sorted(fits)]
    (out / "posteriors.json").write_text(json.dumps(records, indent=2))
    tables = pipeline.render_tables(panel, fits, horizons)
    (out / "coefficients.csv").write_text(tables)
    if skipped:
        with open(out / "fit_skipped.txt", "w") as fh:
            for key, reason in skipped:
                fh.write(f"{'/'.join(key)}: {reason}\n")
    print(tables, end="")
    return 0


def _transcript_from_answers(doc: dict, target: str, observed_order) -> elicitation.SessionTranscript:
    return elicitation.SessionTranscript(
        target=target,
        observed_order=tuple(doc.get("observed_order", observed_order)),
        similarity={cov: {a: float(v) for a, v in row.items()}
                    for cov, row in doc["similarity"].items()},
        months={cov: float(v) for cov, v in doc["months"].items()},
    )


def _transcript_interactive(panel, target: str) -> elicitation.SessionTranscript:
    observed = panel.observed_areas()
    similarity: dict[str, dict[str, float]] = {}
    months: dict[str, float] = {}
    print(f"Elicitation for {target}. Scores are free-scale nonnegative numbers;")
    print("they are rescaled to shares per covariate row.\n")
    for cov in covariate_names(panel.areas[target]):
        similarity[cov] = {}
        for code in observed:
            if cov == COV_WA and not panel.areas[code].has_hydro:
                continue  # structurally zero, never asked
            print(elicitation.similarity_question(target, cov, code))
            similarity[cov][code] = float(input(f"  {cov} ~ {code}: "))
        print(elicitation.months_question(cov))
        months[cov] = float(input(f"  months for {cov}: "))
    return elicitation.SessionTranscript(
        target=target, observed_order=observed, similarity=similarity, months=months
    )


def cmd_elicit(args) -> int:
    panel = _load_panel(args)
    if args.answers:
        doc = yaml.safe_load(Path(args.answers).read_text())
        transcript = _transcript_from_answers(doc, args.target, panel.observed_areas())
    else:
        transcript = _transcript_interactive(panel, args.target)
    profile = elicitation.elicit_session(transcript, panel.areas)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{profile.target}.yaml"
    elicitation.save_profile(profile, path)
    print(f"stored profile: {path}")
    print(yaml.safe_dump(profile.canonical_dict(), sort_keys=True), end="")
    return 0


def _load_profile_for(args, panel):
    if args.profile:
        return elicitation.load_profile(args.profile, panel.areas)
    profiles = Path(args.profiles)
    path = profiles / f"{args.target}.yaml"
    if not path.exists():
        raise ConfigError(f"no stored profile for {args.target} under {profiles}")
    return elicitation.load_profile(path, panel.areas)


def _run_forecast(args, panel):
    horizon = _horizon(args.horizon)
    profile = _load_profile_for(args, panel)
    fits, _ = pipeline.fit_all(panel, (horizon,), drop_stale=args.drop_stale)
    by_epoch = pipeline.posteriors_by_epoch(fits, horizon)
    return fc.forecast_timeline(
        panel, by_epoch, profile, horizon, args.n, args.seed,
        tuple(args.levels), days_per_month=args.days_per_month,
        noise=args.noise, workers=args.workers,
    )


def cmd_forecast(args) -> int:
    panel = _load_panel(args)
    result = _run_forecast(args, panel)
    result.to_csv(args.out)
    meta = {"target": result.target, "horizon": result.horizon.value,
            "provenance": result.provenance.to_dict()}
    print(json.dumps(meta, indent=2))
    return 0


def cmd_backtest(args) -> int:
    panel = _load_panel(args)
    horizon = _horizon(args.horizon)
    if args.area:
        records = fc.backtest(panel, horizon, area=args.area)
    else:
        if not args.target:
            raise ConfigError("pass --area for observed quotes or --target for predicted ones")
        result = _run_forecast(args, panel)
        records = fc.backtest(panel, horizon, forecast=result)
    fc.backtest_to_csv(records, args.out)
    print(f"wrote {len(records)} backtest records to {args.out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    config = JobConfig(
        data_dir=JobConfig.resolve_data_dir(args.data),
        profiles_dir=Path(args.profiles),
        n_draws=args.n,
        seed=args.seed,
        drop_stale=args.drop_stale,
        workers=args.workers,
        port=args.port,
    )
    uvicorn.run(create_app(config, ui_dir=args.ui), host=args.host, port=args.port)
    return 0


def cmd_demo_data(args) -> int:
    truth = synthetic.generate_market(
        args.out, seed=args.seed, n_days=args.days,
        horizons=parse_horizons(args.horizon) if args.horizon else (Horizon.M1,),
        redefinitions=tuple(args.redefinition or ()),
    )
    print(json.dumps({"out": str(args.out), "target": truth["target"],
                      "horizons": truth["horizons"]}, indent=2))
    return 0


# --- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="Probabilistic CfD price engine for non-traded electricity price areas",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build a panel and persist its canonical export")
    _add_data_arg(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("fit", help="fit per-area posteriors and write coefficient tables")
    _add_data_arg(p)
    p.add_argument("--out", required=True)
    p.add_argument("--horizon", action="append", help="restrict to a horizon (repeatable)")
    p.add_argument("--drop-stale", action="store_true")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("elicit", help="run a guided elicitation session and store the profile")
    _add_data_arg(p)
    p.add_argument("--target", required=True)
    p.add_argument("--out", required=True, help="profiles directory")
    p.add_argument("--answers", help="YAML transcript instead of an interactive session")
    p.set_defaults(func=cmd_elicit)

    def forecast_args(p):
        _add_data_arg(p)
        p.add_argument("--target", help="non-traded area to predict")
        p.add_argument("--horizon", required=True)
        p.add_argument("--profiles", help="profiles directory")
        p.add_argument("--profile", help="explicit profile file (overrides --profiles)")
        p.add_argument("--n", type=int, default=10_000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--levels", type=float, nargs="+", default=list(fc.DEFAULT_LEVELS))
        p.add_argument("--days-per-month", type=float, default=21.0)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--noise", action="store_true")
        p.add_argument("--drop-stale", action="store_true")

    p = sub.add_parser("forecast", help="Monte Carlo CfD band for a non-traded area")
    forecast_args(p)
    p.add_argument("--out", required=True, help="output CSV")
    p.set_defaults(func=cmd_forecast)

    p = sub.add_parser("backtest", help="CfD+FW versus realised average area spot")
    forecast_args(p)
    p.add_argument("--area", help="observed area (uses recorded quotes)")
    p.add_argument("--out", required=True, help="output CSV")
    p.set_defaults(func=cmd_backtest)

    p = sub.add_parser("serve", help="start the HTTP service")
    _add_data_arg(p)
    p.add_argument("--profiles", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--ui", help="directory with the built frontend, served at /ui")
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--drop-stale", action="store_true")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("demo-data", help="write a synthetic market fixture")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=20090101)
    p.add_argument("--days", type=int, default=730)
    p.add_argument("--horizon", action="append")
    p.add_argument("--redefinition", action="append", help="ISO date (repeatable)")
    p.set_defaults(func=cmd_demo_data)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EngineError as exc:
        print(json.dumps({"error": exc.code, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
