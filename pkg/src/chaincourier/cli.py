"""Command-line harness: serve, run, verify, metrics."""

from __future__ import annotations

import argparse
import sys

from .metrics import write_metrics_files
from .replay import verify_file
from .scenario import ParseError, Scenario, ValidationError, load_scenario
from .session import Session
from .sim import score


def _load(path: str) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return load_scenario(fh.read())
    except OSError as exc:
        sys.exit(f"cannot read scenario: {exc}")
    except (ParseError, ValidationError) as exc:
        sys.exit(f"invalid scenario: {exc}")


def _expand_bots(specs: list[str]) -> list[str]:
    policies = []
    for spec in specs:
        name, _, count = spec.partition(":")
        try:
            n = int(count) if count else 1
        except ValueError:
            sys.exit(f"bad bot spec {spec!r}; expected policy or policy:count")
        policies.extend([name] * n)
    return policies


def cmd_run(args) -> None:
    scenario = _load(args.scenario)
    bots = _expand_bots(args.bots)
    try:
        with open(args.out, "w", encoding="utf-8") as out:
            session = Session(
                scenario, max_ticks=args.ticks, out=out, seed=args.seed, bots=bots
            )
            state = session.run()
    except RuntimeError as exc:
        sys.exit(str(exc))
    report = score(state)
    print(f"ran {state.tick} ticks, chain length {len(state.chain)}, replay: {args.out}")
    for row in report.per_node:
        print(
            f"  node {row.node_id} {row.character} ({row.role}): "
            f"{row.points} pts, {row.blocks_created_validated} created, {row.blocks_mined} mined"
        )
    if args.metrics:
        with open(args.out, "r", encoding="utf-8") as fh:
            write_metrics_files(fh, args.metrics)
        print(f"metrics: {args.metrics}")


def cmd_serve(args) -> None:
    from .server import PortUnavailable, serve_session

    scenario = _load(args.scenario)
    bots = _expand_bots(args.bots)
    out = open(args.out, "w", encoding="utf-8") if args.out else None
    try:
        session = Session(
            scenario, max_ticks=args.ticks, out=out, seed=args.seed, bots=bots
        )
        print(f"serving on ws://{args.host}:{args.port} (catalog: "
              f"{', '.join(p.name for p in scenario.catalog)})", flush=True)
        serve_session(session, args.host, args.port)
    except PortUnavailable as exc:
        sys.exit(str(exc))
    except RuntimeError as exc:
        sys.exit(str(exc))
    finally:
        if out:
            out.close()


def cmd_verify(args) -> None:
    try:
        result = verify_file(args.log)
    except OSError as exc:
        sys.exit(f"cannot read log: {exc}")
    except Exception as exc:
        sys.exit(f"malformed log: {exc}")
    if result.ok:
        print("PASS: replay verified")
    else:
        where = f" at tick {result.divergent_tick}" if result.divergent_tick is not None else ""
        print(f"FAIL{where}: {result.message}")
        sys.exit(1)


def cmd_metrics(args) -> None:
    try:
        with open(args.log, "r", encoding="utf-8") as fh:
            report = write_metrics_files(fh, args.out)
    except OSError as exc:
        sys.exit(f"cannot read log: {exc}")
    except Exception as exc:
        sys.exit(f"malformed log: {exc}")
    print(
        f"wrote {args.out} ({len(report.scores.per_node)} nodes, "
        f"{report.validated_per_minute:.3g} validated/min)"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chaincourier",
        description="Deterministic blockchain-over-wireless game simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run a live session over WebSocket")
    serve.add_argument("--scenario", required=True)
    serve.add_argument("--port", type=int, required=True)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--bots", action="append", default=[], metavar="POLICY[:COUNT]")
    serve.add_argument("--seed", type=int, default=None)
    serve.add_argument("--ticks", type=int, default=6000)
    serve.add_argument("--out", default=None, help="optional replay log path")
    serve.set_defaults(func=cmd_serve)

    run = sub.add_parser("run", help="headless turbo run with bots")
    run.add_argument("--scenario", required=True)
    run.add_argument("--ticks", type=int, required=True)
    run.add_argument("--bots", action="append", default=[], metavar="POLICY[:COUNT]")
    run.add_argument("--out", required=True, help="replay log path (ndjson)")
    run.add_argument("--metrics", default=None, help="also write metrics CSV here")
    run.add_argument("--seed", type=int, default=None)
    run.set_defaults(func=cmd_run)

    verify = sub.add_parser("verify", help="re-simulate a replay log and compare")
    verify.add_argument("--log", required=True)
    verify.set_defaults(func=cmd_verify)

    metrics = sub.add_parser("metrics", help="derive score CSVs from a replay log")
    metrics.add_argument("--log", required=True)
    metrics.add_argument("--out", required=True)
    metrics.set_defaults(func=cmd_metrics)

    return parser


def main(argv=None) -> None:
    args = build_parser().parse_args(argv)
    args.func(args)


if __name__ == "__main__":
    main()
