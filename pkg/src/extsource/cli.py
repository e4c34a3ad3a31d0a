"""Command-line interface: run suites, explain recorded checks, list suites."""

import argparse
import os
import sys
from pathlib import Path

from .harness import ConfigError, explain, list_suites, load_config, run


def _default_out_dir():
    return os.environ.get("EXTSOURCE_OUT_DIR", "extsource-results")


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="extsource",
        description="Verification suites for external-source matrix models "
                    "and their series-ladder identities.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute configured suites")
    p_run.add_argument("--config", default="quick",
                       help="config file path or bundled name (quick, full)")
    p_run.add_argument("--out-dir", default=None,
                       help="output directory (default $EXTSOURCE_OUT_DIR "
                            "or ./extsource-results)")
    p_run.add_argument("--workers", type=int, default=None,
                       help="worker threads (overrides config)")
    p_run.add_argument("--seed", type=int, default=None,
                       help="seed override")
    p_run.add_argument("--mutate", action="store_true",
                       help="inject one-sided corruptions; all checks should "
                            "then fail (checker sensitivity demonstration)")

    p_exp = sub.add_parser("explain", help="describe one recorded check")
    p_exp.add_argument("check_id")
    p_exp.add_argument("--results", default=None,
                       help="results.ndjson path (default: in the output dir)")

    sub.add_parser("list-suites", help="available suites")

    args = parser.parse_args(argv)

    if args.command == "list-suites":
        for name, desc in list_suites().items():
            print(f"{name:<16} {desc}")
        return 0

    if args.command == "explain":
        results = args.results or str(Path(_default_out_dir()) / "results.ndjson")
        try:
            print(explain(results, args.check_id), end="")
        except (ConfigError, KeyError) as exc:
            msg = exc.args[0] if exc.args else exc
            print(f"error: {msg}", file=sys.stderr)
            return 2
        return 0

    try:
        cfg = load_config(args.config)
        out_dir = args.out_dir or cfg.out_dir or _default_out_dir()
        code, summary = run(cfg, out_dir, workers=args.workers,
                            seed=args.seed, mutate=args.mutate)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    print(summary, end="")
    print(f"results written to {out_dir}")
    return code


if __name__ == "__main__":
    sys.exit(main())
