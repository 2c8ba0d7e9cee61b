"""Command-line entry point.

A thin dispatcher: every subcommand resolves the config, then either
runs the matching harness stage in-process (default) or forwards the
request to a running service instance (--server). Thread caps are
exported before numpy is imported, so --threads 1 gives bit-reproducible
runs.

On failure a machine-readable JSON error is printed to stderr and the
exit code is nonzero.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

STAGES = ("gen-data", "train", "attack", "evaluate", "ablate")
_THREAD_VARS = ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS",
                "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS")


def _set_threads(n: int) -> None:
    # Must run before numpy's first import anywhere in the process.
    for var in _THREAD_VARS:
        os.environ[var] = str(n)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="invlab",
        description="Feature-space model-inversion laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    def stage_parser(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default=None,
                       help="experiment config JSON (defaults when omitted)")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="master seed override")
        p.add_argument("--threads", type=int, default=1,
                       help="numeric thread cap (1 = reproducible)")
        p.add_argument("--server", default=None,
                       help="base URL of a running service; when set, the "
                            "stage executes remotely")
        return p

    stage_parser("gen-data", "render the private and public corpora")
    train = stage_parser("train", "train classifiers and the generative prior")
    train.add_argument("--which", nargs="+", default=None,
                       choices=["target", "eval", "indep", "prior"],
                       help="subset of models to train")
    stage_parser("attack", "run the configured attack methods")
    stage_parser("evaluate", "score reconstructions and emit the report")
    ablate = stage_parser("ablate", "sweep one attack axis")
    ablate.add_argument("--axis", required=True,
                        choices=["L", "radii", "decomposition"])

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8321)
    serve.add_argument("--threads", type=int, default=1)
    return parser


def _fail(payload: dict) -> int:
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    return 1


def _run_remote(args) -> int:
    import httpx

    body = {"out_dir": args.out}
    if args.config is not None:
        with open(args.config) as fh:
            body["config"] = json.load(fh)
    if args.seed is not None:
        body["seed"] = args.seed
    if args.command == "train" and args.which:
        body["which"] = args.which
    if args.command == "ablate":
        body["axis"] = args.axis
    url = args.server.rstrip("/") + "/" + args.command
    try:
        resp = httpx.post(url, json=body, timeout=None)
    except httpx.HTTPError as e:
        return _fail({"error": "connection-failed", "message": str(e)})
    if resp.status_code != 200:
        try:
            return _fail(resp.json())
        except ValueError:
            return _fail({"error": "http-error", "message": resp.text,
                          "details": {"status": resp.status_code}})
    print(json.dumps(resp.json(), sort_keys=True))
    return 0


def _run_local(args) -> int:
    from .harness import (HarnessError, load_config, run_ablate,
                          run_attack_stage, run_evaluate, run_gen_data,
                          run_train)

    try:
        cfg = load_config(args.config, args.seed)
        if args.command == "gen-data":
            summary = run_gen_data(cfg, args.out)
        elif args.command == "train":
            summary = run_train(cfg, args.out, args.which)
        elif args.command == "attack":
            summary = run_attack_stage(cfg, args.out)
        elif args.command == "evaluate":
            summary = run_evaluate(cfg, args.out)
        else:
            summary = run_ablate(cfg, args.out, args.axis)
    except HarnessError as e:
        return _fail(e.to_json())
    except OSError as e:
        return _fail({"error": "io-error", "message": str(e)})
    except ValueError as e:
        return _fail({"error": "invalid-value", "message": str(e)})
    print(json.dumps({"ok": True, "stage": args.command, "summary": summary},
                     sort_keys=True))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _set_threads(getattr(args, "threads", 1))

    if args.command == "serve":
        import uvicorn

        from .service import app
        uvicorn.run(app, host=args.host, port=args.port)
        return 0
    if args.server:
        return _run_remote(args)
    return _run_local(args)


if __name__ == "__main__":
    sys.exit(main())
