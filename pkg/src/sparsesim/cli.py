"""Command line frontend.

Each subcommand builds a request, runs it in process through service.py (or
against a running service when --server is given), and prints the report as
JSON.  Exit codes: 0 on success, 1 on usage or input errors, 2 when --strict
is set and the report lists promise violations.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import httpx
from pydantic import ValidationError

from ._version import VERSION
from .report import pretty_json
from .schema import CircuitParseError
from .service import (
    CompareRequest,
    OracleRequest,
    SimulateRequest,
    StateRequest,
    WeightsRequest,
    run_compare,
    run_oracle,
    run_reconstruct_state,
    run_simulate,
    run_weights,
)


class _ParserExit(Exception):
    def __init__(self, code: int):
        self.code = code


class _Parser(argparse.ArgumentParser):
    # Usage errors exit with 1; argparse's default of 2 is reserved for
    # --strict promise violations.
    def exit(self, status: int = 0, message: str | None = None):
        if message:
            sys.stderr.write(message)
        raise _ParserExit(0 if status == 0 else 1)


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--circuit", required=True, help="path to a circuit JSON file")
    sub.add_argument("--seed", type=int, default=0, help="root seed (default 0)")
    sub.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")
    sub.add_argument(
        "--estimator",
        choices=["auto", "ct", "sampling", "exact"],
        default="auto",
        help="marginal estimator backend (default auto)",
    )
    sub.add_argument("--out", help="write the report to this file instead of stdout")
    sub.add_argument(
        "--strict",
        action="store_true",
        help="exit with status 2 if the report lists promise violations",
    )
    sub.add_argument("--server", help="base URL of a running service to delegate to")


def _add_reconstruction(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--t", type=int, required=True, help="sparsity bound")
    sub.add_argument("--epsilon", type=float, required=True, help="accuracy parameter")
    sub.add_argument("--delta", type=float, required=True, help="failure probability")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sparsesim", description="sparse output reconstruction for quantum circuits")
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    commands = parser.add_subparsers(dest="command", required=True)

    sim = commands.add_parser("simulate", help="reconstruct the measured distribution")
    _add_common(sim)
    _add_reconstruction(sim)

    state = commands.add_parser("reconstruct-state", help="reconstruct the output state")
    _add_common(state)
    _add_reconstruction(state)

    weights = commands.add_parser("weights", help="locate significant basis weights")
    _add_common(weights)
    weights.add_argument("--theta", type=float, required=True, help="weight threshold")
    weights.add_argument("--pi", type=float, required=True, help="search failure probability")
    weights.add_argument("--epsilon", type=float, required=True, help="coefficient accuracy")
    weights.add_argument("--delta", type=float, required=True, help="coefficient failure probability")

    oracle = commands.add_parser("oracle", help="exact measured distribution (dense)")
    _add_common(oracle)
    oracle.add_argument("--top", type=int, help="report only the top entries")

    compare = commands.add_parser("compare", help="repeat reconstruction and compare to the dense oracle")
    _add_common(compare)
    _add_reconstruction(compare)
    compare.add_argument("--trials", type=int, default=20, help="number of runs (default 20)")

    serve = commands.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1", help="bind address (default 127.0.0.1)")
    serve.add_argument("--port", type=int, default=8000, help="port (default 8000)")
    return parser


_COMMANDS = {
    "simulate": (SimulateRequest, run_simulate, "/simulate"),
    "reconstruct-state": (StateRequest, run_reconstruct_state, "/reconstruct-state"),
    "weights": (WeightsRequest, run_weights, "/weights"),
    "oracle": (OracleRequest, run_oracle, "/oracle"),
    "compare": (CompareRequest, run_compare, "/compare"),
}


def _load_circuit(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CircuitParseError(f"cannot read circuit file: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CircuitParseError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(data, dict):
        raise CircuitParseError("circuit file must contain a JSON object")
    return data


def _payload(args: argparse.Namespace) -> dict:
    circuit = _load_circuit(args.circuit)
    if args.command == "oracle":
        payload: dict = {"circuit": circuit}
        if args.top is not None:
            payload["top"] = args.top
        return payload
    common = {
        "circuit": circuit,
        "seed": args.seed,
        "threads": args.threads,
        "estimator": args.estimator,
    }
    if args.command == "weights":
        return {
            **common,
            "theta": args.theta,
            "pi": args.pi,
            "epsilon": args.epsilon,
            "delta": args.delta,
        }
    recon = {**common, "t": args.t, "epsilon": args.epsilon, "delta": args.delta}
    if args.command == "compare":
        recon["trials"] = args.trials
    return recon


def _post(server: str, path: str, payload: dict) -> dict:
    url = server.rstrip("/") + path
    response = httpx.post(url, json=payload, timeout=None)
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise CircuitParseError(f"server returned {response.status_code}: {detail}")
    return response.json()


def _first_validation_message(exc: ValidationError) -> str:
    err = exc.errors()[0]
    loc = ".".join(str(p) for p in err["loc"])
    return f"{loc}: {err['msg']}" if loc else err["msg"]


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _ParserExit as exc:
        return exc.code

    if args.command == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    model_cls, runner, path = _COMMANDS[args.command]
    try:
        payload = _payload(args)
        if args.server:
            report = _post(args.server, path, payload)
        else:
            report = runner(model_cls.model_validate(payload))
    except CircuitParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValidationError as exc:
        print(f"error: {_first_validation_message(exc)}", file=sys.stderr)
        return 1
    except (ValueError, httpx.HTTPError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    text = pretty_json(report)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)

    violations = report.get("result", {}).get("promise_violations") or []
    if args.strict and violations:
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
