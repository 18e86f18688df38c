"""Command-line front end.

The CLI is a thin client of the HTTP service: every subcommand issues one
request.  By default the service application is mounted in-process over
an ASGI transport, so batch usage needs no running server; --server sends
the same requests to a remote instance instead (paths in arguments are
then resolved on that host).

Exit codes: 0 success, 1 usage error, 2 data error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from pathlib import Path

import httpx

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_IO = 3

_KIND_TO_EXIT = {"usage": EXIT_USAGE, "data": EXIT_DATA, "io": EXIT_IO}


class _CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems with exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> _Parser:
    parser = _Parser(
        prog="tweetfuse",
        description="Multimodal tweet event detection: ingest, train, evaluate, detect.",
    )
    parser.add_argument(
        "--server",
        default=None,
        help="base URL of a running service; default runs the service in-process",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("ingest", help="read JSONL records into the store")
    p.add_argument("--store", required=True, help="store directory")
    p.add_argument("--in", dest="infile", default=None, help="input JSONL (default: stdin)")

    p = sub.add_parser("keywords", help="emit the top-K event keyword report")
    p.add_argument("--store", required=True)
    p.add_argument("--config", default=None, help="JSON configuration file")
    p.add_argument("--k", type=int, default=100, help="number of keywords (default 100)")
    p.add_argument("--out", default=None, help="write CSV here instead of stdout")

    p = sub.add_parser("train", help="fit both channels and calibrate fusion")
    p.add_argument("--store", required=True)
    p.add_argument("--config", default=None, help="JSON configuration file")
    p.add_argument("--out", required=True, help="model bundle path to write")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--k", type=int, default=None, help="KNN neighbor count")
    p.add_argument("--classifier", choices=("knn", "svm"), default=None)
    p.add_argument("--fusion", choices=("gate", "concat"), default=None)

    p = sub.add_parser("evaluate", help="three-way comparison on the test split")
    p.add_argument("--store", required=True)
    p.add_argument("--model", required=True, help="model bundle path")
    p.add_argument("--out", default=None, help="write the JSON report here")

    p = sub.add_parser("detect", help="classify new unlabeled records")
    p.add_argument("--model", required=True, help="model bundle path")
    p.add_argument("--in", dest="infile", default=None, help="input JSONL (default: stdin)")
    p.add_argument(
        "--image-root",
        default=None,
        help="directory image paths are relative to (default: the input file's directory)",
    )
    p.add_argument("--out", default=None, help="write rows here instead of stdout")

    p = sub.add_parser("synth", help="generate the seeded synthetic benchmark corpus")
    p.add_argument("--store", required=True)
    p.add_argument("--n", type=int, default=600)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--text-noise", type=float, default=0.3)
    p.add_argument("--image-noise", type=float, default=0.15)

    return parser


def _read_lines(infile: str | None) -> list[str]:
    if infile is None:
        return sys.stdin.read().splitlines()
    try:
        return Path(infile).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise _CliError(f"cannot read {infile}: {exc}", EXIT_IO) from None


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _CliError(f"cannot read configuration {path}: {exc}", EXIT_IO) from None
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise _CliError(f"configuration {path} is not valid JSON: {exc.msg}", EXIT_DATA) from None
    if not isinstance(doc, dict):
        raise _CliError(f"configuration {path} must hold a JSON object", EXIT_DATA)
    return doc


def _write_out(path: str, content: str) -> None:
    try:
        Path(path).write_text(content, encoding="utf-8")
    except OSError as exc:
        raise _CliError(f"cannot write {path}: {exc}", EXIT_IO) from None


def _client(server: str | None) -> httpx.AsyncClient:
    if server:
        return httpx.AsyncClient(base_url=server.rstrip("/"), timeout=600.0)
    from .service.app import app

    return httpx.AsyncClient(
        transport=httpx.ASGITransport(app=app),
        base_url="http://tweetfuse.local",
        timeout=None,
    )


async def _post(client: httpx.AsyncClient, path: str, payload: dict) -> dict:
    try:
        resp = await client.post(path, json=payload)
    except httpx.HTTPError as exc:
        raise _CliError(f"service request failed: {exc}", EXIT_IO) from None
    if resp.is_success:
        return resp.json()
    try:
        body = resp.json()
    except ValueError:
        body = {}
    detail = body.get("detail", resp.text or f"HTTP {resp.status_code}")
    kind = body.get("kind")
    code = _KIND_TO_EXIT.get(kind, EXIT_USAGE if resp.status_code < 500 else EXIT_IO)
    raise _CliError(str(detail), code)


async def _cmd_ingest(client, args) -> int:
    lines = _read_lines(args.infile)
    body = await _post(client, "/ingest", {"store": args.store, "lines": lines})
    print(
        "accepted {accepted} rejected_filter {rejected_filter} "
        "rejected_parse {rejected_parse}".format(**body)
    )
    return EXIT_OK


async def _cmd_keywords(client, args) -> int:
    payload = {"store": args.store, "k": args.k, "config": _load_config(args.config)}
    body = await _post(client, "/keywords", payload)
    if args.out:
        _write_out(args.out, body["csv"])
    else:
        print(body["csv"], end="")
    return EXIT_OK


async def _cmd_train(client, args) -> int:
    config = _load_config(args.config)
    for key in ("seed", "k", "classifier", "fusion"):
        value = getattr(args, key)
        if value is not None:
            config[key] = value
    body = await _post(
        client, "/train", {"store": args.store, "out": args.out, "config": config}
    )
    acc = body["validation_accuracy"]
    print(f"model written to {body['model_path']}")
    print(f"fingerprint {body['fingerprint']}")
    print(f"fusion {body['fusion_mode']} tau {body['tau']!r}")
    print(
        "validation accuracy: text {text:.4f} image {image:.4f} fusion {fusion:.4f}".format(
            text=acc["text"], image=acc["image"], fusion=acc["fusion"]
        )
    )
    return EXIT_OK


async def _cmd_evaluate(client, args) -> int:
    body = await _post(client, "/evaluate", {"store": args.store, "model": args.model})
    print(body["table"], end="")
    if args.out:
        _write_out(args.out, body["report_json"])
    return EXIT_OK


async def _cmd_detect(client, args) -> int:
    lines = _read_lines(args.infile)
    if args.image_root is not None:
        image_root = args.image_root
    elif args.infile is not None:
        image_root = str(Path(args.infile).resolve().parent)
    else:
        image_root = str(Path.cwd())
    body = await _post(
        client,
        "/detect",
        {"model": args.model, "lines": lines, "image_root": image_root},
    )
    out_lines = ["id\tlabel\tchannel"]
    out_lines += [f"{r['id']}\t{r['label']}\t{r['channel']}" for r in body["rows"]]
    content = "\n".join(out_lines) + "\n"
    if args.out:
        _write_out(args.out, content)
    else:
        print(content, end="")
    return EXIT_OK


async def _cmd_synth(client, args) -> int:
    body = await _post(
        client,
        "/synth",
        {
            "store": args.store,
            "n": args.n,
            "seed": args.seed,
            "text_noise": args.text_noise,
            "image_noise": args.image_noise,
        },
    )
    print(f"wrote {body['written']} records to {body['store']}")
    return EXIT_OK


_COMMANDS = {
    "ingest": _cmd_ingest,
    "keywords": _cmd_keywords,
    "train": _cmd_train,
    "evaluate": _cmd_evaluate,
    "detect": _cmd_detect,
    "synth": _cmd_synth,
}


async def _run(args) -> int:
    handler = _COMMANDS[args.command]
    async with _client(args.server) as client:
        return await handler(client, args)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        print("tweetfuse: error: a subcommand is required", file=sys.stderr)
        return EXIT_USAGE
    try:
        return asyncio.run(_run(args))
    except _CliError as exc:
        print(f"tweetfuse: error: {exc}", file=sys.stderr)
        return exc.code
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
