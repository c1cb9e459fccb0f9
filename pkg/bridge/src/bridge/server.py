"""Newline-JSON scorer server.

Speaks protocol 1: both sides open with {"hello": {"protocol": 1}}, then
each request line carries an id, a kind (sense, role, or bio), marked
tokens, and the question text. A request that cannot be served answers
{"id": ..., "error": ...} and the loop carries on. One connection, one
scoring thread.
"""

from __future__ import annotations

import argparse
import json
import logging
import socket
import sys
from pathlib import Path

import torch

from bridge.config import BridgeConfig, config_from_dict
from bridge.errors import BridgeError
from bridge.model import BridgeModel, build_model, load_checkpoint
from bridge.tokenizer import MARKERS

log = logging.getLogger("bridge.server")

PROTOCOL_VERSION = 1
HELLO_LINE = json.dumps({"hello": {"protocol": PROTOCOL_VERSION}})


class StageModels:
    """The three models behind one server; stages without a checkpoint get
    a fresh randomly initialized model."""

    def __init__(self, sense: BridgeModel, role: BridgeModel, bio: BridgeModel):
        self.sense = sense
        self.role = role
        self.bio = bio

    @classmethod
    def from_config_file(cls, path: str | Path) -> "StageModels":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise BridgeError(f"cannot read server config {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise BridgeError(f"server config {path} must be a JSON object")
        base = config_from_dict(raw.get("encoder", {}))
        models = {}
        for stage in ("sense", "role", "bio"):
            ckpt = raw.get(stage)
            if ckpt is None:
                models[stage] = build_model(base)
                models[stage].eval()
                continue
            model, payload = load_checkpoint(ckpt)
            if payload.get("stage") not in (None, stage):
                raise BridgeError(
                    f"{ckpt} holds a {payload.get('stage')!r} model, wanted {stage!r}"
                )
            models[stage] = model
        return cls(models["sense"], models["role"], models["bio"])

    @classmethod
    def fresh(cls, cfg: BridgeConfig) -> "StageModels":
        models = []
        for _ in range(3):
            m = build_model(cfg)
            m.eval()
            models.append(m)
        return cls(*models)


def _checked_tokens(msg: dict) -> list[str]:
    tokens = msg.get("tokens")
    if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
        raise BridgeError("tokens must be a list of strings")
    open_m, close_m = MARKERS
    if tokens.count(open_m) != 1 or tokens.count(close_m) != 1:
        raise BridgeError("tokens must contain exactly one marker pair")
    if tokens.index(close_m) != tokens.index(open_m) + 2:
        raise BridgeError("markers must surround exactly one predicate token")
    return tokens


def handle_request(models: StageModels, msg: dict) -> dict:
    req_id = msg["id"]
    kind = msg.get("kind")
    tokens = _checked_tokens(msg)
    with torch.no_grad():
        if kind == "sense":
            option = msg.get("option")
            if not option or not isinstance(option, str):
                raise BridgeError("sense request needs option text")
            return {"id": req_id, "score": models.sense.sense_score(tokens, option)}
        if kind == "role":
            roles = msg.get("roles")
            if not roles or not isinstance(roles, list):
                raise BridgeError("role request needs a role list")
            return {"id": req_id, "scores": models.role.role_scores(tokens, roles)}
        if kind == "bio":
            query = msg.get("query")
            if not query or not isinstance(query, str):
                raise BridgeError("bio request needs query text")
            return {"id": req_id, "tags": models.bio.bio_rows(tokens, query)}
    raise BridgeError(f"unknown request kind {kind!r}")


def serve(models: StageModels, rfile, wfile) -> None:
    def send(obj: dict) -> None:
        wfile.write(json.dumps(obj) + "\n")
        wfile.flush()

    line = rfile.readline()
    if not line:
        return
    try:
        hello = json.loads(line)
        if hello.get("hello", {}).get("protocol") != PROTOCOL_VERSION:
            raise ValueError(f"unsupported protocol in {line.strip()!r}")
    except (json.JSONDecodeError, AttributeError, ValueError) as exc:
        send({"error": f"bad handshake: {exc}"})
        return
    wfile.write(HELLO_LINE + "\n")
    wfile.flush()

    for line in rfile:
        if not line.strip():
            continue
        req_id = None
        try:
            msg = json.loads(line)
            req_id = msg.get("id") if isinstance(msg, dict) else None
            send(handle_request(models, msg))
        except Exception as exc:  # noqa: BLE001  per-request errors keep serving
            log.warning("request failed: %s", exc)
            send({"id": req_id, "error": str(exc)})


def serve_tcp(models: StageModels, port: int, host: str = "127.0.0.1") -> None:
    with socket.create_server((host, port)) as server:
        print(f"listening on {host}:{server.getsockname()[1]}", flush=True)
        while True:
            conn, _ = server.accept()
            with conn:
                rfile = conn.makefile("r", encoding="utf-8")
                wfile = conn.makefile("w", encoding="utf-8")
                try:
                    serve(models, rfile, wfile)
                except (BrokenPipeError, ConnectionResetError):
                    pass


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="python -m bridge.server",
        description="serve the encoder scorer over the wire protocol",
    )
    parser.add_argument("--config", help="server config JSON naming stage checkpoints")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for fresh models when --config is omitted")
    parser.add_argument("--tcp", type=int, metavar="PORT",
                        help="listen on TCP instead of stdio (0 = pick a port)")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING, stream=sys.stderr)
    try:
        if args.config:
            models = StageModels.from_config_file(args.config)
        else:
            models = StageModels.fresh(BridgeConfig(seed=args.seed))
        if args.tcp is not None:
            serve_tcp(models, args.tcp)
        else:
            serve(models, sys.stdin, sys.stdout)
    except BridgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        pass
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
