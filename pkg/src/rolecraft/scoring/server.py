"""Server side of the scorer wire protocol (v1).

Wraps any in-process ScorerHandle so it can be spoken to over stdio or TCP.
Run as a module to serve a scorer spec:

    python -m rolecraft.scoring.server scripted:answers.json
    python -m rolecraft.scoring.server reference:model.bin --tcp 8765

Per-request failures answer `{"id": ..., "error": ...}` and keep the loop
alive; EOF ends the process cleanly.
"""
from __future__ import annotations

import argparse
import json
import socket
import sys

import numpy as np

from ..errors import RolecraftError
from .contracts import (
    BioScoreRequest,
    RoleScoreRequest,
    ScorerHandle,
    SenseScoreRequest,
)

PROTOCOL_VERSION = 1
HELLO_LINE = json.dumps({"hello": {"protocol": PROTOCOL_VERSION}})


def handle_request(scorer: ScorerHandle, msg: dict) -> dict:
    """Answer one decoded request; raises on malformed input."""
    rid = msg["id"]
    kind = msg.get("kind")
    tokens = tuple(msg.get("tokens") or ())
    if kind == "sense":
        req = SenseScoreRequest(tokens=tokens, option_text=msg.get("option") or "")
        return {"id": rid, "score": scorer.score_sense_option(req)}
    if kind == "role":
        req = RoleScoreRequest(tokens=tokens, roles=tuple(msg.get("roles") or ()))
        return {"id": rid, "scores": scorer.score_role_presence(req)}
    if kind == "bio":
        req = BioScoreRequest(
            tokens=tokens, query_text=msg.get("query") or "", role=""
        )
        tags = scorer.score_bio(req)
        return {"id": rid, "tags": np.asarray(tags).tolist()}
    raise ValueError(f"unknown request kind {kind!r}")


def serve(scorer: ScorerHandle, rfile, wfile) -> None:
    """Protocol loop over text file objects; returns at EOF."""

    def send(obj: dict) -> None:
        wfile.write(json.dumps(obj) + "\n")
        wfile.flush()

    wfile.write(HELLO_LINE + "\n")
    wfile.flush()
    first = rfile.readline()
    if not first:
        return
    try:
        hello = json.loads(first)
    except json.JSONDecodeError:
        send({"id": None, "error": "handshake line is not JSON"})
        return
    if not isinstance(hello, dict) or hello.get("hello", {}).get("protocol") != PROTOCOL_VERSION:
        send({"id": None, "error": f"unsupported handshake {first.strip()!r}"})
        return

    for line in rfile:
        if not line.strip():
            continue
        rid = None
        try:
            msg = json.loads(line)
            rid = msg.get("id") if isinstance(msg, dict) else None
            send(handle_request(scorer, msg))
        except (RolecraftError, ValueError, KeyError, TypeError) as exc:
            send({"id": rid, "error": str(exc)})


def serve_tcp(scorer: ScorerHandle, port: int, host: str = "127.0.0.1") -> None:
    """Serve connections sequentially; port 0 picks a free port (printed)."""
    with socket.create_server((host, port)) as srv:
        print(f"listening on {host}:{srv.getsockname()[1]}", file=sys.stderr, flush=True)
        while True:
            conn, _ = srv.accept()
            with conn, conn.makefile("r", encoding="utf-8") as rfile, conn.makefile(
                "w", encoding="utf-8"
            ) as wfile:
                serve(scorer, rfile, wfile)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="python -m rolecraft.scoring.server",
        description="serve a scorer over the wire protocol",
    )
    parser.add_argument("spec", help="scorer spec, e.g. scripted:file.json or reference:model")
    parser.add_argument("--tcp", type=int, metavar="PORT",
                        help="listen on TCP instead of stdio (0 = pick a port)")
    args = parser.parse_args(argv)

    from .client import open_scorer

    scorer = open_scorer(args.spec)
    if args.tcp is None:
        serve(scorer, sys.stdin, sys.stdout)
    else:
        serve_tcp(scorer, args.tcp)
    return 0


if __name__ == "__main__":
    sys.exit(main())
