"""Client side of the scorer wire protocol (v1).

Newline-delimited JSON over a child process's stdio or a TCP connection. Both
ends open with a handshake line `{"hello": {"protocol": 1}}`. Requests carry
explicit ids; responses are matched by id, never by arrival order, so a
scorer may answer a batch in any order it likes. A response with an "error"
field, a malformed line, a dead pipe, or a timeout raises through the
TransportError hierarchy.
"""
from __future__ import annotations

import json
import os
import select
import shlex
import socket
import subprocess
from pathlib import Path
from typing import Sequence

import numpy as np

from ..errors import ConfigError, ProtocolError, TransportError
from .contracts import (
    BioScoreRequest,
    RoleScoreRequest,
    ScorerHandle,
    SenseScoreRequest,
)

PROTOCOL_VERSION = 1
HELLO = {"hello": {"protocol": PROTOCOL_VERSION}}
DEFAULT_TIMEOUT = 60.0


def open_scorer(spec: str, timeout: float = DEFAULT_TIMEOUT) -> ScorerHandle:
    """Build a scorer from its CLI spec string.

    Accepted forms: `reference:<model-file>`, `exec:<command>`,
    `tcp:<host:port>`, and `scripted:<script.json>` (the test harness scorer).
    """
    kind, sep, rest = spec.partition(":")
    if not sep or not rest:
        raise ConfigError(f"bad scorer spec {spec!r}; expected kind:argument")
    if kind == "reference":
        from .reference import ReferenceScorer

        if not Path(rest).exists():
            raise ConfigError(f"reference model file not found: {rest}")
        return ReferenceScorer.from_file(rest)
    if kind == "scripted":
        from .scripted import ScriptedScorer

        return ScriptedScorer.from_file(rest)
    if kind == "exec":
        return ExecScorer(rest, timeout=timeout)
    if kind == "tcp":
        host, sep, port = rest.rpartition(":")
        if not sep or not port.isdigit():
            raise ConfigError(f"bad tcp scorer spec {spec!r}; expected tcp:host:port")
        return TcpScorer(host, int(port), timeout=timeout)
    raise ConfigError(f"unknown scorer kind {kind!r} in spec {spec!r}")


def request_payload(
    req_id: int, req: SenseScoreRequest | RoleScoreRequest | BioScoreRequest
) -> dict:
    """Wire form of one request; the protocol's only request shape."""
    payload = {
        "id": req_id,
        "kind": None,
        "tokens": list(req.tokens),
        "option": None,
        "query": None,
        "roles": None,
    }
    if isinstance(req, SenseScoreRequest):
        payload["kind"] = "sense"
        payload["option"] = req.option_text
    elif isinstance(req, RoleScoreRequest):
        payload["kind"] = "role"
        payload["roles"] = list(req.roles)
    elif isinstance(req, BioScoreRequest):
        payload["kind"] = "bio"
        payload["query"] = req.query_text
    else:
        raise TypeError(f"not a scoring request: {req!r}")
    return payload


class _WireScorer(ScorerHandle):
    """Shared protocol logic over line-oriented send/receive primitives."""

    timeout: float

    def __init__(self, timeout: float):
        self.timeout = timeout
        self._next_id = 0
        self._handshaken = False

    # transport primitives -------------------------------------------------
    def _send_line(self, line: str) -> None:
        raise NotImplementedError

    def _recv_line(self) -> str:
        """One line, or raise TransportError on EOF/timeout."""
        raise NotImplementedError

    def _describe(self) -> str:
        raise NotImplementedError

    # protocol -------------------------------------------------------------
    def _ensure_handshake(self) -> None:
        if self._handshaken:
            return
        self._send_line(json.dumps(HELLO))
        line = self._recv_line()
        try:
            msg = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProtocolError(
                f"{self._describe()}: handshake line is not JSON: {line!r}"
            ) from exc
        if not isinstance(msg, dict) or msg.get("hello", {}).get("protocol") != PROTOCOL_VERSION:
            raise ProtocolError(f"{self._describe()}: bad handshake {msg!r}")
        self._handshaken = True

    def _roundtrip(self, reqs: Sequence) -> list[dict]:
        """Send a batch, collect responses by id, return in request order."""
        self._ensure_handshake()
        ids = []
        for req in reqs:
            rid = self._next_id
            self._next_id += 1
            ids.append(rid)
            self._send_line(json.dumps(request_payload(rid, req)))
        pending = set(ids)
        got: dict[int, dict] = {}
        while pending:
            line = self._recv_line()
            try:
                msg = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ProtocolError(f"{self._describe()}: response is not JSON: {line!r}") from exc
            rid = msg.get("id")
            if rid not in pending:
                raise ProtocolError(f"{self._describe()}: unexpected response id {rid!r}")
            if "error" in msg:
                raise ProtocolError(f"{self._describe()}: scorer error for id {rid}: {msg['error']}")
            got[rid] = msg
            pending.discard(rid)
        return [got[rid] for rid in ids]

    @staticmethod
    def _field(msg: dict, name: str):
        if name not in msg:
            raise ProtocolError(f"response {msg.get('id')} lacks {name!r}")
        return msg[name]

    # the three heads ------------------------------------------------------
    def _sense(self, req: SenseScoreRequest) -> float:
        return self._field(self._roundtrip([req])[0], "score")

    def _roles(self, req: RoleScoreRequest) -> dict[str, float]:
        raw = self._field(self._roundtrip([req])[0], "scores")
        if not isinstance(raw, dict):
            raise ProtocolError(f"{self._describe()}: 'scores' is not an object")
        return raw

    def _bio(self, req: BioScoreRequest):
        return self._field(self._roundtrip([req])[0], "tags")

    # batch forms pipeline the whole group before reading ------------------
    def score_sense_batch(self, reqs: list[SenseScoreRequest]) -> list[float]:
        from .contracts import validate_probability

        return [
            validate_probability(self._field(m, "score"), "sense score")
            for m in self._roundtrip(reqs)
        ]

    def score_role_batch(self, reqs: list[RoleScoreRequest]) -> list[dict[str, float]]:
        from .contracts import validate_probability

        out = []
        for req, msg in zip(reqs, self._roundtrip(reqs)):
            raw = self._field(msg, "scores")
            if not isinstance(raw, dict) or set(raw) != set(req.roles):
                raise ProtocolError(
                    f"{self._describe()}: role score keys do not match the requested universe"
                )
            out.append(
                {r: validate_probability(raw[r], f"role score for {r}") for r in req.roles}
            )
        return out

    def score_bio_batch(self, reqs: list[BioScoreRequest]) -> list[np.ndarray]:
        from .contracts import validate_tag_distribution

        return [
            validate_tag_distribution(self._field(m, "tags"), req.n_words)
            for req, m in zip(reqs, self._roundtrip(reqs))
        ]


class ExecScorer(_WireScorer):
    """Scorer behind `exec:<command>`: a child process spoken to over stdio.

    Reads go through select + os.read on the raw pipe, never through Python's
    buffered layer, so the timeout cannot miss data parked in a buffer.
    """

    def __init__(self, command: str, timeout: float = DEFAULT_TIMEOUT):
        super().__init__(timeout)
        self.command = command
        try:
            self._proc = subprocess.Popen(
                shlex.split(command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
            )
        except OSError as exc:
            raise TransportError(f"cannot start scorer {command!r}: {exc}") from exc
        self._buf = b""

    def _describe(self) -> str:
        return f"exec scorer {self.command!r}"

    def _send_line(self, line: str) -> None:
        if self._proc.poll() is not None:
            raise TransportError(f"{self._describe()} exited with {self._proc.returncode}")
        try:
            self._proc.stdin.write((line + "\n").encode("utf-8"))
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise TransportError(f"{self._describe()}: pipe closed: {exc}") from exc

    def _recv_line(self) -> str:
        fd = self._proc.stdout.fileno()
        while b"\n" not in self._buf:
            ready, _, _ = select.select([fd], [], [], self.timeout)
            if not ready:
                raise TransportError(f"{self._describe()}: no response within {self.timeout}s")
            chunk = os.read(fd, 65536)
            if not chunk:
                raise TransportError(f"{self._describe()}: process closed its output")
            self._buf += chunk
        line, self._buf = self._buf.split(b"\n", 1)
        return line.decode("utf-8")

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()


class TcpScorer(_WireScorer):
    """Scorer behind `tcp:<host:port>`."""

    def __init__(self, host: str, port: int, timeout: float = DEFAULT_TIMEOUT):
        super().__init__(timeout)
        self.address = f"{host}:{port}"
        try:
            self._sock = socket.create_connection((host, port), timeout=timeout)
        except OSError as exc:
            raise TransportError(f"cannot connect to scorer at {self.address}: {exc}") from exc
        self._sock.settimeout(timeout)
        self._fh = self._sock.makefile("rw", encoding="utf-8", newline="\n")

    def _describe(self) -> str:
        return f"tcp scorer {self.address}"

    def _send_line(self, line: str) -> None:
        try:
            self._fh.write(line + "\n")
            self._fh.flush()
        except OSError as exc:
            raise TransportError(f"{self._describe()}: send failed: {exc}") from exc

    def _recv_line(self) -> str:
        try:
            line = self._fh.readline()
        except socket.timeout as exc:
            raise TransportError(f"{self._describe()}: no response within {self.timeout}s") from exc
        except OSError as exc:
            raise TransportError(f"{self._describe()}: receive failed: {exc}") from exc
        if line == "":
            raise TransportError(f"{self._describe()}: connection closed")
        return line.rstrip("\n")

    def close(self) -> None:
        try:
            self._fh.close()
        except OSError:
            pass
        try:
            self._sock.close()
        except OSError:
            pass
