"""Configuration for the encoder, its heads, and fine-tuning.

The optimizer defaults (learning rate 1e-5, warmup ratio 0.05, 20 epochs,
2048 tokens per batch) are tuned for continuing from pretrained encoder
weights. Training the tiny encoder from scratch wants a larger learning
rate and fewer epochs; pass overrides for that.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from pathlib import Path

from bridge.errors import BridgeError

MARKER_POLICIES = ("special", "text")


@dataclass
class BridgeConfig:
    # encoder: "tiny" builds a randomly initialized model; a path loads the
    # encoder weights out of an existing checkpoint as the starting point
    encoder: str = "tiny"
    vocab_size: int = 2048
    dim: int = 64
    layers: int = 2
    heads: int = 4
    ffn_dim: int = 128
    max_len: int = 128
    dropout: float = 0.1
    # optimizer defaults for the pretrained regime
    lr: float = 1e-5
    warmup: float = 0.05
    epochs: int = 20
    tokens_per_batch: int = 2048
    # markers: "special" gives <p> and </p> dedicated vocabulary slots with
    # randomly initialized embeddings; "text" tokenizes them like any word
    marker_policy: str = "special"
    # None: heads are a single linear layer over the encoder width.
    # An int inserts one hidden layer of that width.
    head_hidden: int | None = None
    seed: int = 0
    roles: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        for name in ("vocab_size", "dim", "layers", "heads", "ffn_dim",
                     "max_len", "epochs", "tokens_per_batch"):
            if getattr(self, name) <= 0:
                raise BridgeError(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.vocab_size <= 8:
            raise BridgeError("vocab_size must leave room beyond the special tokens")
        if self.dim % self.heads != 0:
            raise BridgeError(f"dim {self.dim} must be divisible by heads {self.heads}")
        if not 0.0 <= self.warmup < 1.0:
            raise BridgeError(f"warmup ratio must be in [0, 1), got {self.warmup!r}")
        if self.lr <= 0:
            raise BridgeError(f"learning rate must be positive, got {self.lr!r}")
        if not 0.0 <= self.dropout < 1.0:
            raise BridgeError(f"dropout must be in [0, 1), got {self.dropout!r}")
        if self.marker_policy not in MARKER_POLICIES:
            raise BridgeError(f"unknown marker policy {self.marker_policy!r}")
        if self.head_hidden is not None and self.head_hidden <= 0:
            raise BridgeError("head_hidden must be positive when set")
        self.roles = tuple(self.roles)

    def to_dict(self) -> dict:
        return asdict(self)


def config_from_dict(data: dict) -> BridgeConfig:
    data = dict(data)
    if data.get("roles") is not None:
        data["roles"] = tuple(data["roles"])
    try:
        return BridgeConfig(**data)
    except TypeError as exc:
        raise BridgeError(f"bad bridge config: {exc}") from exc


def load_config(path: str | Path) -> BridgeConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise BridgeError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise BridgeError(f"config {path} must be a JSON object")
    return config_from_dict(raw)
