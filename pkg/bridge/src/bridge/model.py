"""Tiny transformer encoder with the three scoring heads.

Sense and role-presence scores read the representation of the first input
position; BIO tag distributions read the representation of each sentence
word's first sub-token. Heads are a single linear layer over the encoder
width unless head_hidden inserts one hidden layer.
"""

from __future__ import annotations

import pickle
import zipfile
from pathlib import Path

import torch
from torch import nn

from bridge.config import BridgeConfig, config_from_dict
from bridge.errors import BridgeError
from bridge.tokenizer import PAD, Tokenizer

N_TAGS = 7
CHECKPOINT_FORMAT = "bridge-checkpoint"
CHECKPOINT_VERSION = 1
UNKNOWN_ROLE_ROW = 0


def _head(dim: int, out: int, hidden: int | None) -> nn.Module:
    if hidden is None:
        return nn.Linear(dim, out)
    return nn.Sequential(nn.Linear(dim, hidden), nn.GELU(), nn.Linear(hidden, out))


class BridgeModel(nn.Module):
    def __init__(self, cfg: BridgeConfig):
        super().__init__()
        self.cfg = cfg
        self.tokenizer = Tokenizer(cfg.vocab_size, cfg.marker_policy)
        self.tok_emb = nn.Embedding(cfg.vocab_size, cfg.dim, padding_idx=PAD)
        self.pos_emb = nn.Embedding(cfg.max_len, cfg.dim)
        layer = nn.TransformerEncoderLayer(
            d_model=cfg.dim, nhead=cfg.heads, dim_feedforward=cfg.ffn_dim,
            dropout=cfg.dropout, batch_first=True, norm_first=True,
        )
        self.encoder = nn.TransformerEncoder(
            layer, num_layers=cfg.layers, enable_nested_tensor=False
        )
        self.norm = nn.LayerNorm(cfg.dim)
        self.sense_head = _head(cfg.dim, 1, cfg.head_hidden)
        # row 0 answers roles the model was never trained on
        self.role_index = {name: i + 1 for i, name in enumerate(cfg.roles)}
        self.role_head = _head(cfg.dim, 1 + len(cfg.roles), cfg.head_hidden)
        self.bio_head = _head(cfg.dim, N_TAGS, cfg.head_hidden)
        self._init_weights()

    def _init_weights(self) -> None:
        # every embedding row, marker slots included, draws from one normal
        for emb in (self.tok_emb, self.pos_emb):
            nn.init.normal_(emb.weight, mean=0.0, std=0.02)
        with torch.no_grad():
            self.tok_emb.weight[PAD].zero_()

    def _encode_batch(self, id_lists: list[list[int]]) -> torch.Tensor:
        width = max(len(ids) for ids in id_lists)
        batch = torch.full((len(id_lists), width), PAD, dtype=torch.long)
        for i, ids in enumerate(id_lists):
            batch[i, :len(ids)] = torch.tensor(ids, dtype=torch.long)
        pad_mask = batch == PAD
        pos = torch.arange(width).unsqueeze(0).expand_as(batch)
        h = self.tok_emb(batch) + self.pos_emb(pos)
        h = self.encoder(h, src_key_padding_mask=pad_mask)
        return self.norm(h)

    def sense_score(self, tokens, option_text: str) -> float:
        ids, _ = self.tokenizer.encode(tokens, option_text, self.cfg.max_len)
        h = self._encode_batch([ids])
        return torch.sigmoid(self.sense_head(h[0, 0])).item()

    def role_scores(self, tokens, roles) -> dict[str, float]:
        ids, _ = self.tokenizer.encode(tokens, None, self.cfg.max_len)
        h = self._encode_batch([ids])
        logits = self.role_head(h[0, 0])
        probs = torch.sigmoid(logits)
        return {
            r: probs[self.role_index.get(r, UNKNOWN_ROLE_ROW)].item() for r in roles
        }

    def bio_rows(self, tokens, query_text: str) -> list[list[float]]:
        ids, word_pos = self.tokenizer.encode(tokens, query_text, self.cfg.max_len)
        h = self._encode_batch([ids])
        reps = h[0, torch.tensor(word_pos, dtype=torch.long)]
        probs = torch.softmax(self.bio_head(reps), dim=-1)
        return probs.tolist()

    # training-time forwards returning logits

    def sense_logits(self, id_lists: list[list[int]]) -> torch.Tensor:
        return self.sense_head(self._encode_batch(id_lists)[:, 0]).squeeze(-1)

    def role_logits(self, id_lists: list[list[int]]) -> torch.Tensor:
        return self.role_head(self._encode_batch(id_lists)[:, 0])

    def bio_logits(self, id_lists: list[list[int]], positions: list[list[int]]) -> list[torch.Tensor]:
        h = self._encode_batch(id_lists)
        return [
            self.bio_head(h[i, torch.tensor(p, dtype=torch.long)])
            for i, p in enumerate(positions)
        ]


def build_model(cfg: BridgeConfig) -> BridgeModel:
    """Fresh model, deterministic in cfg.seed; loads a checkpoint's encoder
    weights first when cfg.encoder is a path instead of "tiny"."""
    torch.manual_seed(cfg.seed)
    model = BridgeModel(cfg)
    if cfg.encoder != "tiny":
        donor_model, _ = load_checkpoint(cfg.encoder)
        own = model.state_dict()
        grafted = {
            k: v for k, v in donor_model.state_dict().items()
            if (k.startswith(("tok_emb", "pos_emb", "encoder", "norm"))
                and k in own and own[k].shape == v.shape)
        }
        if not grafted:
            raise BridgeError(f"{cfg.encoder}: no compatible encoder weights")
        own.update(grafted)
        model.load_state_dict(own)
    model.eval()
    return model


def save_checkpoint(path: str | Path, model: BridgeModel, stage: str,
                    losses: list[float], extra: dict | None = None) -> None:
    payload = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "stage": stage,
        "config": model.cfg.to_dict(),
        "state": model.state_dict(),
        "losses": list(losses),
    }
    payload.update(extra or {})
    torch.save(payload, str(path))


def load_checkpoint(path: str | Path) -> tuple[BridgeModel, dict]:
    try:
        payload = torch.load(str(path), map_location="cpu", weights_only=False)
    except (OSError, RuntimeError, EOFError, ValueError,
            pickle.UnpicklingError, zipfile.BadZipFile) as exc:
        raise BridgeError(f"cannot load checkpoint {path}: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format") != CHECKPOINT_FORMAT:
        raise BridgeError(f"{path} is not a bridge checkpoint")
    if payload.get("version") != CHECKPOINT_VERSION:
        raise BridgeError(f"{path}: unsupported checkpoint version {payload.get('version')!r}")
    cfg = config_from_dict(payload["config"])
    torch.manual_seed(cfg.seed)
    model = BridgeModel(cfg)
    model.load_state_dict(payload["state"])
    model.eval()
    return model, payload
