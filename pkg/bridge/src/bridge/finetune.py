"""Fine-tuning loops for the three heads.

Examples are packed into batches by sub-token count, Adam drives the
updates, and the learning rate warms up linearly over the configured
fraction of total steps then stays flat. One checkpoint holds one stage's
model; training logs loss per epoch and the checkpoint records the curve.
"""

from __future__ import annotations

import logging
import random
from pathlib import Path

import torch
from torch import nn

from bridge.config import BridgeConfig
from bridge.data import (
    QueryRecord, TAG_INDEX, bio_examples, check_tags, role_examples,
    sense_examples,
)
from bridge.errors import BridgeError
from bridge.model import BridgeModel, build_model, load_checkpoint, save_checkpoint

log = logging.getLogger("bridge.finetune")

STAGES = ("sense", "role", "bio")


def _pack(encoded: list, limit: int) -> list[list]:
    """Greedy batches holding at most `limit` sub-tokens; a single example
    over the limit still trains, alone."""
    order = sorted(range(len(encoded)), key=lambda i: len(encoded[i][0]))
    batches, current, load = [], [], 0
    for i in order:
        n = len(encoded[i][0])
        if current and load + n > limit:
            batches.append(current)
            current, load = [], 0
        current.append(encoded[i])
        load += n
    if current:
        batches.append(current)
    return batches


def _oom(exc: BaseException, cfg: BridgeConfig) -> BridgeError:
    return BridgeError(
        f"out of memory during training ({exc}); "
        f"retry with a smaller --tokens-per-batch (current {cfg.tokens_per_batch})"
    )


def _run_epochs(model: BridgeModel, batches: list[list], step_fn, cfg: BridgeConfig,
                start_epoch: int, opt_state=None, rng_state=None) -> tuple[list[float], dict]:
    opt = torch.optim.Adam(model.parameters(), lr=cfg.lr)
    if opt_state is not None:
        opt.load_state_dict(opt_state)
        for group in opt.param_groups:  # scheduler rebuilds from the base rate
            group["lr"] = cfg.lr
    total_steps = max(1, cfg.epochs * len(batches))
    warm = max(1, int(round(cfg.warmup * total_steps)))
    done = start_epoch * len(batches)  # resume continues the schedule in place
    sched = torch.optim.lr_scheduler.LambdaLR(
        opt, lambda step: min(1.0, (done + step + 1) / warm)
    )
    if rng_state is not None:
        torch.set_rng_state(rng_state["torch"])
        order_rng = random.Random()
        order_rng.setstate(rng_state["order"])
    else:
        torch.manual_seed(cfg.seed + 1)
        order_rng = random.Random(cfg.seed + 1)
    model.train()
    losses = []
    for epoch in range(start_epoch, cfg.epochs):
        order = list(range(len(batches)))
        order_rng.shuffle(order)
        total, count = 0.0, 0
        for bi in order:
            batch = batches[bi]
            opt.zero_grad()
            try:
                loss = step_fn(batch)
                loss.backward()
            except RuntimeError as exc:
                if "out of memory" in str(exc).lower():
                    raise _oom(exc, cfg) from exc
                raise
            except MemoryError as exc:
                raise _oom(exc, cfg) from exc
            opt.step()
            sched.step()
            total += loss.item() * len(batch)
            count += len(batch)
        losses.append(total / max(1, count))
        log.info("epoch %d loss %.6f", epoch + 1, losses[-1])
    model.eval()
    state = {
        "optimizer": opt.state_dict(),
        "rng": {"torch": torch.get_rng_state(), "order": order_rng.getstate()},
    }
    return losses, state


def _encode_sense(model: BridgeModel, records) -> list:
    out = []
    for tokens, option, label in sense_examples(records):
        ids, _ = model.tokenizer.encode(tokens, option, model.cfg.max_len)
        out.append((ids, label))
    return out


def _encode_role(model: BridgeModel, records) -> list:
    out = []
    for tokens, labels in role_examples(records):
        ids, _ = model.tokenizer.encode(tokens, None, model.cfg.max_len)
        out.append((ids, labels))
    return out


def _encode_bio(model: BridgeModel, records, role_sets, negatives, seed) -> list:
    out = []
    for tokens, query, tags in bio_examples(records, role_sets, negatives, seed):
        check_tags(tags, "bio lane")
        ids, pos = model.tokenizer.encode(tokens, query, model.cfg.max_len)
        if len(pos) != len(tags):
            raise BridgeError(
                f"lane has {len(tags)} tags for {len(pos)} words; export and corpus disagree"
            )
        out.append((ids, pos, tuple(TAG_INDEX[t] for t in tags)))
    return out


def role_universe(records) -> tuple[str, ...]:
    names = set()
    for rec in records:
        names.update(rec.role_queries)
    return tuple(sorted(names))


def finetune(stage: str, records: list[QueryRecord], cfg: BridgeConfig,
             out_path: str | Path, role_sets=None, negatives: int = 2,
             resume: str | Path | None = None) -> list[float]:
    """Train one stage's model from scratch or from a resume checkpoint;
    writes a checkpoint loadable by the server. Returns per-epoch losses."""
    if stage not in STAGES:
        raise BridgeError(f"unknown stage {stage!r}")
    if not records:
        raise BridgeError("no training records")

    start_epoch, opt_state, rng_state, prior_losses = 0, None, None, []
    if resume is not None:
        model, payload = load_checkpoint(resume)
        if payload.get("stage") != stage:
            raise BridgeError(
                f"{resume} holds a {payload.get('stage')!r} model, not {stage!r}"
            )
        # architecture comes from the checkpoint; training knobs from the caller
        cfg = BridgeConfig(**{
            **model.cfg.to_dict(),
            "lr": cfg.lr, "warmup": cfg.warmup, "epochs": cfg.epochs,
            "tokens_per_batch": cfg.tokens_per_batch,
        })
        model.cfg = cfg
        start_epoch = int(payload.get("epoch", 0))
        opt_state = payload.get("optimizer")
        rng_state = payload.get("rng")
        prior_losses = list(payload.get("losses", []))
    else:
        if stage == "role" and not cfg.roles:
            cfg = BridgeConfig(**{**cfg.to_dict(), "roles": role_universe(records)})
        model = build_model(cfg)

    bce = nn.BCEWithLogitsLoss()
    ce = nn.CrossEntropyLoss()

    if stage == "sense":
        encoded = _encode_sense(model, records)

        def step(batch):
            logits = model.sense_logits([ids for ids, _ in batch])
            target = torch.tensor([float(lab) for _, lab in batch])
            return bce(logits, target)

    elif stage == "role":
        encoded = _encode_role(model, records)
        index = model.role_index

        def step(batch):
            logits = model.role_logits([ids for ids, _ in batch])
            rows, cols, vals = [], [], []
            for i, (_, labels) in enumerate(batch):
                for name, present in labels.items():
                    if name in index:
                        rows.append(i)
                        cols.append(index[name])
                        vals.append(float(present))
            return bce(logits[rows, cols], torch.tensor(vals))

    else:
        encoded = _encode_bio(model, records, role_sets, negatives, cfg.seed)

        def step(batch):
            per_seq = model.bio_logits(
                [ids for ids, _, _ in batch], [pos for _, pos, _ in batch]
            )
            logits = torch.cat(per_seq, dim=0)
            target = torch.tensor(
                [t for _, _, tags in batch for t in tags], dtype=torch.long
            )
            return ce(logits, target)

    if not encoded:
        raise BridgeError(f"no usable {stage} examples (gold senses required)")
    batches = _pack(encoded, cfg.tokens_per_batch)
    losses, state = _run_epochs(
        model, batches, step, cfg, start_epoch, opt_state, rng_state
    )
    all_losses = prior_losses + losses
    save_checkpoint(out_path, model, stage, all_losses, {
        "epoch": cfg.epochs,
        "optimizer": state["optimizer"],
        "rng": state["rng"],
    })
    return all_losses
