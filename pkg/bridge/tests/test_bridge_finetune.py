"""Training behavior: batching, overfit oracles, loss curves, deterministic
resume, and failure messages."""

import random

import pytest
import torch

from bridge.data import QueryRecord
from bridge.errors import BridgeError
from bridge.finetune import _pack, finetune, role_universe
from bridge.model import load_checkpoint

from conftest import MARKED, tiny_config

A0_Q = "What are the A0 arguments of predicate routed with meaning sender?"
A1_Q = "What are the A1 arguments of predicate routed with meaning thing sent?"
TMP_Q = "What are the time modifiers of predicate routed?"


def make_record(i: int, flip: bool) -> QueryRecord:
    """Mirrors the exporter's record shape; role layout flips with `flip`."""
    ctx = "tonight" if flip else "today"
    tokens = (ctx,) + MARKED[1:]
    n = len(tokens) - 2
    a0 = ["O"] * n
    a1 = ["O"] * n
    a0[6 if flip else 4], a1[4 if flip else 6] = "B-N", "B-N"
    return QueryRecord(
        sent_id=f"s{i}", pred_index=3, tokens=tokens,
        sense_options=(("route.01", "send along a path"),
                       ("route.02", "plot a course on a map")),
        gold_sense="route.01",
        role_queries={"A0": A0_Q, "A1": A1_Q, "TMP": TMP_Q},
        bio_lanes=(("A0", A0_Q, tuple(a0)), ("A1", A1_Q, tuple(a1))),
    )


def corpus(n: int) -> list[QueryRecord]:
    return [make_record(i, flip=bool(i % 2)) for i in range(n)]


class TestPacking:
    def test_batches_respect_token_budget(self):
        rng = random.Random(0)
        for _ in range(50):
            encoded = [(list(range(rng.randint(1, 30))), 0)
                       for _ in range(rng.randint(1, 40))]
            limit = rng.randint(10, 60)
            batches = _pack(encoded, limit)
            for batch in batches:
                total = sum(len(ids) for ids, _ in batch)
                assert total <= limit or len(batch) == 1
            assert sorted(map(id, (e for b in batches for e in b))) == \
                sorted(map(id, encoded))

    def test_oversized_example_still_trains_alone(self):
        batches = _pack([(list(range(100)), 0)], 10)
        assert len(batches) == 1 and len(batches[0]) == 1


class TestOverfit:
    def test_bio_overfits_one_example(self, tmp_path):
        cfg = tiny_config(lr=1e-2, epochs=30, warmup=0.1)
        rec = corpus(1)[0]
        finetune("bio", [rec], cfg, tmp_path / "m.pt", negatives=0)
        model, _ = load_checkpoint(tmp_path / "m.pt")
        rows = model.bio_rows(rec.tokens, A0_Q)
        gold = rec.bio_lanes[0][2]
        tag_index = {"B-N": 0, "O": 6}
        for row, tag in zip(rows, gold):
            assert row[tag_index[tag]] >= 0.9

    def test_sense_overfits_one_example(self, tmp_path):
        cfg = tiny_config(lr=1e-2, epochs=30, warmup=0.1)
        rec = corpus(1)[0]
        finetune("sense", [rec], cfg, tmp_path / "m.pt")
        model, _ = load_checkpoint(tmp_path / "m.pt")
        assert model.sense_score(rec.tokens, "send along a path") >= 0.9
        assert model.sense_score(rec.tokens, "plot a course on a map") <= 0.2


class TestCurves:
    def test_loss_decreases_over_first_three_epochs(self, tmp_path):
        cfg = tiny_config(lr=3e-3, epochs=3)
        losses = finetune("bio", corpus(24), cfg, tmp_path / "m.pt", negatives=1)
        assert len(losses) == 3
        assert losses[0] > losses[1] > losses[2]

    def test_checkpoint_records_curve(self, tmp_path):
        cfg = tiny_config(lr=3e-3, epochs=2)
        losses = finetune("role", corpus(12), cfg, tmp_path / "m.pt")
        _, payload = load_checkpoint(tmp_path / "m.pt")
        assert payload["losses"] == losses
        assert payload["stage"] == "role"

    def test_role_universe_recorded(self, tmp_path):
        recs = corpus(8)
        assert role_universe(recs) == ("A0", "A1", "TMP")
        cfg = tiny_config(lr=3e-3, epochs=1)
        finetune("role", recs, cfg, tmp_path / "m.pt")
        model, _ = load_checkpoint(tmp_path / "m.pt")
        assert set(model.role_index) == {"A0", "A1", "TMP"}


class TestResume:
    def test_split_run_matches_single_run(self, tmp_path):
        recs = corpus(16)
        full_cfg = tiny_config(lr=3e-3, epochs=4)
        finetune("bio", recs, full_cfg, tmp_path / "full.pt", negatives=1)

        half_cfg = tiny_config(lr=3e-3, epochs=2)
        finetune("bio", recs, half_cfg, tmp_path / "half.pt", negatives=1)
        finetune("bio", recs, full_cfg, tmp_path / "resumed.pt", negatives=1,
                 resume=tmp_path / "half.pt")

        full, fp = load_checkpoint(tmp_path / "full.pt")
        resumed, rp = load_checkpoint(tmp_path / "resumed.pt")
        assert fp["losses"] == pytest.approx(rp["losses"])
        fs, rs = full.state_dict(), resumed.state_dict()
        for key in fs:
            assert torch.allclose(fs[key], rs[key]), key

    def test_resume_twice_is_identical(self, tmp_path):
        recs = corpus(12)
        finetune("sense", recs, tiny_config(lr=3e-3, epochs=1),
                 tmp_path / "base.pt")
        cfg = tiny_config(lr=3e-3, epochs=3)
        finetune("sense", recs, cfg, tmp_path / "a.pt", resume=tmp_path / "base.pt")
        finetune("sense", recs, cfg, tmp_path / "b.pt", resume=tmp_path / "base.pt")
        a, _ = load_checkpoint(tmp_path / "a.pt")
        b, _ = load_checkpoint(tmp_path / "b.pt")
        for key, val in a.state_dict().items():
            assert torch.equal(val, b.state_dict()[key]), key

    def test_resume_checks_stage(self, tmp_path):
        finetune("sense", corpus(4), tiny_config(lr=3e-3, epochs=1),
                 tmp_path / "s.pt")
        with pytest.raises(BridgeError, match="holds a 'sense' model"):
            finetune("bio", corpus(4), tiny_config(epochs=2),
                     tmp_path / "b.pt", resume=tmp_path / "s.pt")


class TestFailures:
    def test_unknown_stage(self, tmp_path):
        with pytest.raises(BridgeError, match="unknown stage"):
            finetune("span", corpus(2), tiny_config(), tmp_path / "m.pt")

    def test_empty_records(self, tmp_path):
        with pytest.raises(BridgeError, match="no training records"):
            finetune("sense", [], tiny_config(), tmp_path / "m.pt")

    def test_all_unlabeled(self, tmp_path):
        recs = [QueryRecord(
            sent_id="s", pred_index=3, tokens=MARKED, sense_options=(),
            gold_sense=None, role_queries={}, bio_lanes=(),
        )]
        with pytest.raises(BridgeError, match="no usable sense examples"):
            finetune("sense", recs, tiny_config(), tmp_path / "m.pt")

    def test_misaligned_lane_rejected(self, tmp_path):
        rec = corpus(1)[0]
        bad = QueryRecord(
            sent_id=rec.sent_id, pred_index=rec.pred_index, tokens=rec.tokens,
            sense_options=rec.sense_options, gold_sense=rec.gold_sense,
            role_queries=rec.role_queries,
            bio_lanes=(("A0", A0_Q, ("O", "B-N")),),
        )
        with pytest.raises(BridgeError, match="export and corpus disagree"):
            finetune("bio", [bad], tiny_config(epochs=1), tmp_path / "m.pt",
                     negatives=0)

    def test_oom_suggests_smaller_batch(self, tmp_path, monkeypatch):
        from bridge.model import BridgeModel

        def boom(self, *args, **kwargs):
            raise RuntimeError("DefaultCPUAllocator: not enough memory (out of memory)")

        monkeypatch.setattr(BridgeModel, "sense_logits", boom)
        with pytest.raises(BridgeError, match="tokens-per-batch"):
            finetune("sense", corpus(4), tiny_config(epochs=1), tmp_path / "m.pt")
