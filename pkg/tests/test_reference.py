import numpy as np
import pytest

from rolecraft.errors import ConfigError, DataError
from rolecraft.scoring.contracts import (
    BioScoreRequest,
    RoleScoreRequest,
    SenseScoreRequest,
    TAGS,
)
from rolecraft.scoring.reference import (
    ReferenceModel,
    ReferenceScorer,
    TrainConfig,
    load_model,
    save_model,
    train_reference,
)


MARKED = ("the", "<p>", "drummer", "</p>", "beat", "the", "drum")


def _sense_req():
    return SenseScoreRequest(tokens=MARKED, option_text="strike repeatedly")


def _role_req():
    return RoleScoreRequest(tokens=MARKED, roles=("A0", "A1"))


def _bio_req(query="What are the A0 arguments of predicate drummer with meaning x?"):
    return BioScoreRequest(tokens=MARKED, query_text=query, role="A0")


class TestUntrainedDefaults:
    def test_sense_is_half(self):
        assert ReferenceScorer(ReferenceModel()).score_sense_option(_sense_req()) == 0.5

    def test_roles_are_half(self):
        scores = ReferenceScorer(ReferenceModel()).score_role_presence(_role_req())
        assert scores == {"A0": 0.5, "A1": 0.5}

    def test_bio_is_uniform(self):
        rows = ReferenceScorer(ReferenceModel()).score_bio(_bio_req())
        assert rows.shape == (5, 7)
        assert np.allclose(rows, 1 / 7)

    def test_unknown_role_after_training_scores_half(self, synth):
        req = RoleScoreRequest(tokens=MARKED, roles=("A0", "ZZZ"))
        scores = synth.scorer.score_role_presence(req)
        assert scores["ZZZ"] == 0.5
        assert scores["A0"] != 0.5


class TestDeterminismAndPersistence:
    def test_same_request_same_answer(self, synth):
        req = _sense_req()
        assert synth.scorer.score_sense_option(req) == synth.scorer.score_sense_option(req)

    def test_save_load_round_trip(self, synth, tmp_path):
        path = tmp_path / "model.npz"
        save_model(synth.trained.model, path)
        loaded = ReferenceScorer(load_model(path))
        for req in (_sense_req(),):
            assert loaded.score_sense_option(req) == synth.scorer.score_sense_option(req)
        assert loaded.score_role_presence(_role_req()) == synth.scorer.score_role_presence(_role_req())
        assert np.array_equal(loaded.score_bio(_bio_req()),
                              synth.scorer.score_bio(_bio_req()))

    def test_save_path_is_exact(self, synth, tmp_path):
        # numpy's bare savez appends .npz; saving through a handle must not
        path = tmp_path / "model.bin"
        save_model(synth.trained.model, path)
        assert path.exists()
        assert not (tmp_path / "model.bin.npz").exists()

    def test_corrupt_file_is_a_data_error(self, tmp_path):
        path = tmp_path / "junk.npz"
        path.write_bytes(b"not a model at all")
        with pytest.raises(DataError):
            load_model(path)

    def test_missing_file_is_a_data_error(self, tmp_path):
        with pytest.raises(DataError):
            load_model(tmp_path / "missing.npz")

    def test_training_is_seed_deterministic(self, synth):
        hyper = TrainConfig(epochs=2, seed=5)
        a = train_reference(synth.train[:40], synth.inventory, "sense", hyper)
        b = train_reference(synth.train[:40], synth.inventory, "sense", hyper)
        assert a.losses == b.losses
        assert np.array_equal(a.model.sense_w, b.model.sense_w)


class TestTrainingSignal:
    def test_sense_loss_decreases(self, synth):
        res = train_reference(synth.train[:120], synth.inventory, "sense",
                              TrainConfig(epochs=6))
        assert res.losses[-1] < res.losses[0]

    def test_role_loss_decreases(self, synth):
        res = train_reference(synth.train[:120], synth.inventory, "role",
                              TrainConfig(epochs=6), role_universe=synth.universe)
        assert res.losses[-1] < res.losses[0]

    def test_bio_needs_role_sets(self, synth):
        with pytest.raises(ConfigError):
            train_reference(synth.train[:10], synth.inventory, "bio")

    def test_bio_role_sets_length_checked(self, synth):
        with pytest.raises(ConfigError):
            train_reference(synth.train[:10], synth.inventory, "bio",
                            role_sets=[("A0",)] * 3)

    def test_unknown_stage_rejected(self, synth):
        with pytest.raises(ConfigError):
            train_reference(synth.train[:5], synth.inventory, "span")

    def test_uncovered_gold_pairs_counted(self, synth):
        batch = synth.train[:30]
        sets, expected = [], 0
        for inst in batch:
            bases = sorted({a.label.base for a in inst.gold_args})
            sets.append((bases[0],) if bases else ())
            expected += max(0, len(bases) - 1)
        res = train_reference(batch, synth.inventory, "bio",
                              TrainConfig(epochs=1), role_sets=sets)
        assert res.uncovered_pairs == expected
        assert expected > 0

    def test_trained_sense_separates_options(self, synth):
        # the trained model should prefer the true description for a training
        # sentence over the competing sense of the same lemma
        inst = next(i for i in synth.train
                    if i.lemma == "beat" and i.gold_sense == "beat.01")
        from rolecraft.queries import build_sense_options, mark_predicate
        options = build_sense_options(synth.inventory, inst)
        tokens = tuple(mark_predicate(inst).tokens)
        scores = {
            o.sense_id: synth.scorer.score_sense_option(
                SenseScoreRequest(tokens=tokens, option_text=o.option_text))
            for o in options
        }
        assert max(scores, key=scores.get) == "beat.01"


class TestBioFeaturesUseQueryOnly:
    """The wire protocol carries no role name for BIO requests, so scores
    must depend on the query text alone; the role field is bookkeeping."""

    def test_role_field_does_not_change_rows(self, synth):
        q = "What are the A0 arguments of predicate beat with meaning striker?"
        a = synth.scorer.score_bio(BioScoreRequest(tokens=MARKED, query_text=q, role="A0"))
        b = synth.scorer.score_bio(BioScoreRequest(tokens=MARKED, query_text=q, role="A1"))
        assert np.array_equal(a, b)

    def test_different_queries_differ(self, synth):
        a = synth.scorer.score_bio(_bio_req(
            "What are the A0 arguments of predicate beat with meaning striker?"))
        b = synth.scorer.score_bio(_bio_req(
            "What are the A1 arguments of predicate beat with meaning thing struck?"))
        assert not np.array_equal(a, b)


class TestContracts:
    def test_rows_sum_to_one(self, synth):
        rows = synth.scorer.score_bio(_bio_req())
        assert np.allclose(rows.sum(axis=1), 1.0, atol=1e-6)

    def test_rows_align_to_word_count(self, synth):
        req = _bio_req()
        assert synth.scorer.score_bio(req).shape == (req.n_words, len(TAGS))

    def test_sense_score_in_unit_interval(self, synth):
        s = synth.scorer.score_sense_option(_sense_req())
        assert 0.0 <= s <= 1.0
