import pytest

from rolecraft.errors import DataError, RoleUndefinedForSense
from rolecraft.frames import RoleLabel
from rolecraft.queries import (
    MarkedSequence,
    build_role_query,
    build_sense_options,
    mark_predicate,
    sense_question,
    unmark,
)


class TestMarking:
    def test_figure1_marked_sequence(self, figure1_instance):
        seq = mark_predicate(figure1_instance)
        assert list(seq.tokens) == [
            "The", "stock", "has", "been", "<p>", "beaten", "</p>",
            "down", "for", "two", "days", ".",
        ]
        assert seq.pred_index == 5

    def test_unmark_inverts(self, figure1_instance):
        seq = mark_predicate(figure1_instance)
        tokens, index = unmark(seq)
        assert list(tokens) == list(figure1_instance.sentence.tokens)
        assert index == figure1_instance.pred_index

    def test_malformed_sequences_rejected(self):
        with pytest.raises(ValueError):
            MarkedSequence(tokens=("a", "<p>", "b"), pred_index=2)  # no close
        with pytest.raises(ValueError):
            MarkedSequence(tokens=("<p>", "a", "</p>", "<p>", "b", "</p>"),
                           pred_index=1)  # two pairs
        with pytest.raises(ValueError):
            MarkedSequence(tokens=("a", "</p>", "<p>"), pred_index=2)  # reversed


class TestSenseOptions:
    def test_question_text_uses_surface_word(self, figure1_instance):
        assert sense_question(figure1_instance) == \
            "What is the sense of predicate beaten?"

    def test_three_options_in_inventory_order(self, beat_inventory, figure1_instance):
        options = build_sense_options(beat_inventory, figure1_instance)
        assert [o.sense_id for o in options] == ["beat.01", "beat.02", "beat.03"]
        assert options[1].option_text == "push, cause motion"

    def test_unresolved_lemma_rejected(self, beat_inventory, figure1_instance):
        import dataclasses
        bare = dataclasses.replace(figure1_instance, lemma=None)
        with pytest.raises(DataError):
            build_sense_options(beat_inventory, bare)


class TestRoleQueries:
    def test_core_template_exact(self, beat_inventory, figure1_instance):
        q = build_role_query(beat_inventory, figure1_instance, "beat.02",
                             RoleLabel(base="A1"))
        assert q.query_text == \
            "What are the A1 arguments of predicate beaten with meaning thing moving?"

    def test_modifier_template_exact(self, beat_inventory, figure1_instance):
        q = build_role_query(beat_inventory, figure1_instance, "beat.02",
                             RoleLabel(base="TMP"))
        assert q.query_text == "What are the time modifiers of predicate beaten?"

    def test_prefix_variants_share_one_query(self, beat_inventory, figure1_instance):
        plain = build_role_query(beat_inventory, figure1_instance, "beat.02",
                                 RoleLabel(base="A1"))
        for prefix in ("R", "C"):
            variant = build_role_query(beat_inventory, figure1_instance, "beat.02",
                                       RoleLabel(base="A1", prefix=prefix))
            assert variant.query_text == plain.query_text
            assert variant.role == RoleLabel(base="A1")

    def test_no_semantics_collapses_to_label(self, beat_inventory, figure1_instance):
        q = build_role_query(beat_inventory, figure1_instance, "beat.02",
                             RoleLabel(base="A1"), semantic=False)
        assert q.query_text == "A1"
        q = build_role_query(beat_inventory, figure1_instance, "beat.02",
                             RoleLabel(base="TMP"), semantic=False)
        assert q.query_text == "TMP"

    def test_undefined_role_raises(self, beat_inventory, figure1_instance):
        with pytest.raises(RoleUndefinedForSense):
            build_role_query(beat_inventory, figure1_instance, "beat.02",
                             RoleLabel(base="A0"))

    def test_queries_differ_between_senses(self, beat_inventory, figure1_instance):
        q1 = build_role_query(beat_inventory, figure1_instance, "beat.01",
                              RoleLabel(base="A1"))
        q2 = build_role_query(beat_inventory, figure1_instance, "beat.02",
                              RoleLabel(base="A1"))
        assert q1.query_text != q2.query_text  # sense semantics reach the query
