import dataclasses
from pathlib import Path

import pytest

from rolecraft.corpus import instances_of, resolve_lemma, read_corpus
from rolecraft.frames import ingest_frames
from rolecraft.pipeline import train_all
from rolecraft.scoring.reference import ReferenceScorer
from rolecraft.scoring.scripted import ScriptedScorer
from rolecraft.synth import ROLE_UNIVERSE, build_inventory, standard_splits

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def beat_inventory():
    return ingest_frames(DATA / "frames" / "beat.xml")


@pytest.fixture()
def figure1_instance(beat_inventory):
    instances = read_corpus(DATA / "figure1.jsonl")
    assert len(instances) == 1
    inst = instances[0]
    lemma = resolve_lemma(beat_inventory.lemmas(), inst.predicate_word, inst.lemma)
    return dataclasses.replace(inst, lemma=lemma)


@pytest.fixture()
def figure1_scorer():
    return ScriptedScorer.from_file(DATA / "figure1_scorer.json")


def _resolve_all(inv, instances):
    lemmas = inv.lemmas()
    return [
        dataclasses.replace(i, lemma=resolve_lemma(lemmas, i.predicate_word, i.lemma))
        for i in instances
    ]


class SynthSetup:
    """Synthetic corpus splits plus a reference scorer trained once per run."""

    def __init__(self):
        self.inventory = build_inventory()
        train_s, dev_s, test_s = standard_splits(7, (500, 100, 100))
        self.train_sentences = train_s
        self.dev_sentences = dev_s
        self.test_sentences = test_s
        self.train = _resolve_all(self.inventory, instances_of(train_s))
        self.dev = _resolve_all(self.inventory, instances_of(dev_s))
        self.test = _resolve_all(self.inventory, instances_of(test_s))
        self.universe = ROLE_UNIVERSE
        self.trained = train_all(self.train, self.inventory, self.universe, lam=3.0)
        self.scorer = ReferenceScorer(self.trained.model)


@pytest.fixture(scope="session")
def synth():
    return SynthSetup()
