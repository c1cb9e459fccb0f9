import pytest

from bridge.config import BridgeConfig

MARKED = ("today", "the", "team", "<p>", "routed", "</p>", "the", "cargo",
          "toward", "the", "harbor")
N_WORDS = len(MARKED) - 2

A0_QUERY = "What are the A0 arguments of predicate routed with meaning sender?"


def tiny_config(**overrides) -> BridgeConfig:
    base = dict(vocab_size=512, dim=16, layers=1, heads=2, ffn_dim=32,
                max_len=64, dropout=0.0, seed=3)
    base.update(overrides)
    return BridgeConfig(**base)


@pytest.fixture
def cfg():
    return tiny_config()
