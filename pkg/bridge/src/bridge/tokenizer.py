"""Deterministic sub-word tokenizer with no vocabulary file.

Words split into fixed-width character chunks; continuation chunks carry a
"##" prefix so "beaten" -> ["beat", "##en"] never collides with the word
"en". Chunks map to ids by hashing into the configured table size, so any
input tokenizes without an out-of-vocabulary path. The first six ids are
reserved for structural tokens, including the predicate markers.
"""

from __future__ import annotations

import zlib

from bridge.errors import BridgeError

PAD, UNK, CLS, SEP, MARK_OPEN, MARK_CLOSE = range(6)
N_SPECIAL = 6
MARKERS = ("<p>", "</p>")
_CHUNK = 4


def word_pieces(word: str) -> list[str]:
    w = word.lower()
    if not w:
        return ["##empty"]
    out = [w[:_CHUNK]]
    for i in range(_CHUNK, len(w), _CHUNK):
        out.append("##" + w[i:i + _CHUNK])
    return out


class Tokenizer:
    def __init__(self, vocab_size: int, marker_policy: str = "special"):
        if vocab_size <= N_SPECIAL:
            raise BridgeError(f"vocab_size {vocab_size} leaves no room for pieces")
        self.vocab_size = vocab_size
        self.marker_policy = marker_policy

    def piece_id(self, piece: str) -> int:
        span = self.vocab_size - N_SPECIAL
        return N_SPECIAL + zlib.crc32(piece.encode("utf-8")) % span

    def text_ids(self, text: str) -> list[int]:
        ids: list[int] = []
        for word in text.split():
            ids.extend(self.piece_id(p) for p in word_pieces(word))
        return ids

    def sentence_ids(self, tokens: list[str] | tuple[str, ...]) -> tuple[list[int], list[int]]:
        """Ids for a marked token sequence plus, per non-marker token, the
        offset of its first sub-token within the returned list."""
        ids: list[int] = []
        word_pos: list[int] = []
        for tok in tokens:
            if self.marker_policy == "special" and tok in MARKERS:
                ids.append(MARK_OPEN if tok == MARKERS[0] else MARK_CLOSE)
                continue
            if tok in MARKERS:  # "text" policy: markers are ordinary words
                ids.extend(self.piece_id(p) for p in word_pieces(tok))
                continue
            word_pos.append(len(ids))
            ids.extend(self.piece_id(p) for p in word_pieces(tok))
        return ids, word_pos

    def encode(self, tokens, query: str | None, max_len: int) -> tuple[list[int], list[int]]:
        """Build [CLS] query [SEP] sentence [SEP] (query part optional).

        Returns (ids, word_positions); positions index into ids and cover
        every non-marker sentence token. The query is trimmed from its end
        to respect max_len; the sentence is never trimmed, because output
        rows must align to it.
        """
        sent_ids, rel_pos = self.sentence_ids(tokens)
        q_ids = self.text_ids(query) if query else []
        overhead = 2 if query else 1  # [SEP] count; [CLS] accounted below
        budget = max_len - 1 - overhead - len(sent_ids)
        if budget < 0:
            raise BridgeError(
                f"sentence needs {len(sent_ids)} sub-tokens, over the {max_len} limit"
            )
        q_ids = q_ids[:budget]
        ids = [CLS] + q_ids + [SEP] + sent_ids + [SEP] if query else [CLS] + sent_ids + [SEP]
        base = 2 + len(q_ids) if query else 1
        return ids, [base + p for p in rel_pos]
