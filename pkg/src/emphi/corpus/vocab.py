"vocab.py - token <-> id bijection with reserved specials."

from __future__ import annotations
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Literal, Mapping, Sequence, overload

from emphi.common.artifacts import atomic_text_writer
from emphi.common.exceptions import VocabularyError

PAD = "<pad>"
UNK = "<unk>"
BOS = "<bos>"
EOS = "<eos>"
SEP = "<sep>"  # turn separator inside flattened contexts
SPECIALS: tuple[str, ...] = (PAD, UNK, BOS, EOS)


@dataclass(frozen=True)
class Vocabulary:
    """Immutable once built. Specials occupy ids 0-3 in the order PAD, UNK, BOS, EOS."""

    id_to_token: tuple[str, ...]
    frequencies: Mapping[str, int] = field(default_factory=lambda: MappingProxyType({}))
    token_to_id: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.id_to_token[: len(SPECIALS)] != SPECIALS:
            raise VocabularyError(f"vocabulary must start with {SPECIALS}")
        mapping = {token: idx for idx, token in enumerate(self.id_to_token)}
        if len(mapping) != len(self.id_to_token):
            raise VocabularyError("duplicate tokens in vocabulary")
        object.__setattr__(self, "token_to_id", MappingProxyType(mapping))
        object.__setattr__(self, "frequencies", MappingProxyType(dict(self.frequencies)))

    def __len__(self) -> int:
        return len(self.id_to_token)

    def __contains__(self, token: object) -> bool:
        return token in self.token_to_id

    @property
    def pad_id(self) -> int:
        return 0

    @property
    def unk_id(self) -> int:
        return 1

    @property
    def bos_id(self) -> int:
        return 2

    @property
    def eos_id(self) -> int:
        return 3

    def encode(self, tokens: Sequence[str]) -> list[int]:
        unk = self.unk_id
        return [self.token_to_id.get(token, unk) for token in tokens]

    def decode(self, ids: Sequence[int]) -> list[str]:
        """Exact inverse of `encode` on in-vocabulary ids. Specials are kept.

        Raises:
            VocabularyError: If an id is outside the vocabulary.
        """
        size = len(self.id_to_token)
        out: list[str] = []
        for idx in ids:
            if not 0 <= idx < size:
                raise VocabularyError(f"id {idx} outside vocabulary of size {size}")
            out.append(self.id_to_token[idx])
        return out

    def save(self, path: Path) -> None:
        """Specials header (4 lines), then `token<TAB>count` lines in id order."""

        with atomic_text_writer(path) as handle:
            for token in self.id_to_token[: len(SPECIALS)]:
                handle.write(token + "\n")
            for token in self.id_to_token[len(SPECIALS) :]:
                handle.write(f"{token}\t{self.frequencies.get(token, 0)}\n")

    @classmethod
    def load(cls, path: Path) -> Vocabulary:
        tokens: list[str] = []
        counts: dict[str, int] = {}
        with path.open(encoding="utf-8") as handle:
            for line_no, raw in enumerate(handle):
                line = raw.rstrip("\n")
                if line_no < len(SPECIALS):
                    tokens.append(line)
                    continue
                token, _, count = line.partition("\t")
                tokens.append(token)
                counts[token] = int(count) if count else 0
        return cls(tuple(tokens), counts)


def build_vocab(
    examples: Iterable[Sequence[str]],
    max_size: int,
    min_freq: int,
    reserved: Sequence[str] = (),
) -> Vocabulary:
    """Rank tokens by frequency (ties lexicographic), drop those under `min_freq`
    and truncate so the vocabulary, specials and `reserved` included, has at most
    `max_size` entries. `reserved` tokens follow the specials unconditionally."""

    if max_size <= len(SPECIALS):
        raise ValueError(f"max_size must exceed {len(SPECIALS)}, got {max_size}")

    counts: Counter[str] = Counter()
    for tokens in examples:
        counts.update(tokens)

    skip = set(SPECIALS) | set(reserved)
    ranked = sorted(
        ((token, count) for token, count in counts.items() if count >= min_freq and token not in skip),
        key=lambda item: (-item[1], item[0]),
    )
    room = max_size - len(SPECIALS) - len(reserved)
    kept = ranked[: max(room, 0)]

    id_to_token = SPECIALS + tuple(reserved) + tuple(token for token, _ in kept)
    frequencies = {token: counts.get(token, 0) for token in id_to_token[len(SPECIALS) :]}
    return Vocabulary(id_to_token, frequencies)


@overload
def map_tokens(vocab: Vocabulary, tokens: Sequence[str], direction: Literal["encode"]) -> list[int]: ...
@overload
def map_tokens(vocab: Vocabulary, tokens: Sequence[int], direction: Literal["decode"]) -> list[str]: ...
def map_tokens(
    vocab: Vocabulary,
    tokens: Sequence[str] | Sequence[int],
    direction: Literal["encode", "decode"],
) -> list[int] | list[str]:
    "Encode tokens to ids (unknown -> UNK) or decode ids back to tokens."

    if direction == "encode":
        return vocab.encode([str(token) for token in tokens])
    return vocab.decode([int(token) for token in tokens])
