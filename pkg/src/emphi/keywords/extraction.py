"""extraction.py - per-intent TF-IDF keywords and keyword-membership queries.

Each intent's responses are concatenated into one document (nine documents in
total) and every token is scored with

    tf  = count / document length
    idf = ln(9 / (1 + documents containing the token)) + 1

The top `k` tokens of each document form that intent's keyword list."""

# python standard library imports
from __future__ import annotations
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Collection, Iterable, Literal, Sequence
import logging

# python 3rd party
import numpy as np
import numpy.typing as npt
from sklearn.feature_extraction.text import CountVectorizer

# Local imports
from emphi.common.artifacts import atomic_text_writer
from emphi.common.exceptions import CorpusError
from emphi.common.labels import NUM_INTENTS, Intent
from emphi.corpus.intents import IntentExample
from emphi.corpus.tokenizer import tokenize
from emphi.keywords.stopwords import STOPWORDS

logger = logging.getLogger(__name__)

KeywordMode = Literal["intent", "union"]


@dataclass(frozen=True)
class KeywordTable:
    """Nine ranked keyword lists, one per intent, in intent-id order."""

    k: int
    entries: tuple[tuple[tuple[str, float], ...], ...]
    _members: tuple[frozenset[str], ...] = field(init=False, repr=False, compare=False)
    _union: frozenset[str] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.entries) != NUM_INTENTS:
            raise ValueError(f"keyword table needs {NUM_INTENTS} lists, got {len(self.entries)}")
        members = tuple(frozenset(token for token, _ in ranked) for ranked in self.entries)
        object.__setattr__(self, "_members", members)
        object.__setattr__(self, "_union", frozenset().union(*members))

    def keywords(self, intent: Intent | int) -> list[str]:
        return [token for token, _ in self.entries[int(intent)]]

    def members(self, intent: Intent | int) -> frozenset[str]:
        return self._members[int(intent)]

    @property
    def union(self) -> frozenset[str]:
        return self._union

    def top(self, intent: Intent | int, n: int = 10) -> list[str]:
        return self.keywords(intent)[:n]

    # ~ Persistence ~ #

    def save(self, path: Path) -> None:
        """One block per intent: a `# intent: <Name>` header, then ranked
        `token score` lines, blank line between blocks."""

        with atomic_text_writer(path) as handle:
            handle.write(f"# k: {self.k}\n\n")
            for intent in Intent:
                handle.write(f"# intent: {intent.label}\n")
                for token, score in self.entries[intent]:
                    handle.write(f"{token} {score:.8f}\n")
                handle.write("\n")

    @classmethod
    def load(cls, path: Path) -> KeywordTable:
        k = 0
        blocks: dict[Intent, list[tuple[str, float]]] = {}
        current: Intent | None = None
        with path.open(encoding="utf-8") as handle:
            for line_no, raw in enumerate(handle, start=1):
                line = raw.strip()
                if not line:
                    continue
                if line.startswith("# k:"):
                    k = int(line.split(":", 1)[1])
                elif line.startswith("# intent:"):
                    try:
                        current = Intent.from_name(line.split(":", 1)[1])
                    except ValueError as error:
                        raise CorpusError(f"{path}:{line_no}: {error}") from None
                    blocks[current] = []
                elif current is None:
                    raise CorpusError(f"{path}:{line_no}: keyword line outside an intent block")
                else:
                    token, _, score = line.rpartition(" ")
                    blocks[current].append((token, float(score)))

        missing = [intent.label for intent in Intent if intent not in blocks]
        if missing:
            raise CorpusError(f"{path} lacks keyword blocks for: {', '.join(missing)}")
        entries = tuple(tuple(blocks[intent]) for intent in Intent)
        return cls(k=k or max(len(ranked) for ranked in entries), entries=entries)


def keyword_membership(table: KeywordTable, token: str, intent: Intent | int) -> bool:
    "True iff `token` is in the keyword list of `intent`."
    return token in table.members(intent)


def copy_targets(
    table: KeywordTable,
    tokens: Sequence[str],
    intent: Intent | int,
    mode: KeywordMode = "intent",
) -> list[bool]:
    """Per-token copy supervision: keyword of the given intent, or of any intent
    in "union" mode."""

    members = table.union if mode == "union" else table.members(intent)
    return [token in members for token in tokens]


def _analyzer(stopwords: Collection[str]) -> Callable[[str], list[str]]:
    stop = frozenset(word.lower() for word in stopwords)

    def analyze(document: str) -> list[str]:
        return [token for token in tokenize(document) if token.isalpha() and token not in stop]

    return analyze


def extract_keywords(
    corpus: Iterable[IntentExample],
    k: int,
    stopwords: Collection[str] = STOPWORDS,
) -> KeywordTable:
    """Top-`k` TF-IDF keywords per intent.

    Ties in score are broken lexicographically; tokens scoring zero are never kept.

    Raises:
        ValueError: If k < 1.
        CorpusError: If an intent has no examples, or no tokens survive
            stop-word removal for some intent.
    """

    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")

    grouped: dict[Intent, list[str]] = {intent: [] for intent in Intent}
    for example in corpus:
        grouped[example.intent].append(example.text)

    empty = [intent.label for intent, texts in grouped.items() if not texts]
    if empty:
        raise CorpusError(f"no responses for intents: {', '.join(empty)}")

    analyze = _analyzer(stopwords)
    documents = [" ".join(grouped[intent]) for intent in Intent]
    hollow = [intent.label for intent, document in zip(Intent, documents) if not analyze(document)]
    if hollow:
        raise CorpusError(f"no tokens left after stop-word removal for intents: {', '.join(hollow)}")

    vectorizer = CountVectorizer(analyzer=analyze, lowercase=False)
    counts = vectorizer.fit_transform(documents).toarray().astype(np.float64)
    vocabulary = vectorizer.get_feature_names_out()

    lengths = counts.sum(axis=1, keepdims=True)
    tf = counts / lengths
    df = (counts > 0).sum(axis=0)
    idf = np.log(NUM_INTENTS / (1.0 + df)) + 1.0
    scores = tf * idf

    entries: list[tuple[tuple[str, float], ...]] = []
    for intent in Intent:
        row = scores[intent]
        ranked = sorted(
            ((str(vocabulary[col]), float(row[col])) for col in np.flatnonzero(row > 0)),
            key=lambda item: (-item[1], item[0]),
        )
        entries.append(tuple(ranked[:k]))
        if len(ranked) < k:
            logger.warning(f"{intent.label}: only {len(ranked)} keywords available for k={k}")

    table = KeywordTable(k=k, entries=tuple(entries))
    logger.info(f"Extracted keyword table with k={k} over {len(vocabulary)} distinct tokens")
    return table


def relative_frequencies(
    corpus: Iterable[IntentExample], stopwords: Collection[str] = STOPWORDS
) -> tuple[list[str], npt.NDArray[np.float64]]:
    """Per-intent relative token frequencies, as `(vocabulary, matrix)` with one
    row per intent. Used to check that keywords are discriminative."""

    grouped: dict[Intent, list[str]] = {intent: [] for intent in Intent}
    for example in corpus:
        grouped[example.intent].append(example.text)
    vectorizer = CountVectorizer(analyzer=_analyzer(stopwords), lowercase=False)
    counts = vectorizer.fit_transform([" ".join(grouped[intent]) for intent in Intent]).toarray()
    totals = np.maximum(counts.sum(axis=1, keepdims=True), 1)
    return list(vectorizer.get_feature_names_out()), counts / totals


def is_discriminative(table: KeywordTable, corpus: Sequence[IntentExample]) -> bool:
    """Every keyword of intent z is at least as frequent (relatively) in z's
    document as on average in the other eight."""

    vocabulary, freqs = relative_frequencies(corpus)
    column = {token: idx for idx, token in enumerate(vocabulary)}
    for intent in Intent:
        others = [other for other in range(NUM_INTENTS) if other != intent]
        for token in table.keywords(intent):
            col = column[token]
            own = freqs[intent, col]
            if own + 1e-12 < float(np.mean(freqs[others, col])):
                return False
    return True


def format_top(table: KeywordTable, n: int = 10) -> list[tuple[str, str]]:
    "Rows of (intent name, comma-joined top-n keywords) for display."
    return [(intent.label, ", ".join(table.top(intent, n))) for intent in Intent]


__all__ = [
    "KeywordTable",
    "KeywordMode",
    "extract_keywords",
    "keyword_membership",
    "copy_targets",
    "is_discriminative",
    "format_top",
]
