"""dialogues.py - EmpatheticDialogues ingestion and the normalized record format.

Raw CSV quirks stay inside `load_dialogues`; everything downstream reads the
normalized JSON-lines files written by `write_normalized`."""

# python standard library imports
from __future__ import annotations
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Literal, Sequence
import csv
import logging

# python 3rd party
import pandas as pd

# Local imports
from emphi.common.artifacts import read_jsonl, write_jsonl
from emphi.common.exceptions import CorpusError
from emphi.common.labels import EMOTION_NAMES, emotion_id
from emphi.corpus.tokenizer import tokenize
from emphi.corpus.vocab import SEP

logger = logging.getLogger(__name__)

Split = Literal["train", "valid", "test"]
SPLITS: tuple[Split, ...] = ("train", "valid", "test")
Speaker = Literal["speaker", "listener"]

ED_COLUMNS = ["conv_id", "utterance_idx", "context", "prompt", "speaker_idx", "utterance"]
_ED_FIELD_COUNT = 8  # conv_id .. tags


@dataclass(frozen=True)
class Utterance:
    speaker: Speaker
    text: str
    tokens: tuple[str, ...]

    @classmethod
    def from_text(cls, speaker: Speaker, text: str) -> Utterance:
        return cls(speaker=speaker, text=text, tokens=tuple(tokenize(text)))


@dataclass(frozen=True)
class DialogueExample:
    """One listener turn with every preceding turn as context."""

    context: tuple[Utterance, ...]
    response: Utterance
    emotion: str
    conversation_id: str

    @property
    def emotion_id(self) -> int:
        return emotion_id(self.emotion)

    def to_record(self) -> dict[str, Any]:
        return {
            "context": [utt.text for utt in self.context],
            "response": self.response.text,
            "emotion": self.emotion,
            "conv_id": self.conversation_id,
        }

    @classmethod
    def from_record(cls, record: dict[str, Any]) -> DialogueExample:
        """Rebuild from a normalized record. Context turns alternate back from a
        speaker-side final turn."""

        texts: list[str] = list(record["context"])
        context: list[Utterance] = []
        for offset, text in enumerate(texts):
            from_end = len(texts) - 1 - offset
            speaker: Speaker = "speaker" if from_end % 2 == 0 else "listener"
            context.append(Utterance.from_text(speaker, text))
        return cls(
            context=tuple(context),
            response=Utterance.from_text("listener", record["response"]),
            emotion=record["emotion"],
            conversation_id=record["conv_id"],
        )


def _clean(text: str) -> str:
    return text.replace("_comma_", ",").strip()


def load_dialogues(path: Path, split: Split) -> list[DialogueExample]:
    """Read `<path>/<split>.csv` in the published EmpatheticDialogues layout.

    Utterances are grouped by conv_id and ordered by utterance_idx. Odd indices
    are the speaker, even indices the listener; each listener turn becomes one
    example. Malformed rows are skipped and counted in a warning.

    Raises:
        FileNotFoundError: If the split file does not exist.
    """

    csv_path = path / f"{split}.csv"
    if not csv_path.exists():
        raise FileNotFoundError(f"EmpatheticDialogues split file not found: {csv_path}")

    malformed = 0

    def _bad_line(fields: list[str]) -> list[str] | None:
        nonlocal malformed
        malformed += 1
        return None

    frame = pd.read_csv(
        csv_path,
        engine="python",
        dtype=str,
        quoting=csv.QUOTE_NONE,
        keep_default_na=False,
        on_bad_lines=_bad_line,
        usecols=lambda column: column in ED_COLUMNS,
    )
    missing = set(ED_COLUMNS) - set(frame.columns)
    if missing:
        raise CorpusError(f"{csv_path} lacks columns {sorted(missing)}")
    frame = frame.fillna("")

    frame["utterance_idx"] = pd.to_numeric(frame["utterance_idx"], errors="coerce")
    frame["context"] = frame["context"].str.strip().str.lower()
    bad = frame["utterance_idx"].isna() | (frame["utterance"].str.strip() == "")
    bad |= ~frame["context"].isin(EMOTION_NAMES)
    malformed += int(bad.sum())
    frame = frame[~bad]

    if malformed:
        logger.warning(f"{csv_path.name}: skipped {malformed} malformed rows")

    examples: list[DialogueExample] = []
    # sort=False keeps file order of conversations, so loads are deterministic
    for conv_id, group in frame.groupby("conv_id", sort=False):
        rows = group.sort_values("utterance_idx", kind="stable")
        turns: list[Utterance] = []
        for row in rows.itertuples(index=False):
            speaker: Speaker = "speaker" if int(row.utterance_idx) % 2 == 1 else "listener"
            turns.append(Utterance.from_text(speaker, _clean(str(row.utterance))))
        emotion = str(rows["context"].iloc[0])
        for position, turn in enumerate(turns):
            if turn.speaker != "listener" or position == 0:
                continue
            if turns[position - 1].speaker != "speaker":
                continue
            examples.append(
                DialogueExample(
                    context=tuple(turns[:position]),
                    response=turn,
                    emotion=emotion,
                    conversation_id=str(conv_id),
                )
            )

    logger.info(f"Loaded {len(examples)} {split} examples from {csv_path}")
    return examples


def write_normalized(path: Path, examples: Sequence[DialogueExample]) -> None:
    "One JSON record per line: {context: [..], response, emotion, conv_id}."
    write_jsonl(path, [example.to_record() for example in examples])


def read_normalized(path: Path) -> list[DialogueExample]:
    return [DialogueExample.from_record(record) for record in read_jsonl(path)]


def flatten_context(context: Sequence[Utterance], max_tokens: int) -> list[str]:
    """All context turns as one token stream, SEP between turns, keeping the
    most recent `max_tokens` tokens. A cut never leaves a leading SEP."""

    stream: list[str] = []
    for position, utterance in enumerate(context):
        if position:
            stream.append(SEP)
        stream.extend(utterance.tokens)
    kept = stream[-max_tokens:]
    while kept and kept[0] == SEP:
        kept = kept[1:]
    return kept


def truncate_response(tokens: Sequence[str], max_tokens: int) -> list[str]:
    return list(tokens[:max_tokens])


def vocab_streams(examples: Sequence[DialogueExample], max_response_tokens: int) -> list[tuple[str, ...]]:
    """Every utterance of every conversation exactly once, keyed by
    (conversation, turn). Listener turns are counted as truncated responses."""

    turns: dict[tuple[str, int], tuple[str, ...]] = {}
    for example in examples:
        for position, utterance in enumerate(example.context):
            turns.setdefault((example.conversation_id, position), utterance.tokens)
        response = tuple(truncate_response(example.response.tokens, max_response_tokens))
        turns[(example.conversation_id, len(example.context))] = response
    return list(turns.values())
