"intents.py - EmpatheticIntents labeled responses."

from __future__ import annotations
from dataclasses import dataclass
from pathlib import Path
import logging

import pandas as pd

from emphi.common.exceptions import CorpusError
from emphi.common.labels import INTENT_NAMES, Intent

logger = logging.getLogger(__name__)

TEXT_COLUMNS = ("utterance", "text", "response")
LABEL_COLUMNS = ("label", "intent", "class")


@dataclass(frozen=True)
class IntentExample:
    text: str
    intent: Intent

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise CorpusError("intent example with empty text")


def _pick_column(columns: list[str], candidates: tuple[str, ...], path: Path) -> str:
    lowered = {column.strip().lower(): column for column in columns}
    for name in candidates:
        if name in lowered:
            return lowered[name]
    raise CorpusError(f"{path} has none of the columns {list(candidates)}; found {columns}")


def load_intent_corpus(path: Path) -> list[IntentExample]:
    """Read a labeled-response file (CSV, or TSV when the suffix is .tsv/.txt).

    Labels are matched case-insensitively against the nine intent names.
    Duplicate texts are kept as they are.

    Raises:
        FileNotFoundError: If the file does not exist.
        CorpusError: On an unknown label (the value is named), an empty file,
            or when any of the nine intents has no example.
    """

    if not path.exists():
        raise FileNotFoundError(f"intent corpus not found: {path}")

    sep = "\t" if path.suffix.lower() in (".tsv", ".txt") else ","
    frame = pd.read_csv(path, sep=sep, dtype=str, keep_default_na=False)
    columns = [str(column) for column in frame.columns]
    text_col = _pick_column(columns, TEXT_COLUMNS, path)
    label_col = _pick_column(columns, LABEL_COLUMNS, path)

    examples: list[IntentExample] = []
    skipped = 0
    for row_no, (text, label) in enumerate(zip(frame[text_col], frame[label_col]), start=2):
        try:
            intent = Intent.from_name(str(label))
        except ValueError:
            raise CorpusError(
                f"{path}:{row_no}: unknown intent label {label!r}; expected one of {', '.join(INTENT_NAMES)}"
            ) from None
        text = str(text).replace("_comma_", ",").strip()
        if not text:
            skipped += 1
            continue
        examples.append(IntentExample(text=text, intent=intent))

    if skipped:
        logger.warning(f"{path.name}: skipped {skipped} rows with empty text")
    if not examples:
        raise CorpusError(f"{path} contains no labeled responses")

    present = {example.intent for example in examples}
    missing = [intent.label for intent in Intent if intent not in present]
    if missing:
        raise CorpusError(f"{path} has no examples for intents: {', '.join(missing)}")

    counts = pd.Series([example.intent.label for example in examples]).value_counts()
    if counts.nunique() > 1:
        logger.info(f"{path.name}: class counts are unbalanced: {counts.to_dict()}")
    logger.info(f"Loaded {len(examples)} intent examples from {path}")
    return examples
