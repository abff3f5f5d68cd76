"""Shared fixtures: a templated nine-intent corpus with disjoint keyword cores,
toy EmpatheticDialogues CSV splits built from it, and a small trained classifier."""

from __future__ import annotations
from pathlib import Path
from typing import Iterator

import pytest

from emphi.classifier.model import IntentClassifier
from emphi.classifier.trainer import train_classifier
from emphi.common.labels import Intent
from emphi.config import ClassifierConfig, ModelConfig
from emphi.corpus.intents import IntentExample
from emphi.corpus.tokenizer import tokenize
from emphi.corpus.vocab import SEP, Vocabulary, build_vocab
from emphi.keywords.extraction import KeywordTable, extract_keywords

CORES: dict[Intent, tuple[str, ...]] = {
    Intent.AGREEING: ("agree", "exactly", "absolutely", "correct"),
    Intent.ACKNOWLEDGING: ("understand", "noted", "gotcha", "makes"),
    Intent.ENCOURAGING: ("believe", "strong", "capable", "brave"),
    Intent.CONSOLING: ("okay", "fine", "pass", "alright"),
    Intent.SYMPATHIZING: ("sorry", "hear", "terrible", "awful"),
    Intent.SUGGESTING: ("try", "maybe", "consider", "perhaps"),
    Intent.QUESTIONING: ("really", "happened", "ask", "curious"),
    Intent.WISHING: ("hope", "luck", "wish", "best"),
    Intent.NEUTRAL: ("weather", "today", "cool", "nice"),
}
FILLERS = ("friend", "buddy", "pal", "mate")

SITUATIONS = (
    ("sad", "i lost my job last week"),
    ("joyful", "i got a new puppy yesterday"),
    ("afraid", "i heard a noise downstairs at night"),
    ("proud", "my daughter won the spelling contest"),
)


def template(intent: Intent, index: int) -> str:
    "Response `index` of `intent`: two core words and a shared filler."
    core = CORES[intent]
    return f"{core[index % 4]} {core[(index + 1) % 4]} {FILLERS[index % len(FILLERS)]}"


def synthetic_intents(per_class: int = 40) -> list[IntentExample]:
    return [
        IntentExample(text=template(intent, index), intent=intent)
        for index in range(per_class)
        for intent in Intent
    ]


def write_intents_csv(path: Path, examples: list[IntentExample]) -> Path:
    lines = ["utterance,label"] + [f"{example.text},{example.intent.label}" for example in examples]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


ED_HEADER = "conv_id,utterance_idx,context,prompt,speaker_idx,utterance,selfeval,tags"


def ed_rows(split: str, conversations: int) -> list[str]:
    """S,L,S,L conversations: situation, templated reply, follow-up, templated reply."""

    rows = [ED_HEADER]
    intents = list(Intent)
    for number in range(conversations):
        emotion, situation = SITUATIONS[number % len(SITUATIONS)]
        conv_id = f"hit:{split}_{number}"
        first = intents[number % 9]
        second = intents[(number + 4) % 9]
        turns = (
            situation,
            template(first, number),
            "it was a big deal for me",
            template(second, number + 1),
        )
        for idx, text in enumerate(turns, start=1):
            rows.append(f"{conv_id},{idx},{emotion},{situation},{idx % 2},{text.replace(',', '_comma_')},,")
    return rows


def write_ed_dir(root: Path, sizes: dict[str, int] | None = None) -> Path:
    sizes = sizes or {"train": 24, "valid": 6, "test": 6}
    root.mkdir(parents=True, exist_ok=True)
    for split, count in sizes.items():
        (root / f"{split}.csv").write_text("\n".join(ed_rows(split, count)) + "\n", encoding="utf-8")
    return root


def tiny_model_config(width: int = 16) -> ModelConfig:
    return ModelConfig(embedding_dim=width, hidden_size=width, latent_dim=8, ffn_hidden=width, num_layers=1)


def tiny_classifier_config(max_epochs: int = 40) -> ClassifierConfig:
    return ClassifierConfig(
        embedding_dim=16,
        hidden_size=16,
        head_hidden=16,
        learning_rate=1e-2,
        batch_size=16,
        max_epochs=max_epochs,
        patience=5,
    )


# ~ Fixtures ~ #


@pytest.fixture(scope="session")
def intent_corpus() -> list[IntentExample]:
    return synthetic_intents()


@pytest.fixture(scope="session")
def synthetic_vocab(intent_corpus: list[IntentExample]) -> Vocabulary:
    streams = [tokenize(example.text) for example in intent_corpus]
    streams.append(tokenize(" ".join(text for _, text in SITUATIONS)))
    streams.append(tokenize("it was a big deal for me"))
    return build_vocab(streams, max_size=1000, min_freq=1, reserved=(SEP,))


@pytest.fixture(scope="session")
def keyword_table(intent_corpus: list[IntentExample]) -> KeywordTable:
    return extract_keywords(intent_corpus, k=4)


@pytest.fixture(scope="session")
def trained_classifier(intent_corpus: list[IntentExample], synthetic_vocab: Vocabulary) -> IntentClassifier:
    model, _ = train_classifier(intent_corpus, synthetic_vocab, tiny_classifier_config(), seed=0)
    return model


@pytest.fixture
def ed_dir(tmp_path: Path) -> Path:
    return write_ed_dir(tmp_path / "ed")


@pytest.fixture
def intents_file(tmp_path: Path, intent_corpus: list[IntentExample]) -> Path:
    return write_intents_csv(tmp_path / "intents.csv", intent_corpus)


@pytest.fixture
def tiny_config_file(tmp_path: Path) -> Iterator[Path]:
    path = tmp_path / "emphi.toml"
    path.write_text(
        """
seed = 3

[corpus]
vocab_min_freq = 1

[keywords]
k = 4

[classifier]
embedding_dim = 16
hidden_size = 16
head_hidden = 16
learning_rate = 0.01
max_epochs = 4

[model]
embedding_dim = 16
hidden_size = 16
latent_dim = 8
ffn_hidden = 16
num_layers = 1

[training]
learning_rate = 0.005
batch_size = 8
max_epochs = 2

[evaluation]
samples = 2
max_len = 6
""",
        encoding="utf-8",
    )
    yield path
