"prepare.py - `emphi prepare-data`: normalize EmpatheticDialogues and build the vocabulary."

from __future__ import annotations
import argparse

from emphi.classifier.trainer import encode_text, recognition_records, write_recognition
from emphi.common.artifacts import file_sha256, write_manifest
from emphi.common.exceptions import CorpusError
from emphi.config import require_paths
from emphi.corpus.dialogues import (
    SPLITS,
    DialogueExample,
    load_dialogues,
    vocab_streams,
    write_normalized,
)
from emphi.corpus.vocab import SEP, Vocabulary, build_vocab
from emphi.emphibase import ArtifactKind
from emphi.stages.stagebase import StageBase


def check_disjoint(splits: dict[str, list[DialogueExample]]) -> None:
    """Raises:
    CorpusError: If a conversation id occurs in more than one split."""

    seen: dict[str, str] = {}
    for split, examples in splits.items():
        for conv_id in {example.conversation_id for example in examples}:
            if conv_id in seen:
                raise CorpusError(f"conversation {conv_id} appears in both {seen[conv_id]} and {split}")
            seen[conv_id] = split


class PrepareDataStage(StageBase):

    STAGE_ID = "prepare-data"
    HELP = "Normalize the EmpatheticDialogues splits, build the vocabulary, cache recognition labels."
    PRODUCES = (ArtifactKind.DATASET, ArtifactKind.VOCABULARY, ArtifactKind.RECOGNITION)

    def run(self, args: argparse.Namespace) -> int:

        require_paths(self.config, "data_dir")
        data_dir = self.config.paths.data_dir
        assert data_dir is not None

        splits = {split: load_dialogues(data_dir, split) for split in SPLITS}
        check_disjoint(splits)
        for split, examples in splits.items():
            write_normalized(self.split_path(split), examples)

        corpus = self.config.corpus
        streams = vocab_streams(splits["train"], corpus.max_response_tokens)
        vocab = build_vocab(streams, corpus.vocab_max_size, corpus.vocab_min_freq, reserved=(SEP,))
        vocab.save(self.vocab_path)
        self.log.info(f"Vocabulary of {len(vocab)} tokens written to {self.vocab_path}")

        refreshed = self._refresh_recognition(vocab, splits)

        write_manifest(
            self.data_dir / "manifest.json",
            {
                "stage": self.STAGE_ID,
                "examples": {split: len(examples) for split, examples in splits.items()},
                "splits_sha256": {split: file_sha256(self.split_path(split)) for split in SPLITS},
                "vocab_size": len(vocab),
                "vocab_sha256": file_sha256(self.vocab_path),
                "recognition_cached": refreshed,
                "corpus": self.config.corpus.model_dump(),
            },
        )
        self.console.print(
            f"prepared {', '.join(f'{split}={len(splits[split])}' for split in SPLITS)} "
            f"examples; vocabulary size {len(vocab)}"
        )
        return 0

    def _refresh_recognition(self, vocab: Vocabulary, splits: dict[str, list[DialogueExample]]) -> bool:
        "Relabel every split when a classifier already exists; otherwise `train-classifier` does it."

        if not (self.classifier_dir / "classifier.pt").exists():
            self.log.info("No classifier yet; recognition labels will be cached by train-classifier")
            return False
        classifier = self.load_classifier()
        if classifier.vocab_size != len(vocab):
            self.log.warning("Classifier was trained on a different vocabulary; rerun train-classifier")
            return False
        max_tokens = self.config.classifier.max_tokens
        for split, examples in splits.items():
            sequences = [encode_text(vocab, example.response.text, max_tokens) for example in examples]
            write_recognition(self.recognition_path(split), recognition_records(classifier, sequences))
        return True
