"classifier.py - `emphi train-classifier`: train the response intent classifier and label the dialogues."

from __future__ import annotations
from pathlib import Path
from typing import Any
import argparse

from rich.progress import Progress

from emphi.classifier.trainer import (
    encode_text,
    recognition_records,
    save_classifier,
    train_classifier,
    write_recognition,
)
from emphi.common.artifacts import file_sha256
from emphi.common.seeding import enable_determinism
from emphi.config import config_echo, require_paths
from emphi.corpus.dialogues import SPLITS
from emphi.corpus.intents import load_intent_corpus
from emphi.emphibase import ArtifactKind
from emphi.stages.stagebase import StageBase


class TrainClassifierStage(StageBase):

    STAGE_ID = "train-classifier"
    HELP = "Train the 9-way intent classifier, then cache its labels for every dialogue split."
    PRODUCES = (ArtifactKind.CLASSIFIER, ArtifactKind.RECOGNITION)

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--intents-file", type=Path, default=None, help="Labeled intent corpus.")
        parser.add_argument("--epochs", type=int, default=None, help="Maximum training epochs.")

    @classmethod
    def config_overrides(cls, args: argparse.Namespace) -> dict[str, Any]:
        overrides: dict[str, Any] = {}
        if getattr(args, "intents_file", None) is not None:
            overrides["paths"] = {"intents_file": args.intents_file}
        if getattr(args, "epochs", None) is not None:
            overrides["classifier"] = {"max_epochs": args.epochs}
        return overrides

    def run(self, args: argparse.Namespace) -> int:

        enable_determinism()
        require_paths(self.config, "intents_file")
        intents_file = self.config.paths.intents_file
        assert intents_file is not None

        vocab = self.load_vocab()
        corpus = load_intent_corpus(intents_file)
        settings = self.config.classifier

        with Progress(console=self.console, transient=True) as progress:
            task = progress.add_task("classifier", total=settings.max_epochs)

            def on_epoch(epoch: int, loss: float, accuracy: float) -> None:
                progress.update(task, completed=epoch, description=f"loss {loss:.3f} acc {accuracy:.3f}")

            model, report = train_classifier(corpus, vocab, settings, self.seed, on_epoch)

        save_classifier(
            self.classifier_dir,
            model,
            settings,
            {
                "stage": self.STAGE_ID,
                "seed": self.seed,
                "config": config_echo(self.config),
                "vocab_sha256": file_sha256(self.vocab_path),
                "corpus_sha256": file_sha256(intents_file),
                **report.to_dict(),
            },
        )

        for split in SPLITS:
            examples = self.load_split(split)
            sequences = [
                encode_text(vocab, example.response.text, settings.max_tokens) for example in examples
            ]
            write_recognition(self.recognition_path(split), recognition_records(model, sequences))
            self.log.info(f"Recognition labels cached for {len(examples)} {split} responses")

        self.console.print(
            f"held-out accuracy {report.held_out_accuracy:.4f} "
            f"(best epoch {report.best_epoch} of {report.epochs_run})"
        )
        return 0
