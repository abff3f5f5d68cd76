"training.py - `emphi train`: fit the generator (or one of its ablations)."

from __future__ import annotations
from pathlib import Path
from typing import Any
import argparse

from rich.progress import Progress

from emphi.classifier.trainer import read_recognition
from emphi.common.artifacts import file_sha256
from emphi.common.labels import Intent
from emphi.common.seeding import enable_determinism, seed_module_init
from emphi.config import config_echo
from emphi.corpus.dialogues import Split
from emphi.corpus.vocab import Vocabulary
from emphi.emphibase import ArtifactKind
from emphi.keywords.extraction import KeywordTable
from emphi.model.checkpoint import TRAIN_LOG_NAME, model_dir, save_model
from emphi.model.embeddings import load_pretrained_vectors
from emphi.model.network import EmphiModel
from emphi.stages.stagebase import StageBase, add_ablation_argument, ablation_overrides
from emphi.training.batching import DialogueDataset, encode_examples
from emphi.training.trainer import EpochRecord, train


def keyword_ids(table: KeywordTable, vocab: Vocabulary) -> list[list[int]]:
    "Per-intent vocabulary ids of the in-vocabulary keywords."
    return [
        [vocab.token_to_id[token] for token in table.keywords(intent) if token in vocab] for intent in Intent
    ]


class TrainStage(StageBase):

    STAGE_ID = "train"
    HELP = "Train the EmpHi generator with the weighted four-term objective."
    PRODUCES = (ArtifactKind.MODEL,)

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        add_ablation_argument(parser)
        parser.add_argument("--epochs", type=int, default=None, help="Maximum training epochs.")
        parser.add_argument("--vectors-file", type=Path, default=None, help="Pretrained word vectors.")

    @classmethod
    def config_overrides(cls, args: argparse.Namespace) -> dict[str, Any]:
        overrides = ablation_overrides(args)
        if getattr(args, "epochs", None) is not None:
            overrides.setdefault("training", {})["max_epochs"] = args.epochs
        if getattr(args, "vectors_file", None) is not None:
            overrides["paths"] = {"vectors_file": args.vectors_file}
        return overrides

    def _dataset(self, split: Split, vocab: Vocabulary, keywords: KeywordTable) -> DialogueDataset:
        examples = self.load_split(split)
        probs, intents = read_recognition(self.recognition_path(split))
        corpus = self.config.corpus
        return DialogueDataset(
            encode_examples(
                examples,
                vocab,
                keywords,
                probs,
                intents,
                corpus.max_context_tokens,
                corpus.max_response_tokens,
                self.config.keywords.mode,
            )
        )

    def run(self, args: argparse.Namespace) -> int:

        enable_determinism()
        vocab = self.load_vocab()
        keywords = self.load_keywords()
        train_set = self._dataset("train", vocab, keywords)
        valid_set = self._dataset("valid", vocab, keywords)

        settings = self.config.training
        ablations = settings.ablations
        seed_module_init(self.seed, "model_init")
        model = EmphiModel(len(vocab), self.config.model, ablations, pad_id=vocab.pad_id)
        if self.config.model.copy_mask:
            model.set_keyword_mask(keyword_ids(keywords, vocab))
        vectors = self.config.paths.vectors_file
        if vectors is not None:
            load_pretrained_vectors(vectors, vocab, model.embedding)

        directory = model_dir(self.work_dir, ablations)
        self.log.info(
            f"Training {directory.name} on {len(train_set)} examples "
            f"(valid {len(valid_set)}), weights {settings.effective_loss_weights}"
        )

        with Progress(console=self.console, transient=True) as progress:
            task = progress.add_task("train", total=settings.max_epochs)

            def on_epoch(record: EpochRecord) -> None:
                progress.update(
                    task,
                    completed=record.epoch,
                    description=f"total {record.train.total:.3f} valid {record.valid_total:.3f}",
                )

            result = train(
                model,
                train_set,
                valid_set,
                vocab,
                settings,
                self.seed,
                log_path=directory / TRAIN_LOG_NAME,
                on_epoch=on_epoch,
            )

        save_model(
            directory,
            model,
            {
                "stage": self.STAGE_ID,
                "seed": self.seed,
                "config": config_echo(self.config),
                "ablations": ablations.model_dump(),
                "vocab_sha256": file_sha256(self.vocab_path),
                "keywords_sha256": file_sha256(self.keywords_path),
                "parameters": model.num_parameters,
                "best_epoch": result.best_epoch,
                "best_valid_total": result.best_valid_total,
                "epochs_run": len(result.history),
                "stopped_early": result.stopped_early,
            },
        )
        self.console.print(
            f"{directory.name}: best epoch {result.best_epoch}, valid total {result.best_valid_total:.4f}, "
            f"{model.num_parameters:,} parameters"
        )
        return 0
