"audit.py - `emphi audit-bias`: KL between the intent histograms of two response files."

from __future__ import annotations
from pathlib import Path
from typing import Any
import argparse

from emphi.common.artifacts import file_sha256, write_manifest, write_text_atomic
from emphi.common.exceptions import ConfigError, EvaluationError
from emphi.common.labels import emotion_id
from emphi.emphibase import ArtifactKind
from emphi.evalsuite.intents import ResponseBlocks, audit_bias, read_response_file
from emphi.evalsuite.report import audit_text, histogram_table
from emphi.stages.stagebase import StageBase


class AuditBiasStage(StageBase):

    STAGE_ID = "audit-bias"
    HELP = "Compare the intent distribution of a model's responses against human responses."
    PRODUCES = (ArtifactKind.AUDIT,)

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--model-file", type=Path, required=True, help="Model response file.")
        parser.add_argument("--human-file", type=Path, required=True, help="Human response file.")
        parser.add_argument(
            "--emotion",
            default=None,
            help="Audit only test cases whose context carries this emotion (e.g. sad).",
        )

    def _filter(self, blocks: ResponseBlocks, keep: set[int]) -> ResponseBlocks:
        return [block for index, block in enumerate(blocks) if index in keep]

    def run(self, args: argparse.Namespace) -> int:

        model_file: Path = args.model_file
        human_file: Path = args.human_file
        for path in (model_file, human_file):
            if not path.exists():
                raise ConfigError(f"response file does not exist: {path}")

        vocab = self.load_vocab()
        classifier = self.load_classifier()
        model_blocks = read_response_file(model_file)
        human_blocks = read_response_file(human_file)

        emotion: str | None = args.emotion
        if emotion is not None:
            try:
                wanted = emotion_id(emotion)
            except ValueError as error:
                raise ConfigError(str(error)) from None
            test = self.load_split("test")
            keep = {index for index, example in enumerate(test) if example.emotion_id == wanted}
            model_blocks = self._filter(model_blocks, keep)
            human_blocks = self._filter(human_blocks, keep)
            if not model_blocks or not human_blocks:
                raise EvaluationError(f"no test cases with emotion {emotion!r}")

        result = audit_bias(model_blocks, human_blocks, classifier, vocab)
        text = audit_text(result)

        name = "report" if emotion is None else f"report-{emotion.strip().lower()}"
        out = self.work_dir / "audit" / f"{name}.txt"
        write_text_atomic(out, text)
        manifest: dict[str, Any] = {
            "stage": self.STAGE_ID,
            "model_file_sha256": file_sha256(model_file),
            "human_file_sha256": file_sha256(human_file),
            "emotion": emotion,
            "cases": result.cases,
            "kl": result.kl,
        }
        write_manifest(out.with_suffix(".manifest.json"), manifest)

        self.console.print(
            histogram_table(
                "Intent distribution", {"model": result.model_histogram, "human": result.human_histogram}
            )
        )
        self.console.print(f"KL = {result.kl:.6f}", highlight=False)
        return 0
