"evaluation.py - `emphi evaluate`: one-to-many metrics, intent histogram and ACC on the test split."

from __future__ import annotations
from pathlib import Path
from typing import Any
import argparse

from rich.progress import track

from emphi.common.artifacts import file_sha256, write_manifest, write_text_atomic
from emphi.common.exceptions import EvaluationError
from emphi.common.seeding import enable_determinism, torch_generator
from emphi.config import config_echo
from emphi.corpus.dialogues import flatten_context, truncate_response
from emphi.emphibase import ArtifactKind
from emphi.evalsuite.intents import intent_acc, intent_distribution, write_response_file
from emphi.evalsuite.metrics import corpus_bleu_prf, distinct_n, kl_divergence
from emphi.evalsuite.report import EvalReport
from emphi.model.checkpoint import CHECKPOINT_NAME, MANIFEST_NAME, load_model, model_dir
from emphi.model.generation import generate
from emphi.stages.stagebase import StageBase, ablation_overrides, add_ablation_argument

REPORT_NAME = "report.txt"
SAMPLES_NAME = "samples.txt"
HUMAN_NAME = "human.txt"


class EvaluateStage(StageBase):

    STAGE_ID = "evaluate"
    HELP = "Score a trained generator on the test split: BLEU P/R/F1, Distinct-1/2, KL vs human, intent ACC."
    PRODUCES = (ArtifactKind.REPORT,)

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        add_ablation_argument(parser)
        parser.add_argument(
            "--max-cases", type=int, default=None, help="Evaluate the first N test cases only."
        )
        parser.add_argument(
            "--samples", type=int, default=None, help="Responses generated per case (default 5)."
        )

    @classmethod
    def config_overrides(cls, args: argparse.Namespace) -> dict[str, Any]:
        overrides = ablation_overrides(args)
        evaluation: dict[str, Any] = {}
        if getattr(args, "max_cases", None) is not None:
            evaluation["max_cases"] = args.max_cases
        if getattr(args, "samples", None) is not None:
            evaluation["samples"] = args.samples
        if evaluation:
            overrides["evaluation"] = evaluation
        return overrides

    @property
    def eval_dir(self) -> Path:
        return self.work_dir / f"eval{self.config.training.ablations.suffix}"

    def run(self, args: argparse.Namespace) -> int:

        enable_determinism()
        directory = model_dir(self.work_dir, self.config.training.ablations)
        model, _ = load_model(directory)
        vocab = self.load_vocab()
        classifier = self.load_classifier()
        examples = self.load_split("test")
        settings = self.config.evaluation
        corpus = self.config.corpus
        if settings.max_cases is not None:
            examples = examples[: settings.max_cases]
        if not examples:
            raise EvaluationError("the test split is empty")

        generator = torch_generator(self.seed, "generation")
        contexts: list[list[int]] = []
        generated: list[list[list[str]]] = []
        references: list[list[str]] = []
        emotion_hits = 0
        for example in track(examples, description="generating", console=self.console, transient=True):
            tokens = flatten_context(example.context, corpus.max_context_tokens)
            context = vocab.encode(tokens) or [vocab.unk_id]
            samples = generate(
                model,
                context,
                bos_id=vocab.bos_id,
                eos_id=vocab.eos_id,
                max_len=settings.max_len,
                count=settings.samples,
                generator=generator,
            )
            contexts.append(context)
            generated.append([vocab.decode(list(sample.ids)) for sample in samples])
            references.append(truncate_response(example.response.tokens, corpus.max_response_tokens))
            emotion_hits += int(samples[0].emotion == example.emotion_id)

        cases = [(block, [reference]) for block, reference in zip(generated, references)]
        precision, recall, _ = corpus_bleu_prf(cases)
        flat = [response for block in generated for response in block]
        model_hist = intent_distribution(flat, classifier, vocab)
        human_hist = intent_distribution(references, classifier, vocab)

        report = EvalReport(
            bleu_precision=precision,
            bleu_recall=recall,
            distinct_1=self._distinct(flat, 1),
            distinct_2=self._distinct(flat, 2),
            intent_histogram=model_hist,
            human_histogram=human_hist,
            kl_vs_human=kl_divergence(model_hist, human_hist),
            intent_acc=intent_acc(
                model,
                classifier,
                vocab,
                contexts,
                settings.max_len,
                torch_generator(self.seed, "evaluation"),
            ),
            emotion_acc=emotion_hits / len(examples),
            cases=len(examples),
            samples=settings.samples,
            extra={"model": directory.name},
        )

        out = self.eval_dir
        write_text_atomic(out / REPORT_NAME, report.to_text())
        write_response_file(out / SAMPLES_NAME, generated)
        write_response_file(out / HUMAN_NAME, [[reference] for reference in references])
        write_manifest(
            out / MANIFEST_NAME,
            {
                "stage": self.STAGE_ID,
                "seed": self.seed,
                "config": config_echo(self.config),
                "model_sha256": file_sha256(directory / CHECKPOINT_NAME),
                "report_sha256": file_sha256(out / REPORT_NAME),
                "cases": len(examples),
            },
        )
        self.console.print(report.rich_table())
        return 0

    def _distinct(self, responses: list[list[str]], n: int) -> float:
        try:
            return distinct_n(responses, n)
        except EvaluationError:
            self.log.warning(f"No generated response has {n} tokens; distinct-{n} reported as 0")
            return 0.0
