"stagesmanager.py - owns the pipeline stages and dispatches subcommands to them."

# python standard library imports
from __future__ import annotations
from dataclasses import dataclass, fields
from typing import TYPE_CHECKING, Iterator
import argparse
import logging

if TYPE_CHECKING:
    import rich.repr
    from rich.console import Console

# Local imports
from emphi.emphibase import StageContext
from emphi.stages.audit import AuditBiasStage
from emphi.stages.chat import ChatStage
from emphi.stages.classifier import TrainClassifierStage
from emphi.stages.evaluation import EvaluateStage
from emphi.stages.keywords import ExtractKeywordsStage
from emphi.stages.prepare import PrepareDataStage
from emphi.stages.stagebase import StageBase
from emphi.stages.training import TrainStage

logger = logging.getLogger(__name__)


class StagesManager:
    """The manager of every pipeline stage.

    Stages are held as classes and validated once, up front; an instance is
    only built when its subcommand runs, with the resolved run context.
    """

    @dataclass(frozen=True)
    class Stages:
        prepare_data: type[PrepareDataStage] = PrepareDataStage
        extract_keywords: type[ExtractKeywordsStage] = ExtractKeywordsStage
        train_classifier: type[TrainClassifierStage] = TrainClassifierStage
        train: type[TrainStage] = TrainStage
        evaluate: type[EvaluateStage] = EvaluateStage
        audit_bias: type[AuditBiasStage] = AuditBiasStage
        chat: type[ChatStage] = ChatStage

    def __init__(self) -> None:

        self._stages = StagesManager.Stages()
        try:
            for stage in self:
                stage.validate()
        except NotImplementedError as e:
            raise RuntimeError(f"Failed to validate stages: {str(e)}") from e

        self._by_id: dict[str, type[StageBase]] = {}
        for stage in self:
            assert stage.STAGE_ID is not None
            if stage.STAGE_ID in self._by_id:
                raise RuntimeError(f"Duplicate stage id: {stage.STAGE_ID}")
            self._by_id[stage.STAGE_ID] = stage

    def __iter__(self) -> Iterator[type[StageBase]]:
        for item in fields(self._stages):
            yield getattr(self._stages, item.name)

    def __rich_repr__(self) -> rich.repr.Result:
        for stage_id, stage in self._by_id.items():
            yield stage_id, stage.__name__

    @property
    def stage_ids(self) -> list[str]:
        "Subcommand names in pipeline order."
        return list(self._by_id)

    def get(self, stage_id: str) -> type[StageBase]:
        try:
            return self._by_id[stage_id]
        except KeyError:
            raise KeyError(f"unknown stage {stage_id!r}; stages: {', '.join(self._by_id)}") from None

    def add_subcommands(
        self,
        subparsers: argparse._SubParsersAction[argparse.ArgumentParser],
        parents: list[argparse.ArgumentParser] | None = None,
    ) -> None:
        "One subparser per stage, carrying the shared flags in `parents` and the stage's own."

        for stage_id, stage in self._by_id.items():
            parser = subparsers.add_parser(
                stage_id, help=stage.HELP, description=stage.HELP, parents=parents or []
            )
            stage.add_arguments(parser)

    def run(
        self,
        stage_id: str,
        args: argparse.Namespace,
        context: StageContext,
        console: Console | None = None,
    ) -> int:
        stage = self.get(stage_id)(context, console)
        logger.info(f"Running stage {stage_id} (seed {context['seed']}, work dir {context['work_dir']})")
        return stage.run(args)
