from __future__ import annotations
from typing import TypedDict, TYPE_CHECKING
from abc import ABC
from pathlib import Path
import enum
import logging

if TYPE_CHECKING:
    from emphi.config import RunConfig


class ArtifactKind(enum.Enum):
    """Kinds of artifact a pipeline stage can write into the work directory."""

    DATASET = "dataset"
    VOCABULARY = "vocabulary"
    RECOGNITION = "recognition"
    KEYWORDS = "keywords"
    CLASSIFIER = "classifier"
    MODEL = "model"
    REPORT = "report"
    AUDIT = "audit"


class StageContext(TypedDict, total=True):
    """
    Everything a stage knows about the run it belongs to. Handed to each stage
    by the stages manager, so stages never read global state.
    """

    stage_id: str
    seed: int
    work_dir: Path
    config: RunConfig


class EmphiBase(ABC):
    """Top level ABC for the pipeline's pluggable parts.

    Centralizes what every part needs: a readable uid, a logger, and the two
    validation passes that run at class level before anything is instantiated.
    """

    BROKEN: bool = False  # Set when validation found the class unusable.
    MISSING_METHODS: frozenset[str] | None = None

    @property
    def uid(self) -> str:
        """Unique id for this instance."""

        return f"{self.__class__.__name__.lower()}:{id(self)}"

    @property
    def log(self) -> logging.Logger:
        "Logger named after the subclass's module."
        return logging.getLogger(self.__class__.__module__)

    @classmethod
    def validate_stage1(cls) -> None:
        """Fail early if abstract methods are left unimplemented.
        Call `super().validate_stage1()` when overriding."""

        # An ABC only checks __abstractmethods__ on instantiation; checking it on
        # the class lets the manager reject a broken stage before the run starts.
        missing = cls.__abstractmethods__
        if missing:
            cls.BROKEN = True
            cls.MISSING_METHODS = missing
            raise NotImplementedError(
                f"{cls.__name__} is missing the following abstract methods: \n"
                f"{', '.join(missing)}\n"
                "Please implement them to make the stage functional."
            )

    @classmethod
    def validate_stage2(cls, required_members: dict[str, str]) -> None:

        for attr_name, kind in required_members.items():

            try:
                attr = getattr(cls, attr_name)
            except AttributeError:
                raise NotImplementedError(f"{cls.__name__} must implement {attr_name} ({kind}).")
            else:
                if attr is None:
                    raise NotImplementedError(f"{cls.__name__} must implement {attr_name} ({kind}).")
