"stagebase.py - base class for every pipeline stage (one per subcommand)."

from __future__ import annotations
from abc import abstractmethod
from pathlib import Path
from typing import TYPE_CHECKING, Any
import argparse

if TYPE_CHECKING:
    from emphi.classifier.model import IntentClassifier
    from emphi.config import RunConfig

from rich.console import Console

from emphi.classifier.trainer import load_classifier
from emphi.common.exceptions import MissingArtifactError
from emphi.corpus.dialogues import DialogueExample, Split, read_normalized
from emphi.corpus.vocab import Vocabulary
from emphi.keywords.extraction import KeywordTable
from emphi.emphibase import ArtifactKind, EmphiBase, StageContext

ABLATION_CHOICES = ("intent", "gate", "copy")


def add_ablation_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--ablate",
        action="append",
        choices=ABLATION_CHOICES,
        default=None,
        help="Disable a component (repeatable): intent, gate or copy.",
    )


def ablation_overrides(args: argparse.Namespace) -> dict[str, Any]:
    "Map `--ablate` flags onto `training.ablations`."
    names = getattr(args, "ablate", None) or []
    if not names:
        return {}
    return {"training": {"ablations": {f"disable_{name}": True for name in names}}}


class StageBase(EmphiBase):

    STAGE_ID: str | None = None
    HELP: str | None = None
    PRODUCES: tuple[ArtifactKind, ...] = ()

    def __init__(self, context: StageContext, console: Console | None = None) -> None:
        self.context = context
        self.console = console or Console()

    @classmethod
    def validate(cls) -> None:

        required_members = {
            "STAGE_ID": "class attribute",
            "HELP": "class attribute",
        }
        cls.validate_stage1()
        cls.validate_stage2(required_members)

    ################
    # ~ Contract ~ #
    ################

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        "Stage-specific flags. Not part of the contract; override when needed."

    @classmethod
    def config_overrides(cls, args: argparse.Namespace) -> dict[str, Any]:
        "Config overrides derived from stage-specific flags."
        return {}

    @abstractmethod
    def run(self, args: argparse.Namespace) -> int: ...

    ####################
    # ~ Run context ~ #
    ####################

    @property
    def config(self) -> RunConfig:
        return self.context["config"]

    @property
    def seed(self) -> int:
        return self.context["seed"]

    @property
    def work_dir(self) -> Path:
        return self.context["work_dir"]

    @property
    def data_dir(self) -> Path:
        return self.work_dir / "data"

    @property
    def vocab_path(self) -> Path:
        return self.data_dir / "vocab.txt"

    @property
    def keywords_path(self) -> Path:
        return self.work_dir / "keywords.txt"

    @property
    def classifier_dir(self) -> Path:
        return self.work_dir / "classifier"

    def split_path(self, split: Split) -> Path:
        return self.data_dir / f"{split}.jsonl"

    def recognition_path(self, split: Split) -> Path:
        return self.data_dir / f"recognition_{split}.jsonl"

    ########################
    # ~ Artifact loaders ~ #
    ########################

    def require(self, path: Path, producer: str) -> Path:
        """Return `path` if it exists.

        Raises:
            MissingArtifactError: Naming the subcommand that writes `path`.
        """
        if not path.exists():
            raise MissingArtifactError(str(path), producer)
        return path

    def load_vocab(self) -> Vocabulary:
        return Vocabulary.load(self.require(self.vocab_path, "prepare-data"))

    def load_split(self, split: Split) -> list[DialogueExample]:
        return read_normalized(self.require(self.split_path(split), "prepare-data"))

    def load_keywords(self) -> KeywordTable:
        return KeywordTable.load(self.require(self.keywords_path, "extract-keywords"))

    def load_classifier(self) -> IntentClassifier:
        model, _ = load_classifier(self.classifier_dir)
        return model
