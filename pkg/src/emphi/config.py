"""config.py - the run configuration.

One TOML file, validated into frozen pydantic models. Precedence, lowest first:
defaults, config file, environment (paths only), command-line flags.

Usage:
```
config = load_config(Path("emphi.toml"), overrides={"seed": 7})
config.training.loss_weights  # (1.0, 0.5, 0.5, 1.0)
```"""

# python standard library imports
from __future__ import annotations
from pathlib import Path
from typing import Any, Literal, Mapping
import os
import tomllib

# python 3rd party
import platformdirs
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

# Local imports
from emphi.common.exceptions import ConfigError

PATH_ENV_VARS: dict[str, str] = {
    "data_dir": "EMPHI_DATA_DIR",
    "intents_file": "EMPHI_INTENTS_FILE",
    "work_dir": "EMPHI_WORK_DIR",
    "vectors_file": "EMPHI_VECTORS_FILE",
}


class _Section(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


def _default_work_dir() -> Path:
    return Path(platformdirs.user_data_dir(appname="emphi"))


class PathsConfig(_Section):
    data_dir: Path | None = None
    "Directory holding the EmpatheticDialogues train/valid/test CSV files."
    intents_file: Path | None = None
    "EmpatheticIntents labeled-response file."
    work_dir: Path = Field(default_factory=_default_work_dir)
    vectors_file: Path | None = None
    "Optional 300-dim text-format word vectors."


class CorpusConfig(_Section):
    max_context_tokens: int = Field(default=128, ge=1)
    max_response_tokens: int = Field(default=32, ge=1)
    vocab_max_size: int = Field(default=24000, gt=4)
    vocab_min_freq: int = Field(default=2, ge=1)


class KeywordsConfig(_Section):
    k: int = Field(default=30, ge=1)
    mode: Literal["intent", "union"] = "intent"
    "Copy supervision: keywords of the recognised intent only, or of any intent."


class ClassifierConfig(_Section):
    embedding_dim: int = Field(default=300, ge=1)
    hidden_size: int = Field(default=300, ge=1)
    head_hidden: int = Field(default=300, ge=1)
    learning_rate: float = Field(default=1e-3, gt=0)
    batch_size: int = Field(default=32, ge=1)
    max_epochs: int = Field(default=15, ge=1)
    patience: int = Field(default=3, ge=1)
    held_out_fraction: float = Field(default=0.1, gt=0, lt=1)
    max_tokens: int = Field(default=64, ge=1)


class ModelConfig(_Section):
    embedding_dim: int = Field(default=300, ge=1)
    hidden_size: int = Field(default=300, ge=1)
    latent_dim: int = Field(default=300, ge=1)
    "Width d of the intent and emotion embeddings."
    ffn_hidden: int = Field(default=300, ge=1)
    num_layers: int = Field(default=2, ge=1)
    dropout: float = Field(default=0.0, ge=0, lt=1)
    tie_embeddings: bool = True
    copy_mask: bool = False
    "Restrict the intent head to the active intent's keywords."


class Ablations(_Section):
    disable_intent: bool = False
    disable_gate: bool = False
    disable_copy: bool = False

    @property
    def suffix(self) -> str:
        "Directory suffix, e.g. `-wo-copy`; empty for the full model."
        names = [name for name in ("intent", "gate", "copy") if getattr(self, f"disable_{name}")]
        return "".join(f"-wo-{name}" for name in names)


class TrainingConfig(_Section):
    loss_weights: tuple[float, float, float, float] = (1.0, 0.5, 0.5, 1.0)
    learning_rate: float = Field(default=1e-4, gt=0)
    batch_size: int = Field(default=16, ge=1)
    max_epochs: int = Field(default=30, ge=1)
    patience: int = Field(default=3, ge=1)
    grad_clip: float = Field(default=5.0, gt=0)
    divergence_factor: float = Field(default=10.0, gt=1)
    divergence_epochs: int = Field(default=3, ge=1)
    ablations: Ablations = Field(default_factory=Ablations)

    @field_validator("loss_weights")
    @classmethod
    def _nonnegative(cls, value: tuple[float, float, float, float]) -> tuple[float, float, float, float]:
        if any(weight < 0 for weight in value):
            raise ValueError(f"loss weights must be nonnegative, got {value}")
        return value

    @property
    def effective_loss_weights(self) -> tuple[float, float, float, float]:
        """Weights after ablations: no intent drops the prior and copy terms,
        no copy drops the copy term."""

        l1, l2, l3, l4 = self.loss_weights
        if self.ablations.disable_intent:
            l2 = l4 = 0.0
        if self.ablations.disable_copy:
            l4 = 0.0
        return (l1, l2, l3, l4)


class EvaluationConfig(_Section):
    samples: int = Field(default=5, ge=1)
    max_len: int = Field(default=32, ge=1)
    max_cases: int | None = Field(default=None, ge=1)
    "Evaluate on the first N test cases only."


class RunConfig(_Section):
    seed: int = Field(default=0, ge=0)
    paths: PathsConfig = Field(default_factory=PathsConfig)
    corpus: CorpusConfig = Field(default_factory=CorpusConfig)
    keywords: KeywordsConfig = Field(default_factory=KeywordsConfig)
    classifier: ClassifierConfig = Field(default_factory=ClassifierConfig)
    model: ModelConfig = Field(default_factory=ModelConfig)
    training: TrainingConfig = Field(default_factory=TrainingConfig)
    evaluation: EvaluationConfig = Field(default_factory=EvaluationConfig)


# ~ Loading ~ #


def merge_overrides(base: dict[str, Any], update: Mapping[str, Any]) -> dict[str, Any]:
    "Recursive dict merge; values in `update` win."
    merged = dict(base)
    for key, value in update.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), dict):
            merged[key] = merge_overrides(merged[key], value)
        else:
            merged[key] = value
    return merged


def _format_validation(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(piece) for piece in item["loc"])
        parts.append(f"{location}: {item['msg']}")
    return "; ".join(parts)


def load_config(
    path: Path | None = None,
    overrides: Mapping[str, Any] | None = None,
    environ: Mapping[str, str] | None = None,
) -> RunConfig:
    """Build the run configuration.

    Args:
        path: TOML file; None means defaults only.
        overrides: Nested mapping from command-line flags, applied last.
        environ: Environment to read path overrides from (defaults to os.environ).
    Raises:
        ConfigError: On unreadable TOML, unknown keys or invalid values.
    """

    data: dict[str, Any] = {}
    if path is not None:
        try:
            with path.open("rb") as handle:
                data = tomllib.load(handle)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except tomllib.TOMLDecodeError as error:
            raise ConfigError(f"{path}: {error}") from None

    env = os.environ if environ is None else environ
    env_paths = {key: env[var] for key, var in PATH_ENV_VARS.items() if env.get(var)}
    if env_paths:
        data = merge_overrides(data, {"paths": env_paths})
    if overrides:
        data = merge_overrides(data, overrides)

    try:
        return RunConfig.model_validate(data)
    except ValidationError as error:
        raise ConfigError(_format_validation(error)) from None


def require_paths(config: RunConfig, *names: str) -> None:
    """Check that the named `[paths]` entries are set and exist.

    Raises:
        ConfigError: Naming the first unset or missing path.
    """

    for name in names:
        value: Path | None = getattr(config.paths, name)
        if value is None:
            raise ConfigError(f"paths.{name} is not set (config file, {PATH_ENV_VARS[name]} or flag)")
        if not value.exists():
            raise ConfigError(f"paths.{name} does not exist: {value}")


def config_echo(config: RunConfig) -> dict[str, Any]:
    "JSON-safe dump for manifests. Paths are left out so manifests do not depend on where they ran."
    return config.model_dump(mode="json", exclude={"paths"})
