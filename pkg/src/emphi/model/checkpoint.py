"checkpoint.py - generator checkpoints."

from __future__ import annotations
from pathlib import Path
from typing import Any

import torch

from emphi.common.artifacts import read_manifest, save_tensors_atomic, write_manifest
from emphi.common.exceptions import MissingArtifactError
from emphi.config import Ablations, ModelConfig
from emphi.model.network import EmphiModel

CHECKPOINT_NAME = "model.pt"
MANIFEST_NAME = "manifest.json"
TRAIN_LOG_NAME = "train_log.jsonl"


def model_dir(work_dir: Path, ablations: Ablations) -> Path:
    "`model` for the full model, `model-wo-<name>` per ablation."
    return work_dir / f"model{ablations.suffix}"


def save_model(directory: Path, model: EmphiModel, manifest: dict[str, Any]) -> None:
    save_tensors_atomic(
        directory / CHECKPOINT_NAME,
        {
            "state_dict": model.state_dict(),
            "vocab_size": model.vocab_size,
            "config": model.config.model_dump(),
            "ablations": model.ablations.model_dump(),
        },
    )
    write_manifest(directory / MANIFEST_NAME, manifest)


def load_model(directory: Path) -> tuple[EmphiModel, dict[str, Any]]:
    """Rebuild a frozen generator from `directory`.

    Raises:
        MissingArtifactError: If the checkpoint is absent (produced by `train`).
    """

    path = directory / CHECKPOINT_NAME
    if not path.exists():
        raise MissingArtifactError(str(path), "train")
    payload = torch.load(path, map_location="cpu", weights_only=False)
    model = EmphiModel(
        payload["vocab_size"],
        ModelConfig(**payload["config"]),
        Ablations(**payload["ablations"]),
    )
    model.load_state_dict(payload["state_dict"])
    model.eval()
    for parameter in model.parameters():
        parameter.requires_grad_(False)
    return model, read_manifest(directory / MANIFEST_NAME)
