from pathlib import Path

import pytest
import torch

from emphi.common.artifacts import (
    append_jsonl,
    atomic_text_writer,
    file_sha256,
    read_jsonl,
    read_manifest,
    text_sha256,
    write_manifest,
)
from emphi.common.exceptions import MissingArtifactError, NonFiniteLossError
from emphi.common.labels import EMOTION_NAMES, Intent, emotion_id
from emphi.common.seeding import derive_seed, numpy_rng, torch_generator


def test_streams_are_independent_and_repeatable():
    assert derive_seed(0, "generation") == derive_seed(0, "generation")
    assert derive_seed(0, "generation") != derive_seed(0, "evaluation")
    assert derive_seed(0, "generation") != derive_seed(1, "generation")
    assert 0 <= derive_seed(12345, "model_init") < 2**31


def test_generators_follow_the_derived_seed():
    first = torch.rand(4, generator=torch_generator(7, "training_shuffle"))
    second = torch.rand(4, generator=torch_generator(7, "training_shuffle"))
    assert torch.equal(first, second)
    assert numpy_rng(7, "evaluation").integers(1000) == numpy_rng(7, "evaluation").integers(1000)


def test_failed_write_leaves_no_file(tmp_path: Path):
    target = tmp_path / "out" / "report.txt"
    with pytest.raises(RuntimeError):
        with atomic_text_writer(target) as handle:
            handle.write("partial")
            raise RuntimeError("boom")
    assert not target.exists()
    assert list(target.parent.iterdir()) == []


def test_manifest_bytes_are_stable(tmp_path: Path):
    write_manifest(tmp_path / "a.json", {"b": 1, "a": [1, 2]})
    write_manifest(tmp_path / "b.json", {"a": [1, 2], "b": 1})
    assert file_sha256(tmp_path / "a.json") == file_sha256(tmp_path / "b.json")
    assert read_manifest(tmp_path / "a.json") == {"a": [1, 2], "b": 1}
    assert text_sha256("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"


def test_jsonl_append(tmp_path: Path):
    path = tmp_path / "log.jsonl"
    append_jsonl(path, {"epoch": 1})
    append_jsonl(path, {"epoch": 2})
    assert read_jsonl(path) == [{"epoch": 1}, {"epoch": 2}]


def test_labels():
    assert len(Intent) == 9 and len(EMOTION_NAMES) == 32
    assert Intent.from_name("questioning") == Intent.QUESTIONING
    assert Intent.SYMPATHIZING.label == "Sympathizing"
    with pytest.raises(ValueError, match="valid intents"):
        Intent.from_name("gloating")
    assert emotion_id("sad") == 27


def test_errors_name_their_cause():
    missing = MissingArtifactError("classifier.pt", "train-classifier")
    assert "run `emphi train-classifier` first" in str(missing)
    assert NonFiniteLossError("L2", float("inf")).term == "L2"
