"artifacts.py - atomic writes, content hashes and manifests."

from __future__ import annotations
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterator, TextIO
import hashlib
import json
import os
import tempfile

import torch


@contextmanager
def atomic_text_writer(path: Path) -> Iterator[TextIO]:
    """Write text to a temp file beside `path`, renamed into place on success.

    Usage:
    ```
    with atomic_text_writer(work_dir / "keywords.txt") as handle:
        handle.write(text)
    ```"""

    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            yield handle
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def write_text_atomic(path: Path, text: str) -> None:
    with atomic_text_writer(path) as handle:
        handle.write(text)


def save_tensors_atomic(path: Path, payload: dict[str, Any]) -> None:
    """`torch.save` through a temp file and rename."""

    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    os.close(fd)
    try:
        torch.save(payload, tmp_name)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def file_sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def text_sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def write_manifest(path: Path, manifest: dict[str, Any]) -> None:
    """Sorted-key JSON, no timestamps, so identical runs give identical bytes."""

    write_text_atomic(path, json.dumps(manifest, sort_keys=True, indent=2, default=str) + "\n")


def read_manifest(path: Path) -> dict[str, Any]:
    with path.open(encoding="utf-8") as handle:
        data: dict[str, Any] = json.load(handle)
    return data


def write_jsonl(path: Path, records: list[dict[str, Any]]) -> None:
    with atomic_text_writer(path) as handle:
        for record in records:
            handle.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")


def read_jsonl(path: Path) -> list[dict[str, Any]]:
    records: list[dict[str, Any]] = []
    with path.open(encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                records.append(json.loads(line))
    return records


def append_jsonl(path: Path, record: dict[str, Any]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("a", encoding="utf-8") as handle:
        handle.write(json.dumps(record, sort_keys=True) + "\n")
