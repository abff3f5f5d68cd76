"keywords.py - `emphi extract-keywords`: per-intent TF-IDF keyword lists."

from __future__ import annotations
from pathlib import Path
from typing import Any
import argparse

from rich.table import Table

from emphi.common.artifacts import file_sha256, write_manifest
from emphi.config import require_paths
from emphi.corpus.intents import load_intent_corpus
from emphi.emphibase import ArtifactKind
from emphi.keywords.extraction import extract_keywords, format_top, is_discriminative
from emphi.stages.stagebase import StageBase


class ExtractKeywordsStage(StageBase):

    STAGE_ID = "extract-keywords"
    HELP = "Rank the top-k TF-IDF keywords of each intent in the labeled intent corpus."
    PRODUCES = (ArtifactKind.KEYWORDS,)

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--k", type=int, default=None, help="Keywords kept per intent (default 30).")
        parser.add_argument(
            "--out", type=Path, default=None, help="Keyword file (default <work>/keywords.txt)."
        )
        parser.add_argument("--intents-file", type=Path, default=None, help="Labeled intent corpus.")

    @classmethod
    def config_overrides(cls, args: argparse.Namespace) -> dict[str, Any]:
        overrides: dict[str, Any] = {}
        if getattr(args, "k", None) is not None:
            overrides["keywords"] = {"k": args.k}
        if getattr(args, "intents_file", None) is not None:
            overrides["paths"] = {"intents_file": args.intents_file}
        return overrides

    def run(self, args: argparse.Namespace) -> int:

        require_paths(self.config, "intents_file")
        intents_file = self.config.paths.intents_file
        assert intents_file is not None

        corpus = load_intent_corpus(intents_file)
        table = extract_keywords(corpus, self.config.keywords.k)
        if not is_discriminative(table, corpus):
            self.log.warning("Some keywords are more frequent outside their own intent")

        out: Path = getattr(args, "out", None) or self.keywords_path
        table.save(out)
        write_manifest(
            out.with_name(out.stem + ".manifest.json"),
            {
                "stage": self.STAGE_ID,
                "k": table.k,
                "corpus_size": len(corpus),
                "corpus_sha256": file_sha256(intents_file),
                "keywords_sha256": file_sha256(out),
            },
        )

        preview = Table(title=f"Top keywords per intent (k={table.k})")
        preview.add_column("intent")
        preview.add_column("top 10")
        for name, words in format_top(table, 10):
            preview.add_row(name, words)
        self.console.print(preview)
        self.log.info(f"Keyword table written to {out}")
        return 0
