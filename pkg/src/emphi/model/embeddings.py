"embeddings.py - optional pretrained word vectors."

from __future__ import annotations
from pathlib import Path
import logging

import torch
from torch import nn

from emphi.corpus.vocab import Vocabulary

logger = logging.getLogger(__name__)


@torch.no_grad()
def load_pretrained_vectors(path: Path, vocab: Vocabulary, embedding: nn.Embedding) -> int:
    """Copy vectors from a GloVe-style text file (`token v1 ... vD` per line) into
    the rows of `embedding` whose token is in `vocab`. Other rows keep their
    random init. Returns the number of rows filled.

    Raises:
        FileNotFoundError: If the vector file does not exist.
    """

    dim = embedding.embedding_dim
    found = 0
    skipped = 0
    with path.open(encoding="utf-8", errors="replace") as handle:
        for line in handle:
            token, _, rest = line.rstrip().partition(" ")
            idx = vocab.token_to_id.get(token)
            if idx is None or idx < 4:
                continue
            values = rest.split(" ")
            if len(values) != dim:
                skipped += 1
                continue
            embedding.weight[idx] = torch.tensor([float(v) for v in values], dtype=embedding.weight.dtype)
            found += 1
    if skipped:
        logger.warning(f"{path.name}: {skipped} vectors had the wrong dimension (expected {dim})")
    logger.info(f"Pretrained vectors cover {found}/{len(vocab) - 4} vocabulary tokens")
    return found
