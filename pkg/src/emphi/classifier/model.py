"""model.py - the 9-way response intent classifier.

Serves two roles: the recognition network that labels gold responses for
generator training, and the audit classifier that labels generated ones."""

# python standard library imports
from __future__ import annotations
from typing import Sequence

# python 3rd party
import numpy as np
import numpy.typing as npt
import torch
from torch import nn
from torch.nn.utils.rnn import pack_padded_sequence, pad_packed_sequence, pad_sequence

# Local imports
from emphi.common.labels import NUM_INTENTS, Intent
from emphi.config import ClassifierConfig

IntentDistribution = npt.NDArray[np.float64]
"Length-9 probability vector (or N×9 for a batch)."


class IntentClassifier(nn.Module):
    """Embedding, one bidirectional GRU layer, mean pool over valid positions,
    then a two-layer feed-forward head to nine logits."""

    def __init__(self, vocab_size: int, config: ClassifierConfig, pad_id: int = 0) -> None:
        super().__init__()
        self.vocab_size = vocab_size
        self.pad_id = pad_id
        self.embedding = nn.Embedding(vocab_size, config.embedding_dim, padding_idx=pad_id)
        self.encoder = nn.GRU(
            config.embedding_dim,
            config.hidden_size,
            num_layers=1,
            batch_first=True,
            bidirectional=True,
        )
        self.head = nn.Sequential(
            nn.Linear(2 * config.hidden_size, config.head_hidden),
            nn.ReLU(),
            nn.Linear(config.head_hidden, NUM_INTENTS),
        )

    def forward(self, ids: torch.Tensor, lengths: torch.Tensor) -> torch.Tensor:
        "(B, T) ids and (B,) lengths -> (B, 9) logits."

        embedded = self.embedding(ids)
        packed = pack_padded_sequence(embedded, lengths.cpu(), batch_first=True, enforce_sorted=False)
        outputs, _ = self.encoder(packed)
        states, _ = pad_packed_sequence(outputs, batch_first=True, total_length=ids.size(1))
        mask = (torch.arange(ids.size(1), device=ids.device)[None, :] < lengths[:, None]).to(states.dtype)
        pooled = (states * mask.unsqueeze(-1)).sum(dim=1) / lengths.to(states.dtype).unsqueeze(-1)
        logits: torch.Tensor = self.head(pooled)
        return logits


def collate_ids(sequences: Sequence[Sequence[int]], pad_id: int = 0) -> tuple[torch.Tensor, torch.Tensor]:
    """Pad id sequences into a (B, T) tensor plus (B,) lengths.

    Raises:
        ValueError: If any sequence is empty.
    """
    if any(len(seq) == 0 for seq in sequences):
        raise ValueError("cannot classify an empty token sequence")
    tensors = [torch.tensor(list(seq), dtype=torch.long) for seq in sequences]
    lengths = torch.tensor([len(seq) for seq in sequences], dtype=torch.long)
    return pad_sequence(tensors, batch_first=True, padding_value=pad_id), lengths


@torch.no_grad()
def predict_proba(
    model: IntentClassifier,
    sequences: Sequence[Sequence[int]],
    batch_size: int = 256,
) -> IntentDistribution:
    "N×9 intent distributions, rows renormalized in float64."

    was_training = model.training
    model.eval()
    try:
        rows: list[npt.NDArray[np.float64]] = []
        for start in range(0, len(sequences), batch_size):
            ids, lengths = collate_ids(sequences[start : start + batch_size], model.pad_id)
            if int(ids.max()) >= model.vocab_size or int(ids.min()) < 0:
                raise ValueError("token id outside the classifier vocabulary")
            probs = torch.softmax(model(ids, lengths).double(), dim=-1).numpy()
            rows.append(probs / probs.sum(axis=1, keepdims=True))
    finally:
        model.train(was_training)
    if not rows:
        return np.zeros((0, NUM_INTENTS), dtype=np.float64)
    return np.concatenate(rows, axis=0)


def classify(model: IntentClassifier, ids: Sequence[int]) -> IntentDistribution:
    """Intent distribution of one response.

    Raises:
        ValueError: If `ids` is empty.
    """
    return predict_proba(model, [ids])[0]


def argmax_intent(distribution: Sequence[float] | IntentDistribution) -> Intent:
    "Most probable intent; ties go to the lower id."
    return Intent(int(np.argmax(np.asarray(distribution))))


def recognize(model: IntentClassifier, ids: Sequence[int]) -> Intent:
    return argmax_intent(classify(model, ids))


def recognize_many(model: IntentClassifier, sequences: Sequence[Sequence[int]]) -> list[Intent]:
    probs = predict_proba(model, sequences)
    return [argmax_intent(row) for row in probs]
