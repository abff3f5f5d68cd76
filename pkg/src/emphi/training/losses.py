"""losses.py - the four training objectives and their weighted sum.

    L1  per-token NLL of the gold response, decoded under the recognised intent
    L2  KL(q_r(z|X) || p(z|C)) between recognition and prior
    L3  cross-entropy of the context emotion classifier
    L4  binary cross-entropy of the copy rate against keyword membership
"""

# python standard library imports
from __future__ import annotations
from dataclasses import dataclass
from typing import Any
import math

# python 3rd party
import torch
import torch.nn.functional as F

# Local imports
from emphi.common.exceptions import NonFiniteLossError
from emphi.model.network import EmphiModel
from emphi.training.batching import TrainingBatch

LossWeights = tuple[float, float, float, float]
TERM_NAMES = ("L1", "L2", "L3", "L4")


@dataclass(frozen=True)
class LossBreakdown:
    l1: float
    l2: float
    l3: float
    l4: float
    total: float
    weights: LossWeights = (1.0, 0.5, 0.5, 1.0)

    def recombine(self) -> float:
        return sum(w * v for w, v in zip(self.weights, (self.l1, self.l2, self.l3, self.l4)))

    def to_dict(self) -> dict[str, Any]:
        return {"L1": self.l1, "L2": self.l2, "L3": self.l3, "L4": self.l4, "total": self.total}


@dataclass
class LossTensors:
    "Differentiable loss terms for one batch."

    l1: torch.Tensor
    l2: torch.Tensor
    l3: torch.Tensor
    l4: torch.Tensor
    total: torch.Tensor
    weights: LossWeights

    def breakdown(self) -> LossBreakdown:
        return LossBreakdown(
            l1=float(self.l1.item()),
            l2=float(self.l2.item()),
            l3=float(self.l3.item()),
            l4=float(self.l4.item()),
            total=float(self.total.item()),
            weights=self.weights,
        )


def nll_loss(target_log_probs: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
    "Mean negative log-likelihood over the real target positions."
    weights = mask.to(target_log_probs.dtype)
    return -(target_log_probs * weights).sum() / weights.sum()


def prior_kl(prior_logits: torch.Tensor, recognition: torch.Tensor) -> torch.Tensor:
    "Batch mean of sum_k q ln(q / p); zero-probability recognition bins contribute 0."
    return F.kl_div(
        F.log_softmax(prior_logits, dim=-1),
        recognition.to(prior_logits.dtype),
        reduction="batchmean",
    )


def emotion_loss(emotion_logits: torch.Tensor, emotions: torch.Tensor) -> torch.Tensor:
    return F.cross_entropy(emotion_logits, emotions)


def copy_rate_loss(
    alpha: torch.Tensor,
    targets: torch.Tensor,
    mask: torch.Tensor,
    eps: float = 1e-7,
) -> torch.Tensor:
    """Binary cross-entropy between the copy rate and keyword membership, averaged
    over real positions. The copy rate is clamped to [eps, 1 - eps]."""

    clamped = alpha.clamp(eps, 1.0 - eps)
    q = targets.to(alpha.dtype)
    bce = -(q * torch.log(clamped) + (1.0 - q) * torch.log1p(-clamped))
    weights = mask.to(alpha.dtype)
    return (bce * weights).sum() / weights.sum()


def combine(
    l1: torch.Tensor, l2: torch.Tensor, l3: torch.Tensor, l4: torch.Tensor, weights: LossWeights
) -> LossTensors:
    """Weighted total, after checking each term is finite.

    Raises:
        NonFiniteLossError: Naming the first non-finite term.
    """

    for name, term in zip(TERM_NAMES, (l1, l2, l3, l4)):
        value = float(term.detach().item())
        if not math.isfinite(value):
            raise NonFiniteLossError(name, value)
    w1, w2, w3, w4 = weights
    total = w1 * l1 + w2 * l2 + w3 * l3 + w4 * l4
    return LossTensors(l1=l1, l2=l2, l3=l3, l4=l4, total=total, weights=weights)


def compute_losses(model: EmphiModel, batch: TrainingBatch, weights: LossWeights) -> LossTensors:
    """Teacher-forced pass plus all four terms. The decoder is conditioned on
    the recognised intent and the gold emotion."""

    output = model(
        batch.context_ids,
        batch.context_lengths,
        batch.response_inputs,
        batch.response_targets,
        batch.intents,
        batch.emotions,
    )
    return combine(
        nll_loss(output.target_log_probs, batch.target_mask),
        prior_kl(output.prior_logits, batch.recognition),
        emotion_loss(output.emotion_logits, batch.emotions),
        copy_rate_loss(output.alpha, batch.copy_targets, batch.target_mask),
        weights,
    )
