"""gradcheck.py - finite-difference check of the training gradients.

Runs on a miniature double-precision generator (V=50, width 8, no dropout) so
that central differences are accurate to well below the tolerance."""

# python standard library imports
from __future__ import annotations

# python 3rd party
import numpy as np
import torch

# Local imports
from emphi.common.labels import NUM_EMOTIONS, NUM_INTENTS
from emphi.common.seeding import numpy_rng, seed_module_init, torch_generator
from emphi.config import Ablations, ModelConfig
from emphi.model.network import EmphiModel
from emphi.training.batching import TrainingBatch
from emphi.training.losses import LossWeights, compute_losses

MINI_VOCAB = 50
GRADIENT_FLOOR = 1e-6
"Denominator floor for the relative error; below it, errors are effectively absolute."


def miniature_config() -> ModelConfig:
    return ModelConfig(embedding_dim=8, hidden_size=8, latent_dim=8, ffn_hidden=8, num_layers=2, dropout=0.0)


def miniature_model(seed: int = 0, ablations: Ablations | None = None) -> EmphiModel:
    seed_module_init(seed, "model_init")
    return EmphiModel(MINI_VOCAB, miniature_config(), ablations).double()


def miniature_batch(seed: int = 0, batch_size: int = 3, max_len: int = 5) -> TrainingBatch:
    """Random batch with contexts and responses of 1 to `max_len` tokens,
    Dirichlet recognition rows and random copy targets."""

    generator = torch_generator(seed, "gradient_check")
    rng = numpy_rng(seed, "gradient_check")
    ctx_lengths = torch.randint(1, max_len + 1, (batch_size,), generator=generator)
    resp_lengths = torch.randint(1, max_len + 1, (batch_size,), generator=generator)
    m, n = int(ctx_lengths.max()), int(resp_lengths.max())

    context = torch.randint(4, MINI_VOCAB, (batch_size, m), generator=generator)
    context[torch.arange(m)[None, :] >= ctx_lengths[:, None]] = 0
    response = torch.randint(4, MINI_VOCAB, (batch_size, n), generator=generator)
    mask = torch.arange(n + 1)[None, :] < (resp_lengths[:, None] + 1)

    inputs = torch.zeros(batch_size, n + 1, dtype=torch.long)
    targets = torch.zeros(batch_size, n + 1, dtype=torch.long)
    for row in range(batch_size):
        length = int(resp_lengths[row])
        inputs[row, 0] = 2
        inputs[row, 1 : length + 1] = response[row, :length]
        targets[row, :length] = response[row, :length]
        targets[row, length] = 3

    recognition = torch.from_numpy(rng.dirichlet(np.ones(NUM_INTENTS), size=batch_size))
    copy = (torch.rand(batch_size, n + 1, generator=generator, dtype=torch.float64) < 0.3).double()
    copy = copy * mask.double()
    copy[torch.arange(batch_size), resp_lengths] = 0.0
    return TrainingBatch(
        context_ids=context,
        context_lengths=ctx_lengths,
        response_inputs=inputs,
        response_targets=targets,
        target_mask=mask,
        emotions=torch.randint(0, NUM_EMOTIONS, (batch_size,), generator=generator),
        recognition=recognition,
        intents=recognition.argmax(dim=-1),
        copy_targets=copy,
    )


def gradient_check(
    model: EmphiModel,
    batch: TrainingBatch,
    weights: LossWeights = (1.0, 0.5, 0.5, 1.0),
    samples: int = 200,
    step: float = 1e-5,
    seed: int = 0,
) -> float:
    """Largest relative error between autograd and central differences over
    `samples` randomly chosen scalar parameters.

    Relative error is |a - n| / max(|a|, |n|, floor), and zero when both
    gradients are below 1e-10.
    """

    model.eval()
    parameters = [parameter for parameter in model.parameters() if parameter.requires_grad]
    model.zero_grad()
    compute_losses(model, batch, weights).total.backward()
    analytic = [
        parameter.grad.detach().clone().view(-1)
        if parameter.grad is not None
        else torch.zeros(parameter.numel(), dtype=parameter.dtype)
        for parameter in parameters
    ]

    sizes = np.array([parameter.numel() for parameter in parameters])
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    total = int(offsets[-1])
    picks = numpy_rng(seed, "gradient_check").choice(total, size=min(samples, total), replace=False)

    worst = 0.0
    with torch.no_grad():
        for flat in picks:
            which = int(np.searchsorted(offsets, flat, side="right") - 1)
            index = int(flat - offsets[which])
            values = parameters[which].data.view(-1)
            original = float(values[index])

            values[index] = original + step
            plus = float(compute_losses(model, batch, weights).total)
            values[index] = original - step
            minus = float(compute_losses(model, batch, weights).total)
            values[index] = original

            numeric = (plus - minus) / (2 * step)
            exact = float(analytic[which][index])
            if abs(exact) < 1e-10 and abs(numeric) < 1e-10:
                continue
            error = abs(exact - numeric) / max(abs(exact), abs(numeric), GRADIENT_FLOOR)
            worst = max(worst, error)
    return worst
