"""generation.py - one-to-many greedy decoding.

Each requested response either uses the given intent or draws its own intent
from the prior p(z|C); the emotion is the argmax of the model's emotion head."""

from __future__ import annotations
from dataclasses import dataclass
from typing import Sequence

import torch

from emphi.common.labels import Intent
from emphi.model.network import EmphiModel


@dataclass(frozen=True)
class GeneratedResponse:
    ids: tuple[int, ...]
    "Token ids without BOS/EOS."
    intent: Intent
    prior_probability: float
    "p(z|C) of the intent the response was conditioned on."
    emotion: int


def sample_intents(prior: torch.Tensor, count: int, generator: torch.Generator | None = None) -> torch.Tensor:
    "Draw `count` independent intents from a length-9 prior."
    return torch.multinomial(prior, count, replacement=True, generator=generator)


@torch.no_grad()
def generate(
    model: EmphiModel,
    context_ids: Sequence[int],
    *,
    bos_id: int,
    eos_id: int,
    intent: Intent | None = None,
    max_len: int = 32,
    count: int = 1,
    generator: torch.Generator | None = None,
) -> list[GeneratedResponse]:
    """Greedy decoding of `count` responses for one context.

    Args:
        model: A trained generator.
        context_ids: Flattened context, 1 to 128 ids.
        bos_id: Start token.
        eos_id: Stop token; not included in the output.
        intent: Condition every response on this intent; None samples one per
            response from the prior.
        max_len: Maximum number of generated tokens.
        count: Number of responses.
        generator: Seeded RNG for intent sampling.
    Raises:
        ValueError: If count < 1 or the context is empty.
    """

    if count < 1:
        raise ValueError(f"count must be at least 1, got {count}")
    if not context_ids:
        raise ValueError("cannot generate from an empty context")

    was_training = model.training
    model.eval()
    try:
        ids = torch.tensor([list(context_ids)], dtype=torch.long)
        lengths = torch.tensor([len(context_ids)], dtype=torch.long)
        encoded = model.encode_context(ids, lengths)
        prior = model.prior_intent(encoded.context)[0]
        emotion = int(torch.argmax(model.classify_emotion(encoded.context)[0]))

        if intent is None:
            intents = sample_intents(prior, count, generator)
        else:
            intents = torch.full((count,), int(intent), dtype=torch.long)

        batch = encoded.expand(count)
        state = model.initial_state(batch)
        emotions = torch.full((count,), emotion, dtype=torch.long)
        prev = torch.full((count,), bos_id, dtype=torch.long)
        finished = torch.zeros(count, dtype=torch.bool)
        produced: list[list[int]] = [[] for _ in range(count)]

        for _ in range(max_len):
            step, state = model.decode_step(prev, state, batch, intents, emotions)
            prev = torch.argmax(step.log_probs, dim=-1)
            for row in range(count):
                if finished[row]:
                    continue
                token = int(prev[row])
                if token == eos_id:
                    finished[row] = True
                else:
                    produced[row].append(token)
            if bool(finished.all()):
                break
    finally:
        model.train(was_training)

    return [
        GeneratedResponse(
            ids=tuple(produced[row]),
            intent=Intent(int(intents[row])),
            prior_probability=float(prior[int(intents[row])]),
            emotion=emotion,
        )
        for row in range(count)
    ]
