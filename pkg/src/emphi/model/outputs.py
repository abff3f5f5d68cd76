"outputs.py - tensors passed between the generator's stages."

from __future__ import annotations
from dataclasses import dataclass

import torch


@dataclass
class EncoderOutput:
    states: torch.Tensor
    "(B, m, 2H) top-layer states, one per context position."
    mask: torch.Tensor
    "(B, m) True on real tokens."
    context: torch.Tensor
    "(B, 2H) h_m: concatenated final forward/backward states of the top layer."
    final: torch.Tensor
    "(L, B, 2H) concatenated final states of every layer, input to the bridge."
    keys: torch.Tensor
    "(B, m, H) encoder side of the additive attention score, computed once."

    def expand(self, count: int) -> EncoderOutput:
        "Repeat a single-context encoding `count` times along the batch."
        return EncoderOutput(
            states=self.states.expand(count, -1, -1),
            mask=self.mask.expand(count, -1),
            context=self.context.expand(count, -1),
            final=self.final.expand(-1, count, -1),
            keys=self.keys.expand(count, -1, -1),
        )


@dataclass
class DecoderState:
    hidden: torch.Tensor
    "(L, B, H) recurrent state s_t of every decoder layer."
    step: int = 0

    @property
    def top(self) -> torch.Tensor:
        return self.hidden[-1]


@dataclass
class StepOutput:
    log_probs: torch.Tensor
    "(B, V) log p(x_t)."
    alpha: torch.Tensor
    "(B,) copy rate; exactly zero when copying is disabled."
    generic_probs: torch.Tensor
    intent_probs: torch.Tensor | None
    "None when the copy head is switched off."
    attention: torch.Tensor
    "(B, m) attention weights used for this step."
    intent_gate: torch.Tensor | None
    emotion_gate: torch.Tensor | None
    gated_intent: torch.Tensor | None
    "The intent slot of the recurrent input; None when intent is ablated."
    gated_emotion: torch.Tensor

    @property
    def token_probs(self) -> torch.Tensor:
        return self.log_probs.exp()


@dataclass
class ForwardOutput:
    "Teacher-forced pass over a batch of responses."

    target_log_probs: torch.Tensor
    "(B, n) log p of each gold next token."
    alpha: torch.Tensor
    "(B, n)"
    prior_logits: torch.Tensor
    "(B, 9)"
    emotion_logits: torch.Tensor
    "(B, 32)"
