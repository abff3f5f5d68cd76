"""network.py - the EmpHi generator.

A bidirectional GRU encodes the flattened context. Two heads sit on its final
state: the intent prior p(z|C) and the context emotion classifier. A GRU
decoder with additive attention is conditioned on gated intent and emotion
embeddings, and each step mixes a generic vocabulary distribution with an
intent-oriented one according to a learned copy rate.

Usage:
```
model = EmphiModel(len(vocab), ModelConfig(), Ablations())
encoded = model.encode_context(ids, lengths)
prior = model.prior_intent(encoded.context)
```"""

# python standard library imports
from __future__ import annotations
import logging

# python 3rd party
import torch
import torch.nn.functional as F
from torch import nn
from torch.nn.utils.rnn import pack_padded_sequence, pad_packed_sequence

# Local imports
from emphi.common.labels import NUM_EMOTIONS, NUM_INTENTS
from emphi.config import Ablations, ModelConfig
from emphi.model.outputs import DecoderState, EncoderOutput, ForwardOutput, StepOutput

logger = logging.getLogger(__name__)


def _ffn(in_features: int, hidden: int, out_features: int) -> nn.Sequential:
    return nn.Sequential(nn.Linear(in_features, hidden), nn.ReLU(), nn.Linear(hidden, out_features))


def count_parameters(module: nn.Module) -> int:
    return sum(parameter.numel() for parameter in module.parameters() if parameter.requires_grad)


class EmphiModel(nn.Module):

    def __init__(
        self,
        vocab_size: int,
        config: ModelConfig,
        ablations: Ablations | None = None,
        pad_id: int = 0,
    ) -> None:
        super().__init__()
        ablations = ablations or Ablations()
        if config.tie_embeddings and config.hidden_size != config.embedding_dim:
            raise ValueError(
                "tied output heads need hidden_size == embedding_dim "
                f"({config.hidden_size} != {config.embedding_dim})"
            )

        self.vocab_size = vocab_size
        self.config = config
        self.ablations = ablations
        self.pad_id = pad_id

        emb, hidden, d = config.embedding_dim, config.hidden_size, config.latent_dim
        layers, ffn = config.num_layers, config.ffn_hidden
        context_dim = 2 * hidden

        self.embedding = nn.Embedding(vocab_size, emb, padding_idx=pad_id)
        self.dropout = nn.Dropout(config.dropout)
        self.encoder = nn.GRU(
            emb,
            hidden,
            num_layers=layers,
            batch_first=True,
            bidirectional=True,
            dropout=config.dropout if layers > 1 else 0.0,
        )
        self.bridge = nn.Linear(context_dim, hidden)

        self.prior_head = _ffn(context_dim, ffn, NUM_INTENTS)
        self.emotion_head = _ffn(context_dim, ffn, NUM_EMOTIONS)
        self.intent_embedding = nn.Embedding(NUM_INTENTS, d)
        self.emotion_embedding = nn.Embedding(NUM_EMOTIONS, d)

        # Additive attention: v^T tanh(W_enc h_i + W_dec s)
        self.attn_enc = nn.Linear(context_dim, hidden, bias=False)
        self.attn_dec = nn.Linear(hidden, hidden)
        self.attn_v = nn.Linear(hidden, 1, bias=False)

        gate_in = emb + context_dim + hidden
        self.intent_gate = _ffn(gate_in, ffn, d)
        self.emotion_gate = _ffn(gate_in, ffn, d)

        self.decoder_input_size = emb + d + context_dim + (0 if ablations.disable_intent else d)
        self.decoder = nn.GRU(
            self.decoder_input_size,
            hidden,
            num_layers=layers,
            batch_first=True,
            dropout=config.dropout if layers > 1 else 0.0,
        )

        self.copy_scorer = nn.Linear(hidden, 1)
        if config.tie_embeddings:
            # W_g = E and W_i = E P_i
            self.generic_bias = nn.Parameter(torch.zeros(vocab_size))
            self.intent_proj = nn.Linear(hidden, emb)
            self.intent_bias = nn.Parameter(torch.zeros(vocab_size))
        else:
            self.generic_head = nn.Linear(hidden, vocab_size)
            self.intent_head = nn.Linear(hidden, vocab_size)

        self.register_buffer("keyword_mask", torch.ones(NUM_INTENTS, vocab_size, dtype=torch.bool))

        self.num_parameters = count_parameters(self)
        logger.info(f"EmphiModel built: V={vocab_size}, trainable parameters={self.num_parameters:,}")

    # ~ Properties ~ #

    @property
    def copy_enabled(self) -> bool:
        return not self.ablations.disable_copy

    def set_keyword_mask(self, keyword_ids: list[list[int]]) -> None:
        """Install per-intent keyword ids for `copy_mask` mode. An intent with no
        in-vocabulary keyword keeps the full vocabulary."""

        mask = torch.zeros(NUM_INTENTS, self.vocab_size, dtype=torch.bool)
        for intent, ids in enumerate(keyword_ids):
            if ids:
                mask[intent, ids] = True
            else:
                mask[intent] = True
        self.keyword_mask.copy_(mask)

    # ~ Encoder side ~ #

    def encode_context(self, context_ids: torch.Tensor, lengths: torch.Tensor) -> EncoderOutput:
        """Run the bidirectional encoder over padded contexts.

        Args:
            context_ids: (B, m) token ids, PAD after each context's length.
            lengths: (B,) true lengths, each >= 1.
        Raises:
            ValueError: On token ids outside the vocabulary or empty contexts.
        """

        if context_ids.numel() and (int(context_ids.max()) >= self.vocab_size or int(context_ids.min()) < 0):
            raise ValueError(f"context token id outside vocabulary of size {self.vocab_size}")
        if int(lengths.min()) < 1:
            raise ValueError("every context needs at least one token")

        batch, width = context_ids.shape
        embedded = self.dropout(self.embedding(context_ids))
        packed = pack_padded_sequence(embedded, lengths.cpu(), batch_first=True, enforce_sorted=False)
        outputs, h_n = self.encoder(packed)
        states, _ = pad_packed_sequence(outputs, batch_first=True, total_length=width)

        layers = self.config.num_layers
        h_n = h_n.view(layers, 2, batch, self.config.hidden_size)
        final = torch.cat([h_n[:, 0], h_n[:, 1]], dim=-1)
        positions = torch.arange(width, device=context_ids.device)
        mask = positions[None, :] < lengths.to(context_ids.device)[:, None]
        return EncoderOutput(
            states=states,
            mask=mask,
            context=final[-1],
            final=final,
            keys=self.attn_enc(states),
        )

    def prior_intent_logits(self, context: torch.Tensor) -> torch.Tensor:
        logits: torch.Tensor = self.prior_head(context)
        return logits

    def prior_intent(self, context: torch.Tensor) -> torch.Tensor:
        "p(z|C): (B, 9) intent distribution from h_m."
        return torch.softmax(self.prior_intent_logits(context), dim=-1)

    def emotion_logits(self, context: torch.Tensor) -> torch.Tensor:
        logits: torch.Tensor = self.emotion_head(context)
        return logits

    def classify_emotion(self, context: torch.Tensor) -> torch.Tensor:
        "(B, 32) emotion distribution from h_m."
        return torch.softmax(self.emotion_logits(context), dim=-1)

    def initial_state(self, encoded: EncoderOutput) -> DecoderState:
        return DecoderState(hidden=torch.tanh(self.bridge(encoded.final)).contiguous(), step=0)

    # ~ Decoder side ~ #

    def attend(
        self,
        state: torch.Tensor,
        encoder_states: torch.Tensor,
        mask: torch.Tensor | None = None,
        keys: torch.Tensor | None = None,
    ) -> tuple[torch.Tensor, torch.Tensor]:
        """Additive attention of a (B, H) decoder state over (B, m, 2H) encoder
        states. Returns (c_att (B, 2H), weights (B, m)); padded positions get
        weight zero."""

        if keys is None:
            keys = self.attn_enc(encoder_states)
        scores = self.attn_v(torch.tanh(keys + self.attn_dec(state).unsqueeze(1))).squeeze(-1)
        if mask is not None:
            scores = scores.masked_fill(~mask, float("-inf"))
        weights = torch.softmax(scores, dim=-1)
        c_att = torch.bmm(weights.unsqueeze(1), encoder_states).squeeze(1)
        return c_att, weights

    def _output_logits(self, s_t: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        if self.config.tie_embeddings:
            generic = F.linear(s_t, self.embedding.weight, self.generic_bias)
            intent = F.linear(self.intent_proj(s_t), self.embedding.weight, self.intent_bias)
        else:
            generic = self.generic_head(s_t)
            intent = self.intent_head(s_t)
        return generic, intent

    def decode_step(
        self,
        prev_ids: torch.Tensor,
        state: DecoderState,
        encoded: EncoderOutput,
        intent: torch.Tensor,
        emotion: torch.Tensor,
        force_alpha: float | None = None,
        force_gate: float | None = None,
    ) -> tuple[StepOutput, DecoderState]:
        """One decoding step.

        The gates read the previous token embedding, the attention context and
        the pre-update state s_{t-1}; the copy rate reads the updated state s_t.

        Args:
            prev_ids: (B,) previous tokens (BOS at the first step).
            state: Decoder state before this step.
            encoded: Encoder output for the batch.
            intent: (B,) intent ids the response is conditioned on.
            emotion: (B,) emotion ids.
            force_alpha: Pin the copy rate to this value.
            force_gate: Pin every gate activation to this value.
        """

        emb_prev = self.dropout(self.embedding(prev_ids))
        s_prev = state.top
        c_att, weights = self.attend(s_prev, encoded.states, encoded.mask, encoded.keys)
        gate_in = torch.cat([emb_prev, c_att, s_prev], dim=-1)

        v_e = self.emotion_embedding(emotion)
        intent_gate: torch.Tensor | None = None
        emotion_gate: torch.Tensor | None = None
        gated_intent: torch.Tensor | None = None

        if self.ablations.disable_gate:
            gated_emotion = v_e
        else:
            emotion_gate = torch.sigmoid(self.emotion_gate(gate_in))
            if force_gate is not None:
                emotion_gate = torch.full_like(emotion_gate, force_gate)
            gated_emotion = emotion_gate * v_e

        pieces = [emb_prev]
        if not self.ablations.disable_intent:
            v_z = self.intent_embedding(intent)
            if self.ablations.disable_gate:
                gated_intent = v_z
            else:
                intent_gate = torch.sigmoid(self.intent_gate(gate_in))
                if force_gate is not None:
                    intent_gate = torch.full_like(intent_gate, force_gate)
                gated_intent = intent_gate * v_z
            pieces.append(gated_intent)
        pieces.extend([gated_emotion, c_att])

        output, hidden = self.decoder(torch.cat(pieces, dim=-1).unsqueeze(1), state.hidden)
        s_t = output[:, 0]

        generic_logits, intent_logits = self._output_logits(s_t)
        log_generic = F.log_softmax(generic_logits, dim=-1)

        if not self.copy_enabled:
            alpha = torch.zeros(s_t.size(0), dtype=s_t.dtype, device=s_t.device)
            log_probs = log_generic
            intent_probs = None
        else:
            # an intent-free model copies from the whole vocabulary
            if self.config.copy_mask and not self.ablations.disable_intent:
                intent_logits = intent_logits.masked_fill(~self.keyword_mask[intent], float("-inf"))
            log_intent = F.log_softmax(intent_logits, dim=-1)
            intent_probs = log_intent.exp()
            if force_alpha is None:
                score = self.copy_scorer(s_t).squeeze(-1)
                alpha = torch.sigmoid(score)
                log_alpha, log_rest = F.logsigmoid(score), F.logsigmoid(-score)
            else:
                alpha = torch.full((s_t.size(0),), force_alpha, dtype=s_t.dtype, device=s_t.device)
                log_alpha, log_rest = torch.log(alpha), torch.log1p(-alpha)
            # log((1 - a) p_g + a p_i), computed in log space
            log_probs = torch.logsumexp(
                torch.stack([log_alpha[:, None] + log_intent, log_rest[:, None] + log_generic]),
                dim=0,
            )

        step = StepOutput(
            log_probs=log_probs,
            alpha=alpha,
            generic_probs=log_generic.exp(),
            intent_probs=intent_probs,
            attention=weights,
            intent_gate=intent_gate,
            emotion_gate=emotion_gate,
            gated_intent=gated_intent,
            gated_emotion=gated_emotion,
        )
        return step, DecoderState(hidden=hidden, step=state.step + 1)

    # ~ Training pass ~ #

    def forward(
        self,
        context_ids: torch.Tensor,
        context_lengths: torch.Tensor,
        response_inputs: torch.Tensor,
        response_targets: torch.Tensor,
        intents: torch.Tensor,
        emotions: torch.Tensor,
    ) -> ForwardOutput:
        """Teacher-forced pass. `response_inputs` starts with BOS and
        `response_targets` is the same sequence shifted left and ending in EOS;
        both are (B, n) and PAD-filled."""

        encoded = self.encode_context(context_ids, context_lengths)
        state = self.initial_state(encoded)
        target_log_probs: list[torch.Tensor] = []
        alphas: list[torch.Tensor] = []
        for t in range(response_inputs.size(1)):
            step, state = self.decode_step(response_inputs[:, t], state, encoded, intents, emotions)
            target_log_probs.append(step.log_probs.gather(1, response_targets[:, t : t + 1]).squeeze(1))
            alphas.append(step.alpha)
        return ForwardOutput(
            target_log_probs=torch.stack(target_log_probs, dim=1),
            alpha=torch.stack(alphas, dim=1),
            prior_logits=self.prior_intent_logits(encoded.context),
            emotion_logits=self.emotion_logits(encoded.context),
        )
