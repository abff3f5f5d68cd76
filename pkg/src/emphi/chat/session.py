"""session.py - the conversation state behind the chat REPL.

Keeps the running dialogue as context, so every reply is generated from all
previous turns, the way the generator saw contexts during training."""

from __future__ import annotations
from dataclasses import dataclass, field
from typing import Sequence

import torch

from emphi.classifier.model import IntentClassifier, recognize
from emphi.classifier.trainer import encode_text
from emphi.common.labels import INTENT_NAMES, Intent, emotion_name
from emphi.corpus.dialogues import Utterance, flatten_context
from emphi.corpus.tokenizer import detokenize
from emphi.corpus.vocab import Vocabulary
from emphi.evalsuite.intents import EMPTY_RESPONSE
from emphi.keywords.extraction import KeywordTable
from emphi.model.generation import generate
from emphi.model.network import EmphiModel


@dataclass(frozen=True)
class ChatTurn:
    distribution: tuple[tuple[str, float], ...]
    "p(z|C) as (intent name, probability), most probable first."
    emotion: str
    response: str
    intent: Intent
    "The intent the response was generated under."
    recognised: Intent
    "What the intent classifier reads in the response."
    keywords: tuple[str, ...] = ()
    "Response tokens that are keywords of `intent`."


@dataclass
class ChatSession:
    model: EmphiModel
    vocab: Vocabulary
    classifier: IntentClassifier
    keywords: KeywordTable
    max_context_tokens: int = 128
    max_len: int = 32
    max_tokens: int = 64
    generator: torch.Generator | None = None
    history: list[Utterance] = field(default_factory=list)

    def reset(self) -> None:
        self.history.clear()

    @property
    def has_context(self) -> bool:
        return any(utterance.speaker == "speaker" for utterance in self.history)

    def respond(self, text: str) -> ChatTurn:
        """Add a user turn and reply with an intent sampled from the prior.

        Raises:
            ValueError: If `text` has no tokens.
        """

        utterance = Utterance.from_text("speaker", text)
        if not utterance.tokens:
            raise ValueError("empty utterance")
        self.history.append(utterance)
        return self._reply(None)

    def regenerate(self, intent: Intent) -> ChatTurn:
        """Replace the latest reply with one conditioned on `intent`.

        Raises:
            ValueError: If nothing has been said yet.
        """

        if not self.has_context:
            raise ValueError("say something first, then pick an intent")
        if self.history[-1].speaker == "listener":
            self.history.pop()
        return self._reply(intent)

    def _reply(self, intent: Intent | None) -> ChatTurn:
        context = self.vocab.encode(flatten_context(self.history, self.max_context_tokens))
        with torch.no_grad():
            encoded = self.model.encode_context(
                torch.tensor([context], dtype=torch.long), torch.tensor([len(context)], dtype=torch.long)
            )
            prior = self.model.prior_intent(encoded.context)[0].double()
        (sample,) = generate(
            self.model,
            context,
            bos_id=self.vocab.bos_id,
            eos_id=self.vocab.eos_id,
            intent=intent,
            max_len=self.max_len,
            generator=self.generator,
        )

        tokens = self.vocab.decode(list(sample.ids))
        text = detokenize(tokens) or EMPTY_RESPONSE
        self.history.append(Utterance.from_text("listener", text))
        recognised = recognize(self.classifier, encode_text(self.vocab, text, self.max_tokens))
        members = self.keywords.members(sample.intent)
        return ChatTurn(
            distribution=sorted_distribution(prior.tolist()),
            emotion=emotion_name(sample.emotion),
            response=text,
            intent=sample.intent,
            recognised=recognised,
            keywords=tuple(token for token in tokens if token in members),
        )


def sorted_distribution(probabilities: Sequence[float]) -> tuple[tuple[str, float], ...]:
    "Intent rows by descending probability; ties keep the canonical order."
    rows = sorted(enumerate(probabilities), key=lambda item: (-item[1], item[0]))
    return tuple((INTENT_NAMES[idx], float(p)) for idx, p in rows)
