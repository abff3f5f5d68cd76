"""batching.py - encoded training examples and padded batches."""

# python standard library imports
from __future__ import annotations
from dataclasses import dataclass
from functools import partial
from typing import Sequence

# python 3rd party
import numpy as np
import numpy.typing as npt
import torch
from torch.nn.utils.rnn import pad_sequence
from torch.utils.data import DataLoader, Dataset

# Local imports
from emphi.common.exceptions import CorpusError
from emphi.corpus.dialogues import DialogueExample, flatten_context, truncate_response
from emphi.corpus.vocab import Vocabulary
from emphi.keywords.extraction import KeywordMode, KeywordTable, copy_targets


@dataclass(frozen=True)
class EncodedExample:
    context: tuple[int, ...]
    response: tuple[int, ...]
    "Response ids without BOS/EOS."
    emotion: int
    recognition: tuple[float, ...]
    "q_r(z|X) of the gold response."
    intent: int
    "argmax of `recognition`, the intent the response is decoded under."
    copy: tuple[bool, ...]
    "Keyword membership per response token."


@dataclass
class TrainingBatch:
    context_ids: torch.Tensor
    context_lengths: torch.Tensor
    response_inputs: torch.Tensor
    "(B, n) BOS + response."
    response_targets: torch.Tensor
    "(B, n) response + EOS."
    target_mask: torch.Tensor
    "(B, n) True on real target positions (EOS included)."
    emotions: torch.Tensor
    recognition: torch.Tensor
    "(B, 9)"
    intents: torch.Tensor
    copy_targets: torch.Tensor
    "(B, n) float 0/1; zero at EOS and padding."

    def __len__(self) -> int:
        return int(self.context_ids.size(0))


def encode_examples(
    examples: Sequence[DialogueExample],
    vocab: Vocabulary,
    keywords: KeywordTable,
    recognition: npt.NDArray[np.float64],
    intents: npt.NDArray[np.int64],
    max_context_tokens: int = 128,
    max_response_tokens: int = 32,
    mode: KeywordMode = "intent",
) -> list[EncodedExample]:
    """Encode normalized dialogues together with their cached recognition labels.

    Raises:
        CorpusError: If the recognition cache does not line up with the examples.
    """

    if len(recognition) != len(examples) or len(intents) != len(examples):
        raise CorpusError(
            f"recognition cache has {len(recognition)} rows for {len(examples)} examples; "
            "rerun `emphi train-classifier`"
        )

    encoded: list[EncodedExample] = []
    for example, probs, intent in zip(examples, recognition, intents):
        context = vocab.encode(flatten_context(example.context, max_context_tokens)) or [vocab.unk_id]
        tokens = truncate_response(example.response.tokens, max_response_tokens)
        membership = copy_targets(keywords, tokens, int(intent), mode)
        encoded.append(
            EncodedExample(
                context=tuple(context),
                response=tuple(vocab.encode(tokens)),
                emotion=example.emotion_id,
                recognition=tuple(float(p) for p in probs),
                intent=int(intent),
                copy=tuple(flag and token in vocab for flag, token in zip(membership, tokens)),
            )
        )
    return encoded


class DialogueDataset(Dataset[EncodedExample]):

    def __init__(self, examples: Sequence[EncodedExample]) -> None:
        self.examples = list(examples)

    def __len__(self) -> int:
        return len(self.examples)

    def __getitem__(self, index: int) -> EncodedExample:
        return self.examples[index]


def collate(
    batch: Sequence[EncodedExample], pad_id: int = 0, bos_id: int = 2, eos_id: int = 3
) -> TrainingBatch:
    contexts = [torch.tensor(example.context, dtype=torch.long) for example in batch]
    inputs = [torch.tensor((bos_id, *example.response), dtype=torch.long) for example in batch]
    targets = [torch.tensor((*example.response, eos_id), dtype=torch.long) for example in batch]
    copies = [torch.tensor((*example.copy, False), dtype=torch.float32) for example in batch]

    response_targets = pad_sequence(targets, batch_first=True, padding_value=pad_id)
    lengths = torch.tensor([len(target) for target in targets], dtype=torch.long)
    mask = torch.arange(response_targets.size(1))[None, :] < lengths[:, None]
    return TrainingBatch(
        context_ids=pad_sequence(contexts, batch_first=True, padding_value=pad_id),
        context_lengths=torch.tensor([len(context) for context in contexts], dtype=torch.long),
        response_inputs=pad_sequence(inputs, batch_first=True, padding_value=pad_id),
        response_targets=response_targets,
        target_mask=mask,
        emotions=torch.tensor([example.emotion for example in batch], dtype=torch.long),
        recognition=torch.tensor([example.recognition for example in batch], dtype=torch.float32),
        intents=torch.tensor([example.intent for example in batch], dtype=torch.long),
        copy_targets=pad_sequence(copies, batch_first=True, padding_value=0.0),
    )


def make_loader(
    dataset: DialogueDataset,
    vocab: Vocabulary,
    batch_size: int,
    shuffle: bool = False,
    generator: torch.Generator | None = None,
) -> DataLoader[EncodedExample]:
    "Single-process loader; shuffling order comes only from `generator`."
    return DataLoader(
        dataset,
        batch_size=batch_size,
        shuffle=shuffle,
        generator=generator,
        num_workers=0,
        collate_fn=partial(collate, pad_id=vocab.pad_id, bos_id=vocab.bos_id, eos_id=vocab.eos_id),
    )
