"""intents.py - intent histograms, the bias audit and intent accuracy."""

# python standard library imports
from __future__ import annotations
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence
import logging

# python 3rd party
import numpy as np
import numpy.typing as npt
import torch

# Local imports
from emphi.classifier.model import IntentClassifier, argmax_intent, predict_proba
from emphi.common.artifacts import atomic_text_writer
from emphi.common.exceptions import EvaluationError
from emphi.common.labels import NUM_INTENTS, Intent
from emphi.corpus.tokenizer import detokenize, tokenize
from emphi.corpus.vocab import Vocabulary
from emphi.evalsuite.metrics import kl_divergence
from emphi.model.generation import generate
from emphi.model.network import EmphiModel

logger = logging.getLogger(__name__)

ResponseBlocks = list[list[list[str]]]
"Per test case, the list of tokenized responses."

EMPTY_RESPONSE = "."
"Written in place of a response with no tokens, so blank lines stay case separators."


def _encode(vocab: Vocabulary, response: Sequence[str]) -> list[int]:
    return vocab.encode(list(response)) or [vocab.unk_id]


def classify_responses(
    responses: Sequence[Sequence[str]],
    classifier: IntentClassifier,
    vocab: Vocabulary,
) -> list[Intent]:
    if not responses:
        return []
    probs = predict_proba(classifier, [_encode(vocab, response) for response in responses])
    return [argmax_intent(row) for row in probs]


def histogram(intents: Sequence[Intent | int]) -> npt.NDArray[np.float64]:
    ids = np.asarray([int(intent) for intent in intents], dtype=np.int64)
    counts = np.bincount(ids, minlength=NUM_INTENTS)
    return counts.astype(np.float64) / max(int(counts.sum()), 1)


def intent_distribution(
    responses: Sequence[Sequence[str]],
    classifier: IntentClassifier,
    vocab: Vocabulary,
) -> npt.NDArray[np.float64]:
    """Normalized histogram of recognised intents over a response set.

    Raises:
        EvaluationError: If there are no responses.
    """

    if not responses:
        raise EvaluationError("intent distribution of an empty response set")
    return histogram(classify_responses(responses, classifier, vocab))


# ~ Response files ~ #


def _block_size(lines: Sequence[str]) -> int | None:
    """Responses per case if `lines` is a block file: at least two cases of the
    same size (2 or more), each followed by exactly one blank line. The final
    separator may be missing."""

    blanks = [index for index, line in enumerate(lines) if not line.strip()]
    if not blanks or blanks[0] < 2:
        return None
    size = blanks[0]
    period = size + 1
    if len(lines) % period not in (0, size) or len(lines) < 2 * size + 1:
        return None
    for index, line in enumerate(lines):
        if (index % period == size) == bool(line.strip()):
            return None
    return size


def read_response_file(path: Path) -> ResponseBlocks:
    """Read a response file into per-case blocks.

    A block file holds `n` consecutive responses per case with a blank line
    after each case. Anything else is read one response per line, line i aligned
    to test context i, and a blank line there is an empty response.
    """

    lines = path.read_text(encoding="utf-8").splitlines()
    size = _block_size(lines)
    if size is None:
        return [[tokenize(line)] for line in lines]
    return [
        [tokenize(line) for line in lines[start : start + size]] for start in range(0, len(lines), size + 1)
    ]


def write_response_file(path: Path, blocks: Sequence[Sequence[Sequence[str]]]) -> None:
    "Space-joined tokens, one response per line, a blank line after each multi-response case."

    multi = any(len(block) > 1 for block in blocks)
    with atomic_text_writer(path) as handle:
        for block in blocks:
            for response in block:
                handle.write((detokenize(list(response)) or EMPTY_RESPONSE) + "\n")
            if multi:
                handle.write("\n")


# ~ Bias audit ~ #


@dataclass(frozen=True)
class AuditResult:
    kl: float
    "KL(model || human)."
    model_histogram: npt.NDArray[np.float64]
    human_histogram: npt.NDArray[np.float64]
    cases: int


def audit_bias(
    model_blocks: ResponseBlocks,
    human_blocks: ResponseBlocks,
    classifier: IntentClassifier,
    vocab: Vocabulary,
) -> AuditResult:
    """Compare the intent histograms of two aligned response sets.

    On a case-count mismatch a warning is logged and only the common prefix of
    cases is used.

    Raises:
        EvaluationError: If no case remains to compare.
    """

    if len(model_blocks) != len(human_blocks):
        logger.warning(
            f"response files differ in case count ({len(model_blocks)} vs {len(human_blocks)}); "
            "auditing the common cases only"
        )
    cases = min(len(model_blocks), len(human_blocks))
    if cases == 0:
        raise EvaluationError("no test cases to audit")

    model_responses = [response for block in model_blocks[:cases] for response in block]
    human_responses = [response for block in human_blocks[:cases] for response in block]
    model_hist = intent_distribution(model_responses, classifier, vocab)
    human_hist = intent_distribution(human_responses, classifier, vocab)
    return AuditResult(
        kl=kl_divergence(model_hist, human_hist),
        model_histogram=model_hist,
        human_histogram=human_hist,
        cases=cases,
    )


# ~ Intent accuracy ~ #


def conditioned_accuracy(
    conditioned: Sequence[Intent | int],
    responses: Sequence[Sequence[str]],
    classifier: IntentClassifier,
    vocab: Vocabulary,
) -> float:
    """Fraction of responses whose recognised intent is the one they were
    generated under.

    Raises:
        EvaluationError: If there are no responses or the lengths differ.
    """

    if not responses or len(conditioned) != len(responses):
        raise EvaluationError(f"need matching nonempty lists, got {len(conditioned)} and {len(responses)}")
    recognised = classify_responses(responses, classifier, vocab)
    return sum(1 for want, got in zip(conditioned, recognised) if int(want) == int(got)) / len(responses)


def intent_acc(
    model: EmphiModel,
    classifier: IntentClassifier,
    vocab: Vocabulary,
    contexts: Sequence[Sequence[int]],
    max_len: int = 32,
    generator: torch.Generator | None = None,
) -> float:
    """Sample an intent from the prior for each context, decode greedily under
    it and check the classifier agrees.

    Raises:
        EvaluationError: If there are no contexts.
    """

    if not contexts:
        raise EvaluationError("intent accuracy needs at least one context")
    conditioned: list[Intent] = []
    responses: list[list[str]] = []
    for context in contexts:
        (sample,) = generate(
            model,
            context,
            bos_id=vocab.bos_id,
            eos_id=vocab.eos_id,
            max_len=max_len,
            count=1,
            generator=generator,
        )
        conditioned.append(sample.intent)
        responses.append(vocab.decode(list(sample.ids)))
    return conditioned_accuracy(conditioned, responses, classifier, vocab)
