"""metrics.py - BLEU precision/recall/F1, Distinct-n and KL divergence."""

# python standard library imports
from __future__ import annotations
from typing import Sequence
import warnings

# python 3rd party
import numpy as np
import numpy.typing as npt
from nltk.translate.bleu_score import SmoothingFunction, sentence_bleu
from nltk.util import ngrams
from scipy.stats import entropy

# Local imports
from emphi.common.exceptions import EvaluationError

BLEU_WEIGHTS = (0.25, 0.25, 0.25, 0.25)
SMOOTHING = "nltk-method2 (add-one on n>=2 precisions)"
KL_EPSILON = 1e-6

_smoothing = SmoothingFunction()


def bleu(hypothesis: Sequence[str], reference: Sequence[str]) -> float:
    """Sentence BLEU over 1-4 grams with add-one smoothing for n >= 2.

    A hypothesis that shares no unigram with the reference scores 0.

    Raises:
        EvaluationError: If the reference is empty.
    """

    if not reference:
        raise EvaluationError("BLEU needs a nonempty reference")
    if not hypothesis:
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        score = sentence_bleu(
            [list(reference)],
            list(hypothesis),
            weights=BLEU_WEIGHTS,
            smoothing_function=_smoothing.method2,
        )
    return float(score)


def harmonic_mean(precision: float, recall: float) -> float:
    if precision <= 0 or recall <= 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def bleu_prf(
    samples: Sequence[Sequence[str]],
    references: Sequence[Sequence[str]],
) -> tuple[float, float, float]:
    """One-to-many BLEU for a single test case.

    Precision averages, over samples, the best BLEU against any reference;
    recall averages, over references, the best BLEU of any sample.

    Raises:
        EvaluationError: If either list is empty.
    """

    if not samples or not references:
        raise EvaluationError("bleu_prf needs at least one sample and one reference")
    scores = np.array([[bleu(sample, reference) for reference in references] for sample in samples])
    precision = float(scores.max(axis=1).mean())
    recall = float(scores.max(axis=0).mean())
    return precision, recall, harmonic_mean(precision, recall)


def corpus_bleu_prf(
    cases: Sequence[tuple[Sequence[Sequence[str]], Sequence[Sequence[str]]]],
) -> tuple[float, float, float]:
    """Means of per-case precision and recall; F1 is their harmonic mean.

    Raises:
        EvaluationError: If there are no cases.
    """

    if not cases:
        raise EvaluationError("no test cases to score")
    per_case = np.array([bleu_prf(samples, references)[:2] for samples, references in cases])
    precision, recall = (float(value) for value in per_case.mean(axis=0))
    return precision, recall, harmonic_mean(precision, recall)


def distinct_n(responses: Sequence[Sequence[str]], n: int) -> float:
    """Distinct n-grams over total n-gram occurrences across all responses.

    Raises:
        EvaluationError: If no response has at least n tokens.
    """

    grams = [gram for response in responses for gram in ngrams(list(response), n)]
    if not grams:
        raise EvaluationError(f"no {n}-grams in {len(responses)} responses")
    return len(set(grams)) / len(grams)


def _as_distribution(values: Sequence[float] | npt.NDArray[np.float64], name: str) -> npt.NDArray[np.float64]:
    array = np.asarray(values, dtype=np.float64)
    if array.ndim != 1 or array.size == 0:
        raise EvaluationError(f"{name} must be a nonempty vector")
    if (array < 0).any() or not np.isfinite(array).all():
        raise EvaluationError(f"{name} has negative or non-finite entries")
    total = array.sum()
    if total <= 0:
        raise EvaluationError(f"{name} has no mass")
    return array / total


def kl_divergence(
    p: Sequence[float] | npt.NDArray[np.float64],
    q: Sequence[float] | npt.NDArray[np.float64],
    epsilon: float = KL_EPSILON,
) -> float:
    """KL(p || q) = sum_k p_k ln(p_k / q_k), with 0 ln 0 = 0.

    When q is empty on a bin where p has mass, epsilon is added to every bin of
    q and q is renormalized; otherwise the sum is exact.

    Raises:
        EvaluationError: If the vectors differ in length or are not distributions.
    """

    p_arr = _as_distribution(p, "p")
    q_arr = _as_distribution(q, "q")
    if p_arr.shape != q_arr.shape:
        raise EvaluationError(f"distribution lengths differ: {p_arr.size} vs {q_arr.size}")
    if ((q_arr == 0) & (p_arr > 0)).any():
        q_arr = (q_arr + epsilon) / (q_arr + epsilon).sum()
    return max(float(entropy(p_arr, q_arr)), 0.0)
