"Evaluation metrics, intent auditing and reports."

from emphi.evalsuite.metrics import (
    bleu,
    bleu_prf,
    corpus_bleu_prf,
    distinct_n,
    kl_divergence,
    harmonic_mean,
)
from emphi.evalsuite.intents import (
    AuditResult,
    audit_bias,
    classify_responses,
    conditioned_accuracy,
    histogram,
    intent_acc,
    intent_distribution,
    read_response_file,
    write_response_file,
)
from emphi.evalsuite.report import EvalReport, audit_text, histogram_table

__all__ = [
    "bleu",
    "bleu_prf",
    "corpus_bleu_prf",
    "distinct_n",
    "kl_divergence",
    "harmonic_mean",
    "AuditResult",
    "audit_bias",
    "classify_responses",
    "conditioned_accuracy",
    "histogram",
    "intent_acc",
    "intent_distribution",
    "read_response_file",
    "write_response_file",
    "EvalReport",
    "audit_text",
    "histogram_table",
]
