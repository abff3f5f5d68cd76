"Corpus ingestion, tokenization and vocabulary."

from emphi.corpus.tokenizer import tokenize, detokenize
from emphi.corpus.vocab import Vocabulary, build_vocab, map_tokens, PAD, UNK, BOS, EOS, SEP
from emphi.corpus.dialogues import (
    Utterance,
    DialogueExample,
    SPLITS,
    load_dialogues,
    read_normalized,
    write_normalized,
    flatten_context,
    truncate_response,
    vocab_streams,
)
from emphi.corpus.intents import IntentExample, load_intent_corpus

__all__ = [
    "tokenize",
    "detokenize",
    "Vocabulary",
    "build_vocab",
    "map_tokens",
    "PAD",
    "UNK",
    "BOS",
    "EOS",
    "SEP",
    "Utterance",
    "DialogueExample",
    "SPLITS",
    "load_dialogues",
    "read_normalized",
    "write_normalized",
    "flatten_context",
    "truncate_response",
    "vocab_streams",
    "IntentExample",
    "load_intent_corpus",
]
