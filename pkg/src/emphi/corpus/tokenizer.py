"tokenizer.py - lowercase word/punctuation tokenizer shared by every module."

from __future__ import annotations

from nltk.tokenize import RegexpTokenizer

# Contractions split the Treebank way ("don't" -> do n't, "that's" -> that 's);
# every other punctuation mark is its own token.
TOKEN_PATTERN = r"\w+(?=n't\b)|n't\b|'(?:s|re|ve|m|ll|d)\b|\w+|[^\w\s]"

_tokenizer = RegexpTokenizer(TOKEN_PATTERN)


def tokenize(text: str) -> list[str]:
    """Deterministic, lowercased tokenization.

    Idempotent on its own output: `tokenize(" ".join(tokenize(t))) == tokenize(t)`.

    Usage:
    ```
    tokenize("That's awesome!")  # ['that', "'s", 'awesome', '!']
    ```"""

    if not text:
        return []
    return _tokenizer.tokenize(text.lower())


def detokenize(tokens: list[str]) -> str:
    "Space-joined form, the on-disk format of response files."
    return " ".join(tokens)
