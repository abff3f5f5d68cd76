"Per-intent keyword lists for the copy mechanism."

from emphi.keywords.extraction import (
    KeywordTable,
    KeywordMode,
    extract_keywords,
    keyword_membership,
    copy_targets,
    is_discriminative,
    format_top,
)
from emphi.keywords.stopwords import STOPWORDS

__all__ = [
    "KeywordTable",
    "KeywordMode",
    "extract_keywords",
    "keyword_membership",
    "copy_targets",
    "is_discriminative",
    "format_top",
    "STOPWORDS",
]
