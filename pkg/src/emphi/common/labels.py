"labels.py - the fixed intent and emotion label sets."

from __future__ import annotations
from enum import IntEnum


class Intent(IntEnum):
    """The nine empathetic intents. Ids follow the canonical keyword-table order."""

    AGREEING = 0
    ACKNOWLEDGING = 1
    ENCOURAGING = 2
    CONSOLING = 3
    SYMPATHIZING = 4
    SUGGESTING = 5
    QUESTIONING = 6
    WISHING = 7
    NEUTRAL = 8

    @property
    def label(self) -> str:
        """Display name, e.g. `Sympathizing`."""
        return self.name.capitalize()

    @classmethod
    def from_name(cls, name: str) -> Intent:
        """Case-insensitive lookup by display name.

        Raises:
            ValueError: If the name is not one of the nine intents.
        """
        key = name.strip().upper()
        try:
            return cls[key]
        except KeyError:
            raise ValueError(f"unknown intent {name!r}; valid intents: {', '.join(INTENT_NAMES)}") from None


INTENT_NAMES: tuple[str, ...] = tuple(intent.label for intent in Intent)
NUM_INTENTS = len(INTENT_NAMES)

# The 32 EmpatheticDialogues situations, ids in alphabetical order.
EMOTION_NAMES: tuple[str, ...] = (
    "afraid",
    "angry",
    "annoyed",
    "anticipating",
    "anxious",
    "apprehensive",
    "ashamed",
    "caring",
    "confident",
    "content",
    "devastated",
    "disappointed",
    "disgusted",
    "embarrassed",
    "excited",
    "faithful",
    "furious",
    "grateful",
    "guilty",
    "hopeful",
    "impressed",
    "jealous",
    "joyful",
    "lonely",
    "nostalgic",
    "prepared",
    "proud",
    "sad",
    "sentimental",
    "surprised",
    "terrified",
    "trusting",
)
NUM_EMOTIONS = len(EMOTION_NAMES)
_EMOTION_IDS = {name: idx for idx, name in enumerate(EMOTION_NAMES)}


def emotion_id(name: str) -> int:
    """Map an emotion name to its id.

    Raises:
        ValueError: If the name is not one of the 32 situations.
    """
    try:
        return _EMOTION_IDS[name.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown emotion {name!r}") from None


def emotion_name(idx: int) -> str:
    if not 0 <= idx < NUM_EMOTIONS:
        raise ValueError(f"emotion id {idx} outside [0, {NUM_EMOTIONS})")
    return EMOTION_NAMES[idx]
