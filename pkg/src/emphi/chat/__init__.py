from emphi.chat.session import ChatSession, ChatTurn, sorted_distribution
from emphi.chat.app import ChatApp

__all__ = ["ChatApp", "ChatSession", "ChatTurn", "sorted_distribution"]
