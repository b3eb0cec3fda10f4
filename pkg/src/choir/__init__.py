"""CHOIR: chat-driven organizational knowledge repository."""

__version__ = "0.1.0"
