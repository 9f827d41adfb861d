"""Operator-facing service: wire protocol, session state machine, server."""

from .protocol import (
    ALL_MESSAGE_TYPES,
    PROTOCOL_VERSION,
    MalformedMessage,
    Message,
    UnknownType,
    decode_message,
    encode_message,
)
from .session import Phase, Session, SessionConfig

__all__ = [
    "ALL_MESSAGE_TYPES",
    "PROTOCOL_VERSION",
    "MalformedMessage",
    "Message",
    "Phase",
    "Session",
    "SessionConfig",
    "UnknownType",
    "decode_message",
    "encode_message",
]
