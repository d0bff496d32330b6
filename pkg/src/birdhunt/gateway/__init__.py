from .protocol import PROTOCOL_VERSION, ProtocolError, parse_client_message
from .server import MetricsBus, make_app

__all__ = [
    "MetricsBus",
    "PROTOCOL_VERSION",
    "ProtocolError",
    "make_app",
    "parse_client_message",
]
