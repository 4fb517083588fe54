"""Wire formats for the three UDP channels and the console bridge."""

from .commands import CommandError, ControlCommand, Origin, Verb, encode_command, parse_command
from .frames import (
    MAX_DATAGRAM_BYTES,
    DecodeError,
    EncodeError,
    FramePacket,
    decode_frame_packet,
    encode_frame_packet,
)
from .telemetry import DroneMode, Telemetry, TelemetryError, encode_telemetry, parse_telemetry
from .bridge import BridgeError, BridgeMessage, BridgeKind, parse_bridge_message, serialize_bridge_message

# Default ports, overridable via configuration for multi-instance runs.
FRAME_PORT = 11111
COMMAND_PORT = 8889
TELEMETRY_PORT = 8890
BRIDGE_PORT = 8080

__all__ = [
    "BRIDGE_PORT",
    "COMMAND_PORT",
    "FRAME_PORT",
    "MAX_DATAGRAM_BYTES",
    "TELEMETRY_PORT",
    "BridgeError",
    "BridgeKind",
    "BridgeMessage",
    "CommandError",
    "ControlCommand",
    "DecodeError",
    "DroneMode",
    "EncodeError",
    "FramePacket",
    "Origin",
    "Telemetry",
    "TelemetryError",
    "Verb",
    "decode_frame_packet",
    "encode_command",
    "encode_frame_packet",
    "encode_telemetry",
    "parse_bridge_message",
    "parse_command",
    "parse_telemetry",
    "serialize_bridge_message",
]
