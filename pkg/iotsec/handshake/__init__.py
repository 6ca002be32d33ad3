from .keys import SessionKeys, compute_cookie, derive_session_keys
from .loopback import FlightRecord, LoopbackTrace, both_established, run_loopback
from .machine import (
    HandshakeState,
    Phase,
    ProcessResult,
    Role,
    StaticIdentity,
    TrustAnchor,
    new_initiator,
    new_responder,
    on_timeout,
    process_datagram,
    process_message,
    retransmit_due,
    screen_first_flight,
    start_handshake,
)
from .messages import (
    Abort,
    CertificateMsg,
    CertificateVerify,
    ClientHello,
    Finished,
    HandshakeMessage,
    HelloVerifyRequest,
    KeyExchange,
    MessageType,
    ServerHello,
    decode_flight,
    decode_message,
    encode_flight,
    encode_message,
    flight_size,
)

__all__ = [
    "Abort",
    "CertificateMsg",
    "CertificateVerify",
    "ClientHello",
    "Finished",
    "FlightRecord",
    "HandshakeMessage",
    "HandshakeState",
    "HelloVerifyRequest",
    "KeyExchange",
    "LoopbackTrace",
    "MessageType",
    "Phase",
    "ProcessResult",
    "Role",
    "ServerHello",
    "SessionKeys",
    "StaticIdentity",
    "TrustAnchor",
    "both_established",
    "compute_cookie",
    "decode_flight",
    "decode_message",
    "derive_session_keys",
    "encode_flight",
    "encode_message",
    "flight_size",
    "new_initiator",
    "new_responder",
    "on_timeout",
    "process_datagram",
    "process_message",
    "retransmit_due",
    "run_loopback",
    "screen_first_flight",
    "start_handshake",
]
