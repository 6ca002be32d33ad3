"""
Cookie-protected, mutually authenticated handshake (DTLS-style, not RFC wire
compatible).

    F1  I -> R  ClientHello (no cookie)
    F2  R -> I  HelloVerifyRequest (cookie)
    F3  I -> R  ClientHello (cookie)
    F4  R -> I  ServerHello, Certificate, KeyExchange
    F5  I -> R  Certificate, KeyExchange, CertificateVerify, Finished
    F6  R -> I  Finished

The transcript starts at F3 so the responder holds no state before a valid
cookie. Static keys only sign; the session secret comes from ephemeral ECDH.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Set, Tuple

from ..certificates import Certificate, CertificateStatus, decode_certificate, encode_certificate, verify_certificate
from ..ecc import CurveParams, CurvePoint, KeyPair, decode_point, ecdh, encode_point, keygen
from ..errors import (
    AbortReason,
    BadCertificate,
    BadCookie,
    BadFinished,
    BadSignature,
    CryptoError,
    HandshakeError,
    HandshakeTimeout,
    MalformedMessage,
    PeerAborted,
    WrongPhase,
)
from ..hashing import RunningHash, keyed_hash, same_bytes
from ..schnorr import encode_signature, sign, verify_encoded
from .keys import SessionKeys, compute_cookie, derive_session_keys
from .messages import (
    NONCE_SIZE,
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
    encode_message,
)

log = logging.getLogger(__name__)

DEFAULT_RETRANSMIT_BUDGET = 5
DEFAULT_TIMEOUT = 3


class Role(str, Enum):
    INITIATOR = "initiator"
    RESPONDER = "responder"


class Phase(str, Enum):
    IDLE = "idle"
    AWAITING_COOKIE = "awaiting_cookie"
    HELLO_SENT = "hello_sent"
    PARAMS_SENT = "params_sent"
    KEYS_SENT = "keys_sent"
    FINISHED_WAIT = "finished_wait"
    ESTABLISHED = "established"
    FAILED = "failed"


_QUIET_PHASES = (Phase.IDLE, Phase.ESTABLISHED, Phase.FAILED)


@dataclass(frozen=True)
class TrustAnchor:
    """Root public key plus the registry's view of certificate status."""

    root_public: CurvePoint
    status_of: Callable[[str], CertificateStatus]


@dataclass(frozen=True)
class StaticIdentity:
    key: KeyPair
    certificate: Certificate


@dataclass
class ProcessResult:
    outbound: List[HandshakeMessage] = field(default_factory=list)
    session_keys: Optional[SessionKeys] = None


@dataclass
class HandshakeState:
    role: Role
    curve: CurveParams
    own_static: StaticIdentity
    trust: TrustAnchor
    rng: random.Random = field(repr=False)
    ephemeral: Optional[KeyPair] = field(default=None, repr=False)
    phase: Phase = Phase.IDLE
    expected_peer: Optional[str] = None
    # responder side: who we are talking to and the secret behind our cookies
    peer_address: bytes = b""
    cookie_secret: Optional[bytes] = field(default=None, repr=False)
    retransmit_budget: int = DEFAULT_RETRANSMIT_BUDGET
    timeout: int = DEFAULT_TIMEOUT

    peer_certificate: Optional[Certificate] = None
    client_nonce: bytes = b""
    server_nonce: bytes = b""
    cookie: bytes = b""
    transcript: RunningHash = field(default_factory=RunningHash, repr=False)
    session_keys: Optional[SessionKeys] = field(default=None, repr=False)
    retransmits: int = 0
    last_flight: List[HandshakeMessage] = field(default_factory=list, repr=False)
    last_sent_at: int = 0
    error: Optional[HandshakeError] = None
    failure_reason: Optional[AbortReason] = None

    _expect: Tuple[MessageType, ...] = field(default=(), repr=False)
    _inbound: List[bytes] = field(default_factory=list, repr=False)
    _peer_flight: List[bytes] = field(default_factory=list, repr=False)
    _peer_history: Set[bytes] = field(default_factory=set, repr=False)
    _peer_ephemeral: Optional[CurvePoint] = field(default=None, repr=False)
    _pending_keys: Optional[SessionKeys] = field(default=None, repr=False)

    @property
    def peer_id(self) -> Optional[str]:
        return self.peer_certificate.subject_id if self.peer_certificate else None


def new_initiator(
    curve: CurveParams,
    identity: StaticIdentity,
    trust: TrustAnchor,
    rng: random.Random,
    *,
    expected_peer: Optional[str] = None,
    retransmit_budget: int = DEFAULT_RETRANSMIT_BUDGET,
    timeout: int = DEFAULT_TIMEOUT,
) -> HandshakeState:
    return HandshakeState(
        role=Role.INITIATOR,
        curve=curve,
        own_static=identity,
        trust=trust,
        rng=rng,
        ephemeral=keygen(curve, rng),
        expected_peer=expected_peer,
        retransmit_budget=retransmit_budget,
        timeout=timeout,
    )


def new_responder(
    curve: CurveParams,
    identity: StaticIdentity,
    trust: TrustAnchor,
    rng: random.Random,
    *,
    cookie_secret: bytes,
    peer_address: bytes,
    retransmit_budget: int = DEFAULT_RETRANSMIT_BUDGET,
    timeout: int = DEFAULT_TIMEOUT,
) -> HandshakeState:
    return HandshakeState(
        role=Role.RESPONDER,
        curve=curve,
        own_static=identity,
        trust=trust,
        rng=rng,
        ephemeral=keygen(curve, rng),
        peer_address=peer_address,
        cookie_secret=cookie_secret,
        retransmit_budget=retransmit_budget,
        timeout=timeout,
    )


# --- helpers -----------------------------------------------------------------


def _nonce(state: HandshakeState) -> bytes:
    return state.rng.getrandbits(8 * NONCE_SIZE).to_bytes(NONCE_SIZE, "big")


def _send(state: HandshakeState, flight: List[HandshakeMessage], now: int) -> List[HandshakeMessage]:
    state.last_flight = list(flight)
    state.retransmits = 0
    state.last_sent_at = now
    return list(flight)


def _absorb(state: HandshakeState, message: HandshakeMessage, encoded: bytes) -> None:
    if not state._expect or message.TYPE != state._expect[0]:
        expected = state._expect[0].name if state._expect else "nothing"
        raise WrongPhase(f"{message.TYPE.name} while {state.phase.value}, expected {expected}")
    state._expect = state._expect[1:]
    state._inbound.append(encoded)
    state._peer_history.add(encoded)
    state.transcript.update(encoded)
    if not state._expect:
        state._peer_flight = state._inbound
        state._inbound = []


def _own_transcript(state: HandshakeState, messages: List[HandshakeMessage]) -> None:
    for message in messages:
        state.transcript.update(encode_message(message))


def _kx_payload(state: HandshakeState, ephemeral_public: bytes) -> bytes:
    return state.client_nonce + state.server_nonce + ephemeral_public


def _check_certificate(state: HandshakeState, data: bytes) -> Certificate:
    try:
        cert = decode_certificate(state.curve, data)
    except CryptoError as e:
        raise BadCertificate(f"undecodable certificate: {e}")
    if not verify_certificate(state.curve, state.trust.root_public, cert):
        raise BadCertificate(f"certificate for {cert.subject_id!r} is not signed by the registry root")
    status = state.trust.status_of(cert.subject_id)
    if status is not CertificateStatus.ACTIVE:
        raise BadCertificate(f"certificate for {cert.subject_id!r} is {status.value}")
    if state.expected_peer is not None and cert.subject_id != state.expected_peer:
        raise BadCertificate(f"expected {state.expected_peer!r}, got {cert.subject_id!r}")
    state.peer_certificate = cert
    return cert


def _check_key_exchange(state: HandshakeState, message: KeyExchange) -> SessionKeys:
    assert state.peer_certificate is not None and state.ephemeral is not None
    peer_static = state.peer_certificate.subject_public_key
    if not verify_encoded(state.curve, peer_static, _kx_payload(state, message.ephemeral_public), message.signature):
        raise BadSignature("KeyExchange signature does not verify under the peer certificate")
    state._peer_ephemeral = decode_point(state.curve, message.ephemeral_public)
    shared = ecdh(state.curve, state.ephemeral, state._peer_ephemeral)
    return derive_session_keys(shared, state.client_nonce, state.server_nonce)


def _own_key_exchange(state: HandshakeState) -> KeyExchange:
    assert state.ephemeral is not None
    eph = encode_point(state.curve, state.ephemeral.q)
    signature = sign(state.curve, state.own_static.key, _kx_payload(state, eph))
    return KeyExchange(ephemeral_public=eph, signature=encode_signature(state.curve, signature))


def _own_certificate(state: HandshakeState) -> CertificateMsg:
    return CertificateMsg(certificate=encode_certificate(state.curve, state.own_static.certificate))


def _fail(state: HandshakeState, exc: HandshakeError) -> ProcessResult:
    state.phase = Phase.FAILED
    state.error = exc
    state.failure_reason = exc.reason
    state.session_keys = None
    state._pending_keys = None
    log.info("handshake (%s) aborted: %s %s", state.role.value, exc.reason.name, exc)
    return ProcessResult(outbound=[Abort(reason=exc.reason)])


def _establish(state: HandshakeState) -> SessionKeys:
    assert state._pending_keys is not None
    state.phase = Phase.ESTABLISHED
    state.session_keys = state._pending_keys
    state._pending_keys = None
    log.info("handshake (%s) established with %s", state.role.value, state.peer_id)
    return state.session_keys


# --- initiator ---------------------------------------------------------------


def _initiator_step(state: HandshakeState, message: HandshakeMessage, encoded: bytes, now: int) -> ProcessResult:
    if state.phase is Phase.AWAITING_COOKIE:
        if not isinstance(message, HelloVerifyRequest):
            raise WrongPhase(f"{message.TYPE.name} while awaiting cookie")
        state.cookie = message.cookie
        state._peer_flight = [encoded]
        state._peer_history.add(encoded)
        hello = ClientHello(client_nonce=state.client_nonce, cookie=state.cookie)
        _own_transcript(state, [hello])
        state.phase = Phase.HELLO_SENT
        state._expect = (MessageType.SERVER_HELLO, MessageType.CERTIFICATE, MessageType.KEY_EXCHANGE)
        return ProcessResult(outbound=_send(state, [hello], now))

    if state.phase is Phase.HELLO_SENT:
        if isinstance(message, KeyExchange) and state._expect and state._expect[0] is MessageType.KEY_EXCHANGE:
            # verify before it enters the transcript
            state._pending_keys = _check_key_exchange(state, message)
        _absorb(state, message, encoded)
        if isinstance(message, ServerHello):
            state.server_nonce = message.server_nonce
        elif isinstance(message, CertificateMsg):
            _check_certificate(state, message.certificate)
        if state._expect:
            return ProcessResult()

        assert state._pending_keys is not None
        flight: List[HandshakeMessage] = [_own_certificate(state), _own_key_exchange(state)]
        _own_transcript(state, flight)
        cv = CertificateVerify(
            signature=encode_signature(state.curve, sign(state.curve, state.own_static.key, state.transcript.snapshot()))
        )
        _own_transcript(state, [cv])
        fin = Finished(verify_mac=keyed_hash(state._pending_keys.initiator_mac_key, state.transcript.snapshot()))
        _own_transcript(state, [fin])
        flight += [cv, fin]
        state.phase = Phase.KEYS_SENT
        state._expect = (MessageType.FINISHED,)
        return ProcessResult(outbound=_send(state, flight, now))

    if state.phase is Phase.KEYS_SENT:
        if isinstance(message, Finished):
            assert state._pending_keys is not None
            expected = keyed_hash(state._pending_keys.responder_mac_key, state.transcript.snapshot())
            if not same_bytes(expected, message.verify_mac):
                raise BadFinished("responder Finished does not match the transcript")
        _absorb(state, message, encoded)
        return ProcessResult(session_keys=_establish(state))

    raise WrongPhase(f"{message.TYPE.name} while {state.phase.value}")


# --- responder ---------------------------------------------------------------


def _responder_step(state: HandshakeState, message: HandshakeMessage, encoded: bytes, now: int) -> ProcessResult:
    if state.phase is Phase.IDLE:
        if not isinstance(message, ClientHello):
            raise WrongPhase(f"{message.TYPE.name} before ClientHello")
        assert state.cookie_secret is not None
        expected = compute_cookie(state.cookie_secret, state.peer_address, message.client_nonce)
        if message.cookie is None:
            # Stateless: nothing is remembered until the cookie comes back
            return ProcessResult(outbound=[HelloVerifyRequest(cookie=expected)])
        if not same_bytes(expected, message.cookie):
            raise BadCookie("cookie does not match initiator address and nonce")

        state.client_nonce = message.client_nonce
        state.cookie = message.cookie
        state.transcript.update(encoded)
        state._peer_flight = [encoded]
        state._peer_history.update((encoded, encode_message(ClientHello(client_nonce=message.client_nonce))))
        state.server_nonce = _nonce(state)
        flight: List[HandshakeMessage] = [
            ServerHello(server_nonce=state.server_nonce),
            _own_certificate(state),
            _own_key_exchange(state),
        ]
        _own_transcript(state, flight)
        state.phase = Phase.PARAMS_SENT
        state._expect = (
            MessageType.CERTIFICATE,
            MessageType.KEY_EXCHANGE,
            MessageType.CERTIFICATE_VERIFY,
            MessageType.FINISHED,
        )
        return ProcessResult(outbound=_send(state, flight, now))

    if state.phase in (Phase.PARAMS_SENT, Phase.FINISHED_WAIT):
        head = state._expect[0] if state._expect else None
        if isinstance(message, KeyExchange) and head is MessageType.KEY_EXCHANGE:
            state._pending_keys = _check_key_exchange(state, message)
        elif isinstance(message, CertificateVerify) and head is MessageType.CERTIFICATE_VERIFY:
            assert state.peer_certificate is not None
            if not verify_encoded(
                state.curve,
                state.peer_certificate.subject_public_key,
                state.transcript.snapshot(),
                message.signature,
            ):
                raise BadSignature("CertificateVerify does not cover our transcript")
        elif isinstance(message, Finished) and head is MessageType.FINISHED:
            assert state._pending_keys is not None
            expected = keyed_hash(state._pending_keys.initiator_mac_key, state.transcript.snapshot())
            if not same_bytes(expected, message.verify_mac):
                raise BadFinished("initiator Finished does not match the transcript")

        _absorb(state, message, encoded)
        if isinstance(message, CertificateMsg):
            _check_certificate(state, message.certificate)
        elif isinstance(message, CertificateVerify):
            state.phase = Phase.FINISHED_WAIT
        if state._expect:
            return ProcessResult()

        assert state._pending_keys is not None
        fin = Finished(verify_mac=keyed_hash(state._pending_keys.responder_mac_key, state.transcript.snapshot()))
        _own_transcript(state, [fin])
        outbound = _send(state, [fin], now)
        return ProcessResult(outbound=outbound, session_keys=_establish(state))

    raise WrongPhase(f"{message.TYPE.name} while {state.phase.value}")


# --- public operations -------------------------------------------------------


def start_handshake(state: HandshakeState, now: int = 0) -> ClientHello:
    if state.role is not Role.INITIATOR or state.phase is not Phase.IDLE:
        raise WrongPhase(f"cannot start a handshake from {state.role.value}/{state.phase.value}")
    state.client_nonce = _nonce(state)
    hello = ClientHello(client_nonce=state.client_nonce)
    state.phase = Phase.AWAITING_COOKIE
    _send(state, [hello], now)
    return hello


def process_message(state: HandshakeState, message: HandshakeMessage, now: int) -> ProcessResult:
    if state.phase is Phase.FAILED:
        return ProcessResult()

    if isinstance(message, Abort):
        if state.phase is Phase.ESTABLISHED or (state.phase is Phase.IDLE and state.role is Role.RESPONDER):
            return ProcessResult()
        state.phase = Phase.FAILED
        state.error = PeerAborted(f"peer sent abort {message.reason.name}")
        state.failure_reason = AbortReason.PEER_ABORT
        state.session_keys = None
        state._pending_keys = None
        log.info("handshake (%s) aborted by peer: %s", state.role.value, message.reason.name)
        return ProcessResult()

    encoded = encode_message(message)
    if encoded in state._peer_flight:
        # The peer retransmitted its last flight, so ours was lost
        if encoded == state._peer_flight[0] and not (
            state.role is Role.INITIATOR and state.phase is Phase.ESTABLISHED
        ):
            state.last_sent_at = now
            return ProcessResult(outbound=list(state.last_flight))
        return ProcessResult()
    if encoded in state._peer_history:
        # late copy of an older flight, already answered
        return ProcessResult()

    try:
        if state.role is Role.INITIATOR:
            return _initiator_step(state, message, encoded, now)
        return _responder_step(state, message, encoded, now)
    except HandshakeError as exc:
        return _fail(state, exc)
    except CryptoError as exc:
        return _fail(state, MalformedMessage(str(exc)))


def process_datagram(state: HandshakeState, data: bytes, now: int) -> ProcessResult:
    """Decode a whole flight and feed it message by message."""
    if state.phase is Phase.FAILED:
        return ProcessResult()
    try:
        messages = decode_flight(data)
    except MalformedMessage as exc:
        return _fail(state, exc)
    result = ProcessResult()
    for message in messages:
        step = process_message(state, message, now)
        result.outbound.extend(step.outbound)
        if step.session_keys is not None:
            result.session_keys = step.session_keys
        if state.phase is Phase.FAILED:
            break
    return result


def screen_first_flight(
    cookie_secret: bytes, peer_address: bytes, data: bytes
) -> Tuple[bool, List[HandshakeMessage]]:
    """Responder check for a peer it holds no state for.

    Returns ``(admit, reply)``. A cookie-less ClientHello is answered with a
    HelloVerifyRequest and nothing is kept. Only a ClientHello whose cookie
    matches is admitted; anything else is dropped without a reply.
    """
    try:
        messages = decode_flight(data)
    except MalformedMessage:
        return False, []
    if len(messages) != 1 or not isinstance(messages[0], ClientHello):
        return False, []
    hello = messages[0]
    expected = compute_cookie(cookie_secret, peer_address, hello.client_nonce)
    if hello.cookie is None:
        return False, [HelloVerifyRequest(cookie=expected)]
    return same_bytes(expected, hello.cookie), []


def retransmit_due(state: HandshakeState, now: int) -> bool:
    return state.phase not in _QUIET_PHASES and now - state.last_sent_at >= state.timeout


def on_timeout(state: HandshakeState, now: int) -> List[HandshakeMessage]:
    if state.phase in _QUIET_PHASES:
        return []
    if state.retransmits >= state.retransmit_budget:
        state.phase = Phase.FAILED
        state.error = HandshakeTimeout(f"no answer after {state.retransmits} retransmissions")
        state.failure_reason = AbortReason.TIMEOUT
        state.session_keys = None
        state._pending_keys = None
        log.info("handshake (%s) gave up after %d retransmissions", state.role.value, state.retransmits)
        return [Abort(reason=AbortReason.TIMEOUT)]
    state.retransmits += 1
    state.last_sent_at = now
    return list(state.last_flight)
