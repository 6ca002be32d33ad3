import random
from typing import List

import pytest

from iotsec.certificates import SubjectKind, self_signed_certificate
from iotsec.curves import P256, T17
from iotsec.ecc import keygen
from iotsec.errors import AbortReason, HandshakeTimeout, MalformedMessage, PeerAborted, WrongPhase
from iotsec.handshake import (
    Abort,
    CertificateMsg,
    CertificateVerify,
    ClientHello,
    Finished,
    HelloVerifyRequest,
    KeyExchange,
    Phase,
    ServerHello,
    StaticIdentity,
    both_established,
    compute_cookie,
    decode_flight,
    decode_message,
    derive_session_keys,
    encode_flight,
    encode_message,
    flight_size,
    on_timeout,
    process_datagram,
    process_message,
    retransmit_due,
    run_loopback,
    screen_first_flight,
    start_handshake,
)

from conftest import build_pair


def _replace(data: bytes, index: int, message) -> bytes:
    messages = decode_flight(data)
    messages[index] = message
    return encode_flight(messages)


def _flip_last_byte(blob: bytes) -> bytes:
    return blob[:-1] + bytes([blob[-1] ^ 0x01])


@pytest.mark.parametrize("curve", [T17, P256], ids=lambda c: c.name)
def test_loopback_establishes(curve):
    initiator, responder, _ = build_pair(curve)
    trace = run_loopback(initiator, responder)

    assert both_established(initiator, responder)
    assert initiator.session_keys == responder.session_keys
    assert len(initiator.session_keys.session_id) == 4
    assert initiator.peer_id == "gw1"
    assert responder.peer_id == "alice"
    assert [f.sender for f in trace.flights] == ["initiator", "responder"] * 3
    kinds: List[List[type]] = [[type(m) for m in f.messages] for f in trace.flights]
    assert kinds == [
        [ClientHello],
        [HelloVerifyRequest],
        [ClientHello],
        [ServerHello, CertificateMsg, KeyExchange],
        [CertificateMsg, KeyExchange, CertificateVerify, Finished],
        [Finished],
    ]


def test_p256_flight_sizes():
    initiator, responder, _ = build_pair(P256)
    trace = run_loopback(initiator, responder)
    assert [len(f.data) for f in trace.flights] == [36, 19, 52, 395, 497, 35]
    assert trace.total_bytes == 1034


def test_different_runs_produce_different_keys():
    a_init, a_resp, _ = build_pair(P256, seed=1)
    b_init, b_resp, _ = build_pair(P256, seed=2)
    run_loopback(a_init, a_resp)
    run_loopback(b_init, b_resp)
    assert a_init.session_keys != b_init.session_keys


def test_responder_is_stateless_before_cookie():
    initiator, responder, _ = build_pair(T17)
    f1 = encode_flight([start_handshake(initiator, now=0)])
    result = process_datagram(responder, f1, 1)
    assert [type(m) for m in result.outbound] == [HelloVerifyRequest]
    assert responder.phase is Phase.IDLE
    assert responder.client_nonce == b""
    # the same hello gets the same cookie
    again = process_datagram(responder, f1, 2)
    assert again.outbound == result.outbound


def test_bad_cookie_aborts():
    initiator, responder, _ = build_pair(P256)
    hello = ClientHello(client_nonce=b"\x01" * 32, cookie=b"\x00" * 16)
    result = process_message(responder, hello, 0)
    assert responder.phase is Phase.FAILED
    assert responder.failure_reason is AbortReason.BAD_COOKIE
    assert result.outbound == [Abort(reason=AbortReason.BAD_COOKIE)]


def test_tampered_key_exchange_signature():
    initiator, responder, _ = build_pair(P256)

    def tamper(index: int, data: bytes) -> bytes:
        if index != 3:
            return data
        kx = decode_flight(data)[2]
        return _replace(data, 2, KeyExchange(kx.ephemeral_public, _flip_last_byte(kx.signature)))

    run_loopback(initiator, responder, tamper=tamper)
    assert initiator.failure_reason is AbortReason.BAD_SIGNATURE
    assert responder.failure_reason is AbortReason.PEER_ABORT
    assert initiator.session_keys is None and responder.session_keys is None


def test_tampered_certificate_verify():
    initiator, responder, _ = build_pair(P256)

    def tamper(index: int, data: bytes) -> bytes:
        if index != 4:
            return data
        cv = decode_flight(data)[2]
        return _replace(data, 2, CertificateVerify(_flip_last_byte(cv.signature)))

    run_loopback(initiator, responder, tamper=tamper)
    assert responder.failure_reason is AbortReason.BAD_SIGNATURE
    assert initiator.failure_reason is AbortReason.PEER_ABORT


def test_tampered_finished():
    initiator, responder, _ = build_pair(P256)

    def tamper(index: int, data: bytes) -> bytes:
        return _replace(data, 3, Finished(b"\x00" * 32)) if index == 4 else data

    run_loopback(initiator, responder, tamper=tamper)
    assert responder.failure_reason is AbortReason.BAD_FINISHED
    assert not both_established(initiator, responder)


def test_tampered_server_finished():
    initiator, responder, _ = build_pair(P256)

    def tamper(index: int, data: bytes) -> bytes:
        return encode_flight([Finished(b"\xff" * 32)]) if index == 5 else data

    run_loopback(initiator, responder, tamper=tamper)
    assert responder.phase is Phase.ESTABLISHED
    assert initiator.failure_reason is AbortReason.BAD_FINISHED


def test_self_signed_initiator_rejected():
    key = keygen(P256, random.Random(99))
    forged = StaticIdentity(key, self_signed_certificate(P256, key, "alice", SubjectKind.USER))
    initiator, responder, _ = build_pair(P256, initiator_identity=forged)
    run_loopback(initiator, responder)
    assert responder.failure_reason is AbortReason.BAD_CERTIFICATE
    assert initiator.phase is Phase.FAILED


@pytest.mark.slow
def test_self_signed_never_establishes():
    established = 0
    for seed in range(100):
        key = keygen(P256, random.Random(10_000 + seed))
        forged = StaticIdentity(key, self_signed_certificate(P256, key, "alice", SubjectKind.USER))
        initiator, responder, _ = build_pair(P256, seed=seed, initiator_identity=forged)
        run_loopback(initiator, responder)
        established += responder.phase is Phase.ESTABLISHED
    assert established == 0


def test_revoked_initiator_rejected():
    initiator, responder, registry = build_pair(P256)
    registry.revoke("alice")
    run_loopback(initiator, responder)
    assert responder.failure_reason is AbortReason.BAD_CERTIFICATE


def test_unexpected_peer_rejected():
    initiator, responder, _ = build_pair(P256)
    initiator.expected_peer = "gw2"
    run_loopback(initiator, responder)
    assert initiator.failure_reason is AbortReason.BAD_CERTIFICATE
    assert responder.failure_reason is AbortReason.PEER_ABORT


def test_duplicate_flight_triggers_resend():
    initiator, responder, _ = build_pair(T17)
    f1 = encode_flight([start_handshake(initiator, now=0)])
    f2 = encode_flight(process_datagram(responder, f1, 1).outbound)
    f3 = encode_flight(process_datagram(initiator, f2, 2).outbound)
    f4 = encode_flight(process_datagram(responder, f3, 3).outbound)
    f5_messages = process_datagram(initiator, f4, 4).outbound
    assert initiator.phase is Phase.KEYS_SENT

    # F5 lost; the responder's retransmitted F4 makes the initiator resend F5
    again = process_datagram(initiator, f4, 7)
    assert again.outbound == f5_messages
    assert initiator.phase is Phase.KEYS_SENT
    assert initiator.retransmits == 0

    f6 = encode_flight(process_datagram(responder, encode_flight(again.outbound), 8).outbound)
    # a duplicated F5 after establishment gets F6 again
    assert encode_flight(process_datagram(responder, encode_flight(f5_messages), 9).outbound) == f6
    process_datagram(initiator, f6, 10)
    assert both_established(initiator, responder)
    # late copies of old flights change nothing
    assert process_datagram(initiator, f2, 11).outbound == []
    assert process_datagram(initiator, f6, 12).outbound == []
    assert initiator.phase is Phase.ESTABLISHED


def test_retransmission_budget_then_timeout():
    initiator, _, _ = build_pair(T17, retransmit_budget=2, timeout=3)
    hello = start_handshake(initiator, now=0)
    assert not retransmit_due(initiator, 2)
    assert retransmit_due(initiator, 3)
    assert on_timeout(initiator, 3) == [hello]
    assert on_timeout(initiator, 6) == [hello]
    assert initiator.retransmits == 2
    assert on_timeout(initiator, 9) == [Abort(reason=AbortReason.TIMEOUT)]
    assert initiator.phase is Phase.FAILED
    assert initiator.failure_reason is AbortReason.TIMEOUT
    assert isinstance(initiator.error, HandshakeTimeout)
    assert initiator.error.reason is initiator.failure_reason
    assert initiator.session_keys is None
    assert not retransmit_due(initiator, 100)
    assert on_timeout(initiator, 100) == []


def test_peer_abort():
    initiator, _, _ = build_pair(T17)
    start_handshake(initiator, now=0)
    assert process_message(initiator, Abort(reason=AbortReason.BAD_COOKIE), 1).outbound == []
    assert initiator.phase is Phase.FAILED
    assert initiator.failure_reason is AbortReason.PEER_ABORT
    assert isinstance(initiator.error, PeerAborted)
    assert initiator.error.reason is AbortReason.PEER_ABORT


def test_abort_to_idle_responder_is_ignored():
    _, responder, _ = build_pair(T17)
    process_message(responder, Abort(reason=AbortReason.TIMEOUT), 0)
    assert responder.phase is Phase.IDLE


def test_failed_state_is_inert():
    initiator, _, _ = build_pair(T17)
    start_handshake(initiator, now=0)
    process_message(initiator, Abort(reason=AbortReason.TIMEOUT), 1)
    assert process_message(initiator, HelloVerifyRequest(cookie=b"\x00" * 16), 2).outbound == []
    assert initiator.phase is Phase.FAILED
    assert initiator.failure_reason is AbortReason.PEER_ABORT


def test_wrong_phase():
    _, responder, _ = build_pair(T17)
    result = process_message(responder, Finished(b"\x00" * 32), 0)
    assert responder.failure_reason is AbortReason.WRONG_PHASE
    assert result.outbound == [Abort(reason=AbortReason.WRONG_PHASE)]


def test_malformed_datagram():
    _, responder, _ = build_pair(T17)
    result = process_datagram(responder, b"\x01\x00\x05abc", 0)
    assert responder.failure_reason is AbortReason.MALFORMED_MESSAGE
    assert result.outbound == [Abort(reason=AbortReason.MALFORMED_MESSAGE)]


def test_start_only_from_idle_initiator():
    initiator, responder, _ = build_pair(T17)
    with pytest.raises(WrongPhase):
        start_handshake(responder)
    start_handshake(initiator)
    with pytest.raises(WrongPhase):
        start_handshake(initiator)


@pytest.mark.parametrize("curve", [T17, pytest.param(P256, marks=pytest.mark.slow)], ids=lambda c: c.name)
def test_any_single_bit_flip_withholds_keys(curve):
    clean_initiator, clean_responder, _ = build_pair(curve)
    sizes = [len(f.data) for f in run_loopback(clean_initiator, clean_responder).flights]
    assert len(sizes) == 6

    for index, size in enumerate(sizes):
        for pos in range(size):

            def tamper(i: int, data: bytes, index=index, pos=pos) -> bytes:
                if i != index:
                    return data
                flipped = bytearray(data)
                flipped[pos] ^= 1 << (pos % 8)
                return bytes(flipped)

            initiator, responder, _ = build_pair(curve)
            run_loopback(initiator, responder, tamper=tamper)
            where = f"flight {index + 1} byte {pos}"
            assert initiator.phase is not Phase.ESTABLISHED, where
            assert initiator.session_keys is None, where
            # the responder has already released its keys when the last flight leaves
            if index < 5:
                assert responder.phase is not Phase.ESTABLISHED, where
                assert responder.session_keys is None, where


def _state_in(role: str, phase: Phase):
    """A T17 machine driven by an honest peer until it sits in ``phase``."""
    initiator, responder, _ = build_pair(T17)
    target = initiator if role == "initiator" else responder
    if target.phase is phase:
        return target
    pending: List = [start_handshake(initiator, now=0)]
    receiver, sender = responder, initiator
    now = 0
    while target.phase is not phase:
        assert pending, f"{role} never reached {phase.value}"
        now += 1
        outbound: List = []
        for message in pending:
            outbound += process_message(receiver, message, now).outbound
            if target.phase is phase:
                return target
        pending = outbound
        receiver, sender = sender, receiver
    return target


_PHASES = [
    ("initiator", Phase.IDLE),
    ("initiator", Phase.AWAITING_COOKIE),
    ("initiator", Phase.HELLO_SENT),
    ("initiator", Phase.KEYS_SENT),
    ("initiator", Phase.ESTABLISHED),
    ("responder", Phase.IDLE),
    ("responder", Phase.PARAMS_SENT),
    ("responder", Phase.FINISHED_WAIT),
    ("responder", Phase.ESTABLISHED),
]

_FORGED = {
    "ClientHello": ClientHello(client_nonce=b"\x07" * 32, cookie=b"\x00" * 16),
    "HelloVerifyRequest": HelloVerifyRequest(cookie=b"\x00" * 16),
    "ServerHello": ServerHello(server_nonce=b"\x07" * 32),
    "CertificateMsg": CertificateMsg(certificate=b"\x00" * 10),
    "KeyExchange": KeyExchange(ephemeral_public=b"\x04\x01\x02", signature=b"\x00" * 4),
    "CertificateVerify": CertificateVerify(signature=b"\x00" * 4),
    "Finished": Finished(verify_mac=b"\x00" * 32),
}

# a forged message of the next expected type is legitimately absorbed here
_ABSORBED = {
    ("initiator", Phase.AWAITING_COOKIE, "HelloVerifyRequest"),
    ("initiator", Phase.HELLO_SENT, "ServerHello"),
}


@pytest.mark.parametrize(
    "role, phase, name",
    [
        pytest.param(role, phase, name, id=f"{role}-{phase.value}-{name}")
        for role, phase in _PHASES
        for name in _FORGED
        if (role, phase, name) not in _ABSORBED
    ],
)
def test_forged_message_in_any_phase_fails_closed(role, phase, name):
    state = _state_in(role, phase)
    assert state.phase is phase
    result = process_message(state, _FORGED[name], 50)
    assert state.phase is Phase.FAILED
    assert state.session_keys is None
    assert state.error is not None and state.failure_reason is state.error.reason
    assert [type(m) for m in result.outbound] == [Abort]


# --- codec -------------------------------------------------------------------


def test_message_header_layout():
    hello = ClientHello(client_nonce=b"\x11" * 32)
    data = encode_message(hello)
    assert data[:3] == b"\x01\x00\x21"
    assert decode_message(data) == hello
    assert flight_size([hello, Abort(reason=AbortReason.TIMEOUT)]) == len(data) + 4


@pytest.mark.parametrize(
    "data",
    [
        b"",
        b"\x01\x00",
        b"\x09\x00\x00",
        b"\x08\x00\x01\x42",
        b"\x02\x00\x03abc",
        b"\x01\x00\x21" + b"\x00" * 32 + b"\x05",
        b"\x07\x00\x20" + b"\x00" * 31,
        b"\x05\x00\x03\x00\x05\x04",
    ],
)
def test_malformed_messages(data):
    with pytest.raises(MalformedMessage):
        decode_flight(data)


def test_trailing_bytes_rejected():
    with pytest.raises(MalformedMessage):
        decode_message(encode_message(Abort(reason=AbortReason.TIMEOUT)) + b"\x00")


def test_session_key_derivation():
    keys = derive_session_keys(b"secret", b"\x01" * 32, b"\x02" * 32)
    assert keys == derive_session_keys(b"secret", b"\x01" * 32, b"\x02" * 32)
    assert len({keys.initiator_write_key, keys.responder_write_key, keys.initiator_mac_key, keys.responder_mac_key}) == 4
    assert keys != derive_session_keys(b"secret", b"\x01" * 32, b"\x03" * 32)
    swapped = derive_session_keys(b"secret", b"\x02" * 32, b"\x01" * 32)
    assert swapped != keys
    assert swapped.session_id != keys.session_id
    own = {keys.initiator_write_key, keys.responder_write_key, keys.initiator_mac_key, keys.responder_mac_key}
    assert own.isdisjoint(
        {swapped.initiator_write_key, swapped.responder_write_key, swapped.initiator_mac_key, swapped.responder_mac_key}
    )
    with pytest.raises(ValueError):
        derive_session_keys(b"", b"\x01" * 32, b"\x02" * 32)


def test_cookie_binds_address_and_nonce():
    cookie = compute_cookie(b"k" * 32, b"198.51.0.4", b"\x01" * 32)
    assert len(cookie) == 16
    assert cookie != compute_cookie(b"k" * 32, b"198.51.0.5", b"\x01" * 32)
    assert cookie != compute_cookie(b"k" * 32, b"198.51.0.4", b"\x02" * 32)


def _random_address(rng: random.Random) -> bytes:
    return f"198.51.{rng.randrange(256)}.{rng.randrange(256)}".encode("ascii")


def test_cookie_differs_across_random_address_pairs():
    rng = random.Random(4242)
    secret = bytes(range(32))
    for _ in range(100):
        address = _random_address(rng)
        other = _random_address(rng)
        while other == address:
            other = _random_address(rng)
        nonce = bytes(rng.getrandbits(8) for _ in range(32))
        cookie = compute_cookie(secret, address, nonce)
        assert cookie == compute_cookie(secret, address, nonce)
        assert cookie != compute_cookie(secret, other, nonce), (address, other)
        assert cookie != compute_cookie(b"\xff" * 32, address, nonce)


def test_screen_first_flight():
    secret, address, nonce = bytes(range(32)), b"198.51.0.4", b"\x03" * 32
    cookie = compute_cookie(secret, address, nonce)
    hello = encode_flight([ClientHello(client_nonce=nonce)])
    assert screen_first_flight(secret, address, hello) == (False, [HelloVerifyRequest(cookie=cookie)])
    returned = encode_flight([ClientHello(client_nonce=nonce, cookie=cookie)])
    assert screen_first_flight(secret, address, returned) == (True, [])
    assert screen_first_flight(secret, b"198.51.0.5", returned) == (False, [])
    assert screen_first_flight(secret, address, b"\x05\x00\x00") == (False, [])
    assert screen_first_flight(secret, address, returned + returned) == (False, [])
    assert screen_first_flight(secret, address, encode_flight([ServerHello(server_nonce=nonce)])) == (False, [])
