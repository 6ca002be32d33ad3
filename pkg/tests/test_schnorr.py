import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iotsec.curves import P256, T17
from iotsec.ecc import IDENTITY, keygen
from iotsec.errors import InvalidPoint, MalformedEncoding
from iotsec.schnorr import Signature, decode_signature, encode_signature, sign, verify, verify_encoded

KEY = keygen(P256, random.Random(7))
OTHER = keygen(P256, random.Random(8))


def test_sign_then_verify():
    sig = sign(P256, KEY, b"open the garage")
    assert verify(P256, KEY.q, b"open the garage", sig)


def test_signatures_are_deterministic():
    assert sign(P256, KEY, b"m") == sign(P256, KEY, b"m")
    assert sign(P256, KEY, b"m") != sign(P256, KEY, b"n")


def test_wrong_message_or_key_fails():
    sig = sign(P256, KEY, b"toggle")
    assert not verify(P256, KEY.q, b"toggle!", sig)
    assert not verify(P256, OTHER.q, b"toggle", sig)


def test_tampered_scalar_fails():
    sig = sign(P256, KEY, b"toggle")
    assert not verify(P256, KEY.q, b"toggle", Signature(sig.r_point, (sig.s + 1) % P256.n))
    assert not verify(P256, KEY.q, b"toggle", Signature(sig.r_point, P256.n))


def test_empty_message():
    with pytest.raises(ValueError):
        sign(P256, KEY, b"")
    assert not verify(P256, KEY.q, b"", sign(P256, KEY, b"x"))


def test_identity_public_key_rejected():
    with pytest.raises(InvalidPoint):
        verify(P256, IDENTITY, b"x", sign(P256, KEY, b"x"))


def test_toy_curve_round_trip():
    key = keygen(T17, random.Random(3))
    sig = sign(T17, key, b"hello")
    assert verify(T17, key.q, b"hello", sig)
    assert len(encode_signature(T17, sig)) == 4


def test_encoding_layout():
    sig = sign(P256, KEY, b"layout")
    data = encode_signature(P256, sig)
    assert len(data) == 65 + 32
    assert data[0] == 0x04
    assert decode_signature(P256, data) == sig
    assert verify_encoded(P256, KEY.q, b"layout", data)


@pytest.mark.parametrize("data", [b"", b"\x04" * 10, b"\x05" + b"\x00" * 96])
def test_malformed_signatures(data):
    with pytest.raises(MalformedEncoding):
        decode_signature(P256, data)
    assert not verify_encoded(P256, KEY.q, b"x", data)


@settings(max_examples=20, deadline=None)
@given(st.binary(min_size=1, max_size=256))
def test_any_message_verifies(message):
    assert verify(P256, KEY.q, message, sign(P256, KEY, message))


@pytest.mark.slow
@settings(max_examples=500, deadline=None)
@given(st.binary(min_size=1, max_size=64), st.integers(min_value=0, max_value=96 * 8 - 1))
def test_bit_flips_break_the_signature(message, bit):
    data = bytearray(encode_signature(P256, sign(P256, KEY, message)))
    data[bit // 8 + 1] ^= 1 << (bit % 8)
    assert not verify_encoded(P256, KEY.q, message, bytes(data))


@pytest.mark.slow
@settings(max_examples=500, deadline=None)
@given(st.binary(min_size=1, max_size=64), st.data())
def test_message_bit_flips_break_the_signature(message, data):
    signature = sign(P256, KEY, message)
    bit = data.draw(st.integers(min_value=0, max_value=len(message) * 8 - 1))
    flipped = bytearray(message)
    flipped[bit // 8] ^= 1 << (bit % 8)
    assert not verify(P256, KEY.q, bytes(flipped), signature)
