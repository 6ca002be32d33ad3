import json
from pathlib import Path

import pytest

from iotsec import errors
from iotsec.errors import MalformedMessage
from iotsec.handshake import decode_flight, decode_message, encode_flight, encode_message
from iotsec.tunnel import decode_frame, encode_frame

VECTORS = Path(__file__).parent / "vectors"


def _load(name: str) -> dict:
    return json.loads((VECTORS / name).read_text(encoding="utf-8"))


FRAMES = _load("tunnel_frames.json")
MESSAGES = _load("handshake_messages.json")


@pytest.mark.parametrize("vector", FRAMES["valid"], ids=lambda v: v["name"])
def test_frame_vectors(vector):
    data = bytes.fromhex(vector["hex"])
    frame = decode_frame(data)
    assert frame.session_id.hex() == vector["session_id"]
    assert frame.seq == vector["seq"]
    assert frame.ciphertext.hex() == vector["ciphertext"]
    assert frame.tag.hex() == vector["tag"]
    assert encode_frame(frame) == data


@pytest.mark.parametrize("vector", FRAMES["invalid"], ids=lambda v: v["name"])
def test_invalid_frame_vectors(vector):
    with pytest.raises(getattr(errors, vector["error"])):
        decode_frame(bytes.fromhex(vector["hex"]))


@pytest.mark.parametrize("vector", MESSAGES["valid"], ids=lambda v: v["name"])
def test_message_vectors(vector):
    data = bytes.fromhex(vector["hex"])
    message = decode_message(data)
    assert type(message).__name__ == vector["type"]
    assert encode_message(message) == data


@pytest.mark.parametrize("vector", MESSAGES["flights"], ids=lambda v: v["name"])
def test_flight_vectors(vector):
    data = bytes.fromhex(vector["hex"])
    messages = decode_flight(data)
    assert [type(m).__name__ for m in messages] == vector["types"]
    assert encode_flight(messages) == data


@pytest.mark.parametrize("vector", MESSAGES["invalid"], ids=lambda v: v["name"])
def test_invalid_message_vectors(vector):
    with pytest.raises(MalformedMessage):
        decode_flight(bytes.fromhex(vector["hex"]))
