from __future__ import annotations

from typing import Callable, Dict, Optional

from ..state import DeviceState

TOGGLE_COMMAND = b"toggle"

# A behavior consumes one request payload and returns the reply, or None for no reply
Behavior = Callable[[DeviceState, bytes], Optional[bytes]]


def report_temperature(device: DeviceState, payload: bytes) -> Optional[bytes]:
    # Readings walk 21.0 .. 25.5 in half-degree steps, one step per request
    device.reading = 21.0 + (device.received % 10) * 0.5
    return f"temp={device.reading:.1f}C".encode("ascii")


def toggle_state(device: DeviceState, payload: bytes) -> Optional[bytes]:
    if payload == TOGGLE_COMMAND:
        device.on = not device.on
    return b"state=on" if device.on else b"state=off"


def sink(device: DeviceState, payload: bytes) -> Optional[bytes]:
    return None


BEHAVIORS: Dict[str, Behavior] = {
    "report_temperature": report_temperature,
    "toggle_state": toggle_state,
    "sink": sink,
}


def handle_request(device: DeviceState, payload: bytes) -> Optional[bytes]:
    reply = BEHAVIORS[device.behavior](device, payload)
    device.received += 1
    device.last_payload = payload
    return reply
