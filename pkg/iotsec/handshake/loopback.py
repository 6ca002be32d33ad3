from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional

from .machine import HandshakeState, Phase, process_datagram, start_handshake
from .messages import HandshakeMessage, decode_flight, encode_flight

MAX_FLIGHTS = 32

Tamper = Callable[[int, bytes], bytes]


@dataclass(frozen=True)
class FlightRecord:
    index: int
    sender: str
    data: bytes

    @property
    def messages(self) -> List[HandshakeMessage]:
        return decode_flight(self.data)


@dataclass
class LoopbackTrace:
    flights: List[FlightRecord] = field(default_factory=list)

    @property
    def total_bytes(self) -> int:
        return sum(len(f.data) for f in self.flights)


def run_loopback(
    initiator: HandshakeState,
    responder: HandshakeState,
    *,
    tamper: Optional[Tamper] = None,
) -> LoopbackTrace:
    """Drive two machines over a perfect in-memory link until neither has anything to say.

    ``tamper(index, data)`` may rewrite any flight in transit.
    """
    trace = LoopbackTrace()
    queue = [("initiator", encode_flight([start_handshake(initiator, now=0)]))]
    now = 0
    while queue and len(trace.flights) < MAX_FLIGHTS:
        sender, data = queue.pop(0)
        if tamper is not None:
            data = tamper(len(trace.flights), data)
        trace.flights.append(FlightRecord(index=len(trace.flights), sender=sender, data=data))
        now += 1
        receiver, other = (responder, "responder") if sender == "initiator" else (initiator, "initiator")
        result = process_datagram(receiver, data, now)
        if result.outbound:
            queue.append((other, encode_flight(result.outbound)))
    return trace


def both_established(initiator: HandshakeState, responder: HandshakeState) -> bool:
    return initiator.phase is Phase.ESTABLISHED and responder.phase is Phase.ESTABLISHED
