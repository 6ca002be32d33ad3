from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

from ..registry import Decision


@dataclass
class DatagramCounters:
    sent: int = 0
    delivered: int = 0
    dropped: int = 0


@dataclass
class FrameCounters:
    sent: int = 0
    delivered: int = 0
    dropped: int = 0
    # rejection reason (error class name) -> count
    rejected: Dict[str, int] = field(default_factory=dict)

    @property
    def rejected_total(self) -> int:
        return sum(self.rejected.values())

    def consistent(self) -> bool:
        return self.delivered + self.rejected_total + self.dropped == self.sent


@dataclass
class PayloadCounters:
    planned: int = 0
    delivered: int = 0
    blocked: int = 0
    replies_sent: int = 0
    replies_delivered: int = 0


@dataclass
class LoginRecord:
    actor: str  # 'user' | 'adversary'
    username: str
    mac: str
    decision: Decision


@dataclass
class HandshakeOutcome:
    initiator: str
    responder: str
    outcome: str  # 'established' | 'failed' | 'pending' | 'denied'
    reason: Optional[str] = None
    established_at: Optional[int] = None
    bytes_on_wire: int = 0
    datagrams: int = 0


@dataclass
class AdversaryObservations:
    present: bool = False
    sniffing: bool = False
    captured_datagrams: int = 0
    captured_bytes: int = 0
    plaintext_recovered: int = 0
    frames_injected: int = 0
    frames_replayed: int = 0
    frames_accepted: int = 0
    handshakes_attempted: int = 0
    handshakes_established: int = 0
    errors: List[str] = field(default_factory=list)


@dataclass
class Verdicts:
    confidentiality: bool = True
    integrity: bool = True
    authenticity: bool = True
    replay_protection: bool = True

    @property
    def all_ok(self) -> bool:
        return self.confidentiality and self.integrity and self.authenticity and self.replay_protection


@dataclass
class SimReport:
    scenario: str
    curve: str
    seed: int
    epochs_run: int
    quiescent: bool
    handshakes: List[HandshakeOutcome] = field(default_factory=list)
    handshake_datagrams: DatagramCounters = field(default_factory=DatagramCounters)
    frames: FrameCounters = field(default_factory=FrameCounters)
    payloads: PayloadCounters = field(default_factory=PayloadCounters)
    devices: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    logins: List[LoginRecord] = field(default_factory=list)
    adversary: AdversaryObservations = field(default_factory=AdversaryObservations)
    verdicts: Verdicts = field(default_factory=Verdicts)
    key_sizes: Optional[Dict[str, Any]] = None

    @property
    def security_ok(self) -> bool:
        return self.verdicts.all_ok

    @property
    def replay_rejected(self) -> int:
        return self.frames.rejected.get("Replay", 0)

    def counts_consistent(self) -> bool:
        return self.frames.consistent()

    def outcome(self, initiator: str, responder: str) -> Optional[HandshakeOutcome]:
        for item in self.handshakes:
            if item.initiator == initiator and item.responder == responder:
                return item
        return None

    def established_count(self) -> int:
        return sum(1 for h in self.handshakes if h.outcome == "established")

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        for login in data["logins"]:
            login["decision"] = Decision(login["decision"]).value
        data["frames"]["rejected_total"] = self.frames.rejected_total
        data["replay_rejected"] = self.replay_rejected
        data["counts_consistent"] = self.counts_consistent()
        data["security_ok"] = self.security_ok
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"
