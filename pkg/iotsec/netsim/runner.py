from __future__ import annotations

import logging
from typing import List, Optional

from ..errors import NoHandshake
from ..handshake import Phase
from ..registry import Decision
from .adversary import capture_stats, run_due_actions
from .measure import measure_handshake_bytes
from .network import (
    SimNetwork,
    deliver_due,
    drain_in_flight,
    drive_timeouts,
    handshakes_settled,
    originate,
    start_handshakes,
)
from .report import AdversaryObservations, HandshakeOutcome, SimReport, Verdicts

log = logging.getLogger(__name__)


def _send_due_traffic(sim: SimNetwork) -> None:
    # payloads wait until every scheduled handshake has either come up or given up
    if not sim.pending_traffic or not handshakes_settled(sim):
        return
    while sim.pending_traffic and sim.pending_traffic[0].epoch <= sim.epoch:
        originate(sim, sim.pending_traffic.pop(0))


def _quiescent(sim: SimNetwork) -> bool:
    if sim.in_flight() or sim.pending_traffic:
        return False
    if sim.adversary is not None and not sim.adversary.finished:
        return False
    return not any(ns.busy() for ns in sim.states.node_states.values())


def _outcomes(sim: SimNetwork) -> List[HandshakeOutcome]:
    outcomes = []
    for (initiator, responder), record in sim.handshake_records.items():
        state = sim.handshake(initiator, responder)
        if state is None:
            outcome, reason = "denied", None
        elif state.phase is Phase.ESTABLISHED:
            outcome, reason = "established", None
        elif state.phase is Phase.FAILED:
            outcome = "failed"
            reason = state.failure_reason.name if state.failure_reason is not None else None
        else:
            outcome, reason = "pending", None
        outcomes.append(
            HandshakeOutcome(
                initiator=initiator,
                responder=responder,
                outcome=outcome,
                reason=reason,
                established_at=record.established_at,
                bytes_on_wire=record.bytes_on_wire,
                datagrams=len(record.datagrams),
            )
        )
    return outcomes


def _key_sizes(sim: SimNetwork) -> Optional[dict]:
    for pair in sim.schedule:
        try:
            return measure_handshake_bytes(sim, pair).to_dict()
        except NoHandshake:
            continue
    return None


def build_report(sim: SimNetwork, quiescent: bool) -> SimReport:
    adv = sim.adversary
    observations = AdversaryObservations()
    if adv is not None:
        stats = capture_stats(sim)
        observations = AdversaryObservations(
            present=True,
            sniffing=adv.sniffing,
            frames_injected=adv.frames_injected,
            frames_replayed=adv.frames_replayed,
            frames_accepted=adv.frames_accepted,
            handshakes_attempted=adv.handshakes_attempted,
            handshakes_established=adv.handshakes_established,
            errors=list(adv.errors),
            **stats,
        )
    adversary_logins_accepted = any(
        login.actor == "adversary" and login.decision is Decision.ACCEPTED for login in sim.logins
    )
    verdicts = Verdicts(
        confidentiality=observations.plaintext_recovered == 0,
        integrity=sim.forged_accepted == 0,
        authenticity=observations.handshakes_established == 0 and not adversary_logins_accepted,
        replay_protection=sim.replay_accepted == 0,
    )
    devices = {
        node_id: {
            "behavior": ns.device.behavior,
            "on": ns.device.on,
            "reading": ns.device.reading,
            "received": ns.device.received,
        }
        for node_id, ns in sim.states.node_states.items()
        if ns.device is not None
    }
    return SimReport(
        scenario=sim.config.name,
        curve=sim.curve.name,
        seed=sim.seed,
        epochs_run=sim.epochs_run,
        quiescent=quiescent,
        handshakes=_outcomes(sim),
        handshake_datagrams=sim.handshake_datagrams,
        frames=sim.frames,
        payloads=sim.payloads,
        devices=devices,
        logins=list(sim.logins),
        adversary=observations,
        verdicts=verdicts,
        key_sizes=_key_sizes(sim),
    )


def run(sim: SimNetwork, max_epochs: Optional[int] = None) -> SimReport:
    """Advance epochs until the horizon or until nothing is left to do."""
    horizon = max_epochs or sim.max_epochs
    quiescent = False
    epoch = 0
    while epoch < horizon:
        sim.epoch = epoch
        run_due_actions(sim)
        if not sim.started:
            start_handshakes(sim)
        deliver_due(sim)
        drive_timeouts(sim)
        _send_due_traffic(sim)
        sim.epochs_run = epoch + 1
        if _quiescent(sim):
            quiescent = True
            break
        epoch += 1
    drain_in_flight(sim)
    report = build_report(sim, quiescent)
    log.info(
        "%s finished after %d epochs: %d/%d handshakes established, security_ok=%s",
        sim.config.name,
        sim.epochs_run,
        report.established_count(),
        len(report.handshakes),
        report.security_ok,
    )
    return report
