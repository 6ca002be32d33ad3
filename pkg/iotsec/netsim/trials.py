from __future__ import annotations

import logging
from typing import Iterable, List, Optional

from ..handshake import Phase
from .network import SimNetwork, build_simulation
from .runner import run
from .scenario import ScenarioConfig, parse_scenario

log = logging.getLogger(__name__)

TRIAL_GATEWAY = "gw-trial"
TRIAL_SERVER = "server"


def trial_scenario(curve: str, loss_rate: float, *, retransmit_budget: int = 5, timeout: int = 3) -> ScenarioConfig:
    """One gateway handshaking with the server over a lossy link, nothing else."""
    return parse_scenario(
        {
            "schema": 1,
            "name": "handshake-trial",
            "curve": curve,
            "max_epochs": 200,
            "topology": {"server": TRIAL_SERVER, "gateways": [{"id": TRIAL_GATEWAY}]},
            "link": {"loss_rate": loss_rate},
            "handshake": {"timeout": timeout, "retransmit_budget": retransmit_budget},
        }
    )


def keys_agree(sim: SimNetwork, initiator: str, responder: str) -> bool:
    a = sim.handshake(initiator, responder)
    b = sim.handshake(responder, initiator)
    if a is None or b is None:
        return False
    if a.phase is not Phase.ESTABLISHED or b.phase is not Phase.ESTABLISHED:
        return False
    return a.session_keys == b.session_keys


def run_handshake_trials(
    curve: str,
    seeds: Iterable[int],
    loss_rate: float,
    *,
    retransmit_budget: int = 5,
    timeout: int = 3,
    failures: Optional[List[int]] = None,
) -> int:
    """Number of seeds whose handshake completed with both sides holding the same keys."""
    config = trial_scenario(curve, loss_rate, retransmit_budget=retransmit_budget, timeout=timeout)
    completed = 0
    for seed in seeds:
        sim = build_simulation(config, seed=seed)
        run(sim)
        if keys_agree(sim, TRIAL_GATEWAY, TRIAL_SERVER):
            completed += 1
        elif failures is not None:
            failures.append(seed)
    log.info("handshake trials on %s at loss %.2f: %d completed", curve, loss_rate, completed)
    return completed
