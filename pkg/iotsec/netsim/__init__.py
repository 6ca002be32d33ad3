from .adversary import adversary_step, plaintext_recovered
from .measure import HandshakeMeasurement, SchemeEstimate, measure_handshake_bytes
from .network import Datagram, NodeKind, SimNetwork, SimNode, build_simulation
from .report import SimReport, Verdicts
from .runner import run
from .scenario import ScenarioConfig, address_plan, load_scenario, parse_scenario
from .trials import keys_agree, run_handshake_trials

__all__ = [
    "Datagram",
    "HandshakeMeasurement",
    "NodeKind",
    "ScenarioConfig",
    "SchemeEstimate",
    "SimNetwork",
    "SimNode",
    "SimReport",
    "Verdicts",
    "address_plan",
    "adversary_step",
    "build_simulation",
    "keys_agree",
    "load_scenario",
    "measure_handshake_bytes",
    "parse_scenario",
    "plaintext_recovered",
    "run",
    "run_handshake_trials",
]
