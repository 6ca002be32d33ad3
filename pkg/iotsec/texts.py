from __future__ import annotations

from typing import Dict

PROG = "iotsec"

DESCRIPTION = (
    "Two-phase authentication and VPN tunnelling for home IoT networks: "
    "run simulated scenarios, compare key sizes, demo the handshake."
)

COMMANDS_DESC: Dict[str, str] = {
    "run": "Run a scenario through the network simulator and emit its report",
    "keysize-table": "Print the ECC/RSA comparable key-size table",
    "demo-handshake": "Run one loopback handshake and print every flight",
    "version": "Print the version",
}

ARG_HELP: Dict[str, str] = {
    "scenario": "Scenario JSON file (schema 1)",
    "seed": "Simulation seed, an unsigned 64-bit integer (default: scenario seed, then IOTSEC_SEED)",
    "report": "Write the JSON report here instead of standard output",
    "log": "Write the line-delimited JSON event log here",
    "format": "Output format",
    "curve": "Curve for the demo (T17 or P256; default IOTSEC_CURVE)",
    "verbose": "Also list each message inside a flight",
}

# run
RUN_SUMMARY = (
    "{scenario} (seed {seed}, {curve}): {established}/{handshakes} handshakes established, "
    "{delivered}/{sent} frames delivered, {rejected} rejected, {dropped} dropped; security_ok={ok}"
)
RUN_VIOLATION = "security property violated in {scenario}: {failed}"
RUN_INCONSISTENT = "frame counters do not add up in {scenario}: {delivered} + {rejected} + {dropped} != {sent}"
REPORT_WRITTEN = "report written to {path}"
LOG_WRITTEN = "event log written to {path} ({rows} rows)"
REGISTRY_WRITTEN = "registry snapshot written to {path}"

# keysize-table
KEYSIZE_HEADER = "{:>15}  {:>14}  {:>14}  {:>8}".format("Security (bits)", "ECC key (bits)", "RSA key (bits)", "RSA/ECC")
KEYSIZE_ROW = "{level:>15}  {ecc:>14}  {rsa:>14}  {ratio:>8.2f}"

# demo-handshake
DEMO_HEADER = "Loopback handshake on {curve}: {initiator} -> {responder}"
DEMO_FLIGHT = "F{index}  {sender:<9} {size:>5} bytes  {names}"
DEMO_MESSAGE = "      {name:<18} {size:>5} bytes"
DEMO_TOTAL = "total {total} bytes in {flights} flights"
DEMO_ESTABLISHED = "established: session {session}"
DEMO_FAILED = "handshake failed: initiator {initiator}, responder {responder}"

# errors
CONFIG_ERROR = "error: {message}"
OUTPUT_ERROR = "error: cannot write {path}: {reason}"
