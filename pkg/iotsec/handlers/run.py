from __future__ import annotations

import logging
from typing import TextIO

from ..commands_setup import Run
from ..config import settings
from ..netsim import build_simulation, load_scenario, run
from ..registry_store import save_registry
from ..texts import (
    LOG_WRITTEN,
    OUTPUT_ERROR,
    REGISTRY_WRITTEN,
    REPORT_WRITTEN,
    RUN_INCONSISTENT,
    RUN_SUMMARY,
    RUN_VIOLATION,
)

log = logging.getLogger(__name__)


def handle_run(command: Run, out: TextIO, err: TextIO) -> int:
    """Load, simulate, write artifacts. Exit 1 on a violation, 2 when an output cannot be written."""
    config = load_scenario(command.scenario_path)
    sim = build_simulation(config, seed=command.seed)
    report = run(sim)

    try:
        if settings.registry_path:
            save_registry(sim.registry, settings.registry_path)
            log.info(REGISTRY_WRITTEN.format(path=settings.registry_path))

        if command.log_path:
            sim.events.write(command.log_path)
            log.info(LOG_WRITTEN.format(path=command.log_path, rows=len(sim.events)))

        if command.report_path:
            with open(command.report_path, "w", encoding="utf-8") as fh:
                fh.write(report.to_json())
            log.info(REPORT_WRITTEN.format(path=command.report_path))
    except OSError as exc:
        log.debug("cannot write run output: %s", exc)
        err.write(OUTPUT_ERROR.format(path=exc.filename, reason=exc.strerror or exc) + "\n")
        return 2

    if command.report_path:
        out.write(
            RUN_SUMMARY.format(
                scenario=report.scenario,
                seed=report.seed,
                curve=report.curve,
                established=report.established_count(),
                handshakes=len(report.handshakes),
                delivered=report.frames.delivered,
                sent=report.frames.sent,
                rejected=report.frames.rejected_total,
                dropped=report.frames.dropped,
                ok=str(report.security_ok).lower(),
            )
            + "\n"
        )
    else:
        out.write(report.to_json())

    status = 0
    if not report.security_ok:
        failed = [name for name, ok in vars(report.verdicts).items() if not ok]
        err.write(RUN_VIOLATION.format(scenario=report.scenario, failed=", ".join(failed)) + "\n")
        status = 1
    if not report.counts_consistent():
        err.write(
            RUN_INCONSISTENT.format(
                scenario=report.scenario,
                delivered=report.frames.delivered,
                rejected=report.frames.rejected_total,
                dropped=report.frames.dropped,
                sent=report.frames.sent,
            )
            + "\n"
        )
        status = 1
    return status
