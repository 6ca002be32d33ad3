try:
    from dotenv import load_dotenv  # type: ignore
    load_dotenv()
except Exception:
    pass

from pathlib import Path
import sys


def main() -> int:
    # Ensure project root is on sys.path
    root = Path(__file__).resolve().parents[1]
    if str(root) not in sys.path:
        sys.path.insert(0, str(root))

    from iotsec.netsim import build_simulation, load_scenario, run  # type: ignore

    scenario_dir = root / "scenarios"
    failures = 0
    for path in sorted(scenario_dir.glob("*.json")):
        config = load_scenario(path)

        # Two runs of the same (scenario, seed) must agree byte for byte
        outputs = []
        for _ in range(2):
            sim = build_simulation(config)
            report = run(sim)
            outputs.append((report.to_json(), "\n".join(sim.events.lines())))
        same = outputs[0] == outputs[1]

        status = "ok" if same and report.security_ok and report.counts_consistent() else "FAIL"
        if status != "ok":
            failures += 1
        print(
            f"{status:4} {path.name:20} seed={report.seed:<4} "
            f"handshakes={report.established_count()}/{len(report.handshakes)} "
            f"frames={report.frames.delivered}/{report.frames.sent} "
            f"deterministic={same} security_ok={report.security_ok}"
        )

    print(f"{failures} scenario(s) failed")
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
