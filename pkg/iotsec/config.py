import os
from dataclasses import dataclass
from typing import Optional


try:
    # Load .env for local development if present
    from dotenv import load_dotenv  # type: ignore

    load_dotenv()
except Exception:
    # dotenv is optional at runtime
    pass


def _int_env(name: str, default: int) -> int:
    raw = (os.getenv(name) or "").strip()
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError:
        raise RuntimeError(f"{name} must be an integer, got {raw!r}")


@dataclass(frozen=True)
class Settings:
    default_seed: int
    default_curve: str
    log_level: str
    handshake_timeout: int
    retransmit_budget: int
    max_epochs: int
    registry_path: Optional[str]

    @staticmethod
    def from_env() -> "Settings":
        return Settings(
            default_seed=_int_env("IOTSEC_SEED", 1),
            default_curve=(os.getenv("IOTSEC_CURVE") or "T17").strip(),
            log_level=(os.getenv("IOTSEC_LOG_LEVEL") or "WARNING").strip().upper(),
            handshake_timeout=_int_env("IOTSEC_HANDSHAKE_TIMEOUT", 3),
            retransmit_budget=_int_env("IOTSEC_RETRANSMIT_BUDGET", 5),
            max_epochs=_int_env("IOTSEC_MAX_EPOCHS", 400),
            registry_path=os.getenv("IOTSEC_REGISTRY_PATH"),
        )


settings = Settings.from_env()
