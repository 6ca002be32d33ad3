from __future__ import annotations

WINDOW_SIZE = 64
_MASK = (1 << WINDOW_SIZE) - 1


class ReplayWindow:
    """Sliding anti-replay bitmap anchored at the highest sequence number seen.

    Bit ``i`` of ``bitmap`` records whether ``highest - i`` has been accepted.
    """

    def __init__(self) -> None:
        self.highest = -1
        self.bitmap = 0

    def check(self, seq: int) -> bool:
        if seq > self.highest:
            return True
        offset = self.highest - seq
        if offset >= WINDOW_SIZE:
            return False
        return not (self.bitmap >> offset) & 1

    def mark(self, seq: int) -> None:
        if seq > self.highest:
            shift = seq - self.highest
            self.bitmap = ((self.bitmap << shift) | 1) & _MASK if shift < WINDOW_SIZE else 1
            self.highest = seq
        else:
            self.bitmap |= 1 << (self.highest - seq)

    def accept(self, seq: int) -> bool:
        if not self.check(seq):
            return False
        self.mark(seq)
        return True

    @property
    def is_empty(self) -> bool:
        return self.highest < 0

    def __repr__(self) -> str:
        return f"ReplayWindow(highest={self.highest}, bitmap=0x{self.bitmap:016x})"
