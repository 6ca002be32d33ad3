import random

from hypothesis import given, settings
from hypothesis import strategies as st

from iotsec.replay import WINDOW_SIZE, ReplayWindow


def test_fresh_window_accepts_zero():
    window = ReplayWindow()
    assert window.is_empty
    assert window.accept(0)
    assert not window.accept(0)
    assert not window.is_empty


def test_in_window_reordering_accepted_once():
    window = ReplayWindow()
    assert window.accept(100)
    assert window.accept(100 - (WINDOW_SIZE - 1))
    assert not window.accept(100 - (WINDOW_SIZE - 1))
    assert window.accept(99)
    assert not window.accept(99)


def test_behind_the_window_rejected():
    window = ReplayWindow()
    window.accept(100)
    assert not window.check(100 - WINDOW_SIZE)
    assert not window.accept(0)


def test_large_jump_resets_bitmap():
    window = ReplayWindow()
    window.accept(1)
    window.accept(1000)
    assert window.highest == 1000
    assert window.bitmap == 1
    assert window.accept(999)


def test_check_does_not_mark():
    window = ReplayWindow()
    assert window.check(5)
    assert window.check(5)
    window.mark(5)
    assert not window.check(5)


@settings(max_examples=50, deadline=None)
@given(st.randoms(use_true_random=False), st.integers(min_value=0, max_value=100))
def test_shuffled_trace_with_duplicates(rnd, duplicates):
    """Every sequence number is accepted at most once, whatever the arrival order."""
    trace = list(range(100)) + [rnd.randrange(100) for _ in range(duplicates)]
    rnd.shuffle(trace)
    window = ReplayWindow()
    accepted = [seq for seq in trace if window.accept(seq)]
    assert len(accepted) == len(set(accepted))
    assert len(trace) - len(accepted) >= duplicates


def test_in_order_trace_accepts_everything():
    window = ReplayWindow()
    assert all(window.accept(seq) for seq in range(500))
    assert not any(window.accept(seq) for seq in range(500))


def test_reorder_within_window_accepts_everything():
    rng = random.Random(4)
    seqs = list(range(200))
    # swap neighbours at most 10 apart; every late arrival stays inside the window
    for i in range(0, 190, 10):
        block = seqs[i : i + 10]
        rng.shuffle(block)
        seqs[i : i + 10] = block
    window = ReplayWindow()
    assert all(window.accept(seq) for seq in seqs)
