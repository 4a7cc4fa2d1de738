"""Deterministic discrete-event core: virtual clock, event queue, seeded RNG.

Time is kept in integer microseconds so MAC timings (320 us backoff unit,
15.36 ms beacon base) are exact and traces are platform-stable.
"""

from __future__ import annotations

import heapq
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum

SimTime = int  # microseconds since run start

US_PER_MS = 1_000
US_PER_S = 1_000_000


class SimulationError(RuntimeError):
    """Fatal misuse of the simulator (scheduling in the past, bad frame kind)."""


class EventKind(Enum):
    BACKOFF_EXPIRE = "backoff_expire"
    TX_END = "tx_end"
    ACK_TURNAROUND = "ack_turnaround"
    ACK_TIMEOUT = "ack_timeout"
    BEACON_DUE = "beacon_due"
    MOVE_TICK = "move_tick"
    DATA_DUE = "data_due"
    PROBE_WINDOW_END = "probe_window_end"
    PROBE_RETRY = "probe_retry"
    SCAN_STEP = "scan_step"


@dataclass
class Event:
    time: SimTime
    seq: int
    kind: EventKind
    target: int | None = None  # node id, or None for global events
    data: object = None
    cancelled: bool = False


@dataclass
class RunSummary:
    processed: Counter = field(default_factory=Counter)
    scheduled: int = 0
    cancelled: int = 0
    unprocessed: int = 0
    clock: SimTime = 0

    @property
    def total_processed(self) -> int:
        return sum(self.processed.values())


class EventLoop:
    """Priority event queue with FIFO tie-break among equal timestamps."""

    def __init__(self) -> None:
        self.now: SimTime = 0
        self._heap: list[tuple[int, int, Event]] = []
        self._seq = 0
        self._scheduled = 0
        self._cancelled = 0

    def schedule(self, time: SimTime, kind: EventKind, target: int | None = None,
                 data: object = None) -> Event:
        if time < self.now:
            raise SimulationError(
                f"event {kind.value} scheduled at t={time} us in the past "
                f"(clock is {self.now} us)")
        ev = Event(time, self._seq, kind, target, data)
        self._seq += 1
        self._scheduled += 1
        heapq.heappush(self._heap, (time, ev.seq, ev))
        return ev

    def cancel(self, ev: Event) -> None:
        if not ev.cancelled:
            ev.cancelled = True
            self._cancelled += 1

    def run_until(self, end: SimTime, dispatch) -> RunSummary:
        """Process every event with time <= end, in (time, seq) order.

        `dispatch(event)` is called for each live event.  The clock ends at
        `end`, or at the last processed event when the queue drains early.
        """
        summary = RunSummary()
        last_time = 0
        while self._heap and self._heap[0][0] <= end:
            _, _, ev = heapq.heappop(self._heap)
            if ev.cancelled:
                continue
            self.now = ev.time
            last_time = ev.time
            summary.processed[ev.kind] += 1
            dispatch(ev)
        if self._heap:
            self.now = end
        else:
            self.now = min(end, last_time) if summary.processed else min(end, self.now)
        summary.clock = self.now
        summary.scheduled = self._scheduled
        summary.cancelled = self._cancelled
        summary.unprocessed = sum(1 for _, _, ev in self._heap if not ev.cancelled)
        return summary


_GOLDEN = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1


def _mix(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class RngStream:
    """SplitMix64 stream, one per node.

    The stream state is seeded by double-mixing (run seed, stream id), so
    streams are decorrelated and adding a node does not perturb the draws of
    any other node.  Pure integer arithmetic keeps the sequence identical
    across platforms.
    """

    def __init__(self, seed: int, stream_id: int) -> None:
        self.seed = seed
        self.stream_id = stream_id
        self._state = _mix((seed ^ _mix((stream_id + 1) * _GOLDEN)) & _MASK)

    def _next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK
        return _mix(self._state)

    def draw_uniform(self, n: int) -> int:
        """Uniform integer in [0, n-1]; rejection sampling avoids modulo bias."""
        if n < 1:
            raise SimulationError(f"draw_uniform range must be >= 1, got {n}")
        if n == 1:
            return 0  # no state consumed for the degenerate range
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self._next_u64()
            if r < limit:
                return r % n
