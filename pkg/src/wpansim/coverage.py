"""Coverage-gap extraction from traces, plus the static geometry views.

Gaps are meter-denominated: a stretch of the trajectory is a gap when the
trace shows the mobile failing every exchange there (failed unicast sends,
probe rounds with no responses, ticks with no parent) and succeeding in
none.  Boundaries are reported at 0.1 m resolution.  The independent check
is a brute-force in_range sampler along the trajectory at 0.01 m.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .phy import PhyParams, comm_range_m, in_range
from .scenario import NodeClass
from .trace import TraceRecord

CELL_M = 0.1
ORACLE_STEP_M = 0.01

_SUCCESS_KINDS = ("RX",)
_FAIL_KINDS = ("OUTAGE_LOSS", "HANDOVER_FAIL")


def gap_analysis(rows: list[TraceRecord], x_lo: float, x_hi: float,
                 mobile_id: int | None = None) -> list[tuple[float, float]]:
    """Extract out-of-communication x-intervals from a run trace.

    Rasterizes mobile-node evidence onto 0.1 m cells: a cell is part of a
    gap iff it holds failure evidence and no successful exchange.  Success
    means the mobile actually received a frame (broadcast or unacknowledged
    sends prove nothing about reachability).  Cells with no evidence
    between failing cells are bridged; gap edges are trimmed to the
    outermost failing cells.
    """
    if mobile_id is None:
        movers = {r.node_id for r in rows if r.event_kind == "MOVE"}
        if not movers:
            return []
        mobile_id = min(movers)
    n_cells = max(1, round((x_hi - x_lo) / CELL_M))
    # 0 = no evidence, 1 = success, 2 = failure (success wins in a cell)
    cells = [0] * n_cells

    def cell_of(x: float) -> int:
        i = int((x - x_lo) / CELL_M)
        return min(max(i, 0), n_cells - 1)

    for r in rows:
        if r.node_id != mobile_id:
            continue
        if r.event_kind in _SUCCESS_KINDS:
            cells[cell_of(r.pos_x_m)] = 1
        elif r.event_kind in _FAIL_KINDS or (
                r.event_kind == "SEND_OUTCOME" and r.outcome == "no_ack"):
            i = cell_of(r.pos_x_m)
            if cells[i] == 0:
                cells[i] = 2

    gaps: list[tuple[float, float]] = []
    i = 0
    while i < n_cells:
        if cells[i] == 1:
            i += 1
            continue
        j = i
        while j < n_cells and cells[j] != 1:
            j += 1
        fails = [k for k in range(i, j) if cells[k] == 2]
        if fails:
            gaps.append((x_lo + fails[0] * CELL_M,
                         x_lo + (fails[-1] + 1) * CELL_M))
        i = j
    return gaps


def boundaries_match(a: list[tuple[float, float]], b: list[tuple[float, float]],
                     tol: float) -> bool:
    """True iff both gap lists agree pairwise within tol on every boundary."""
    if len(a) != len(b):
        return False
    eps = 1e-9  # trace boundaries are cell multiples; keep exactly-tol diffs in
    return all(abs(ga[0] - gb[0]) <= tol + eps and abs(ga[1] - gb[1]) <= tol + eps
               for ga, gb in zip(a, b))


def _stationary_geometry(cfg) -> list[tuple[float, float, float]]:
    return [(n.x, n.y, n.antenna_gain_db) for n in cfg.nodes
            if n.node_class is NodeClass.STATIONARY]


def static_gap_oracle(cfg, power_dbm: float,
                      step: float = ORACLE_STEP_M) -> list[tuple[float, float]]:
    """Brute-force reference: sample in_range along the trajectory.

    Walks x across the trajectory span in `step` increments and marks the
    positions where no stationary node is within communication range at the
    given power.  Independent of the event-driven machinery.
    """
    params: PhyParams = cfg.phy
    stations = _stationary_geometry(cfg)
    mobile = cfg.mobile_node()
    gain_rx = mobile.antenna_gain_db if mobile else 0.0
    x_lo, x_hi = cfg.trajectory.x_bounds()
    n = round((x_hi - x_lo) / step)
    gaps: list[tuple[float, float]] = []
    run_start: float | None = None
    last_x = x_lo
    for k in range(n + 1):
        x = x_lo + k * step
        y = _trajectory_y_at(cfg.trajectory, x)
        covered = False
        for sx, sy, sgain in stations:
            dist = ((x - sx) ** 2 + (y - sy) ** 2) ** 0.5
            if in_range(dist, power_dbm, sgain, gain_rx, params):
                covered = True
                break
        if not covered and run_start is None:
            run_start = x
        elif covered and run_start is not None:
            gaps.append((run_start, last_x))
            run_start = None
        last_x = x
    if run_start is not None:
        gaps.append((run_start, last_x))
    return gaps


def _trajectory_y_at(trajectory, x: float) -> float:
    """Interpolate y for a given x (trajectories here sweep x monotonically)."""
    wp = trajectory.waypoints
    if x <= wp[0][0]:
        return wp[0][1]
    for (x0, y0, _), (x1, y1, _) in zip(wp, wp[1:]):
        if x <= x1:
            if x1 == x0:
                return y1
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    return wp[-1][1]


def overlap_intervals(cfg, power_dbm: float,
                      min_len: float = CELL_M) -> list[tuple[float, float]]:
    """x-intervals where two or more stationary nodes are in range at once.

    Computed analytically from the link budget (coverage circles cut by the
    trajectory line, assumed y = 0 here as in the shipped layouts).
    Intervals shorter than the 0.1 m reporting resolution are dropped.
    """
    params: PhyParams = cfg.phy
    mobile = cfg.mobile_node()
    gain_rx = mobile.antenna_gain_db if mobile else 0.0
    x_lo, x_hi = cfg.trajectory.x_bounds()
    spans: list[tuple[float, float]] = []
    for sx, sy, sgain in _stationary_geometry(cfg):
        r = comm_range_m(power_dbm, sgain + gain_rx, params)
        if r <= abs(sy):
            continue
        half = (r * r - sy * sy) ** 0.5
        lo, hi = max(x_lo, sx - half), min(x_hi, sx + half)
        if lo < hi:
            spans.append((lo, hi))
    overlaps: list[tuple[float, float]] = []
    for i in range(len(spans)):
        for j in range(i + 1, len(spans)):
            lo = max(spans[i][0], spans[j][0])
            hi = min(spans[i][1], spans[j][1])
            if lo < hi:
                overlaps.append((lo, hi))
    return [(a, b) for a, b in _merge(overlaps) if b - a >= min_len]


def _merge(intervals: list[tuple[float, float]]) -> list[tuple[float, float]]:
    if not intervals:
        return []
    out: list[tuple[float, float]] = []
    for lo, hi in sorted(intervals):
        if out and lo <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return out


def association_map(rows: list[TraceRecord],
                    mobile_id: int) -> list[tuple[float, float, int]]:
    """Trajectory segments annotated with the parent that served them."""
    changes: list[tuple[float, int]] = []
    last_x = None
    for r in rows:
        if r.node_id != mobile_id:
            continue
        last_x = r.pos_x_m
        if r.event_kind == "HANDOVER_DONE":
            parent = int(r.outcome.split(";")[0].split("=")[1])
            changes.append((r.pos_x_m, parent))
    if not changes or last_x is None:
        return []
    segments: list[tuple[float, float, int]] = []
    for (x0, parent), (x1, _) in zip(changes, changes[1:]):
        if segments and segments[-1][2] == parent and segments[-1][1] == x0:
            segments[-1] = (segments[-1][0], x1, parent)
        else:
            segments.append((x0, x1, parent))
    final_x, final_parent = changes[-1]
    if segments and segments[-1][2] == final_parent and segments[-1][1] == final_x:
        segments[-1] = (segments[-1][0], last_x, final_parent)
    else:
        segments.append((final_x, last_x, final_parent))
    return segments


@dataclass
class CoverageReport:
    power_dbm: float
    gaps: list[tuple[float, float]] = field(default_factory=list)
    overlaps: list[tuple[float, float]] = field(default_factory=list)
    associations: list[tuple[float, float, int]] = field(default_factory=list)

    @property
    def gap_free(self) -> bool:
        return not self.gaps

    @property
    def overprovisioned(self) -> bool:
        return bool(self.overlaps)
