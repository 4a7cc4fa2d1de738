"""Association, MAC-broadcast handover, scan baseline and LQ-driven TPC.

The mobile end device keeps exactly one parent (a router or the
coordinator).  Handover triggers: link quality from the parent dropping
below target minus hysteresis, repeated ack failures, or having no parent
at all.  The broadcast variant probes once and collects every responder
within a fixed window; the scan baseline polls each known stationary node
sequentially and is therefore linear in node count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .engine import EventKind, SimTime
from .mac import BROADCAST, CONTROL_PAYLOAD, Frame, FrameKind, SendOutcome
from .phy import LinkSample, lq_from_rx_power
from .scenario import NodeRole


@dataclass
class Association:
    parent: int | None = None
    last_lq: int = 0
    last_contact: SimTime = 0


@dataclass
class TpcState:
    current_power_dbm: float
    lq_target: int = 64
    lq_hysteresis: int = 16


@dataclass
class HandoverStats:
    attempts: int = 0
    completions: int = 0
    failures: int = 0
    total_outage_us: SimTime = 0
    latencies_us: list[int] = field(default_factory=list)

    def mean_latency_us(self) -> float:
        if not self.latencies_us:
            return 0.0
        return sum(self.latencies_us) / len(self.latencies_us)


@dataclass
class TrafficStats:
    attempts: int = 0
    delivered: int = 0
    no_ack: int = 0
    cca_fail: int = 0
    outage_losses: int = 0

    def delivery_ratio(self) -> float:
        # Over resolved sends: a frame still in flight when the run ends is
        # neither delivered nor lost.
        resolved = self.delivered + self.no_ack + self.cca_fail + self.outage_losses
        return self.delivered / resolved if resolved else 0.0


class StationaryController:
    """Always-on router/coordinator: answers probes and association requests."""

    def __init__(self, sim, node) -> None:
        self.sim = sim
        self.node = node
        self.children: set[int] = set()
        self.data_received = 0

    def on_frame(self, frame: Frame, rx_power: float, lq: int) -> None:
        if frame.kind is FrameKind.PROBE_REQ and (
                frame.is_broadcast or frame.dst == self.node.node_id):
            reply = Frame(FrameKind.PROBE_RESP, self.node.mac.next_seq(),
                          self.node.node_id, frame.src,
                          payload_len=CONTROL_PAYLOAD[FrameKind.PROBE_RESP],
                          lq_report=lq)
            self.node.mac.csma_send(reply)
        elif frame.kind is FrameKind.ASSOC_REQ and frame.dst == self.node.node_id:
            self.children.add(frame.src)
            reply = Frame(FrameKind.ASSOC_RESP, self.node.mac.next_seq(),
                          self.node.node_id, frame.src,
                          payload_len=CONTROL_PAYLOAD[FrameKind.ASSOC_RESP])
            self.node.mac.csma_send(reply)
        elif frame.kind is FrameKind.DATA and frame.dst == self.node.node_id:
            self.data_received += 1
        elif frame.kind is FrameKind.DISASSOC and frame.dst == self.node.node_id:
            self.children.discard(frame.src)


class MobileController:
    """Mobile end device: traffic source, handover initiator, TPC owner."""

    def __init__(self, sim, node) -> None:
        self.sim = sim
        self.node = node
        cfg = sim.cfg
        self.assoc = Association()
        self.tpc_enabled = cfg.tpc.enabled
        start_power = (max(cfg.phy.power_levels_dbm) if self.tpc_enabled
                       else node.config_power_dbm())
        self.tpc = TpcState(start_power, cfg.tpc.lq_target, cfg.tpc.lq_hysteresis)
        self.stats = HandoverStats()
        self.traffic = TrafficStats()
        self.samples: list[LinkSample] = []
        self.ack_fail_streak = 0
        self.handover_state = "idle"  # idle | probing | scanning | associating
        self.handover_epoch = 0
        self.handover_started: SimTime = 0
        self.responses: list[tuple[int, int]] = []  # (reported lq, node id)
        self.scan_targets: list[int] = []
        self.scan_index = 0
        self.candidate: int | None = None
        self.orphan_since: SimTime | None = 0  # starts unassociated
        self._lq_block_until: SimTime = 0
        self.tx_time_weighted_dbm = 0.0  # sum of power*us over tx time

    # -- power --------------------------------------------------------------

    def current_power_dbm(self) -> float:
        return self.tpc.current_power_dbm

    # -- traffic ------------------------------------------------------------

    def on_data_due(self) -> None:
        cfg = self.sim.cfg
        if self.assoc.parent is None:
            self.traffic.outage_losses += 1
            self.sim.emit(self.node, "OUTAGE_LOSS", outcome="no_parent")
            self.start_handover("orphan")
            return
        self.node.wake()
        frame = Frame(FrameKind.DATA, self.node.mac.next_seq(), self.node.node_id,
                      self.assoc.parent, payload_len=cfg.traffic.payload_bytes)
        self.traffic.attempts += 1
        self.node.mac.csma_send(frame, self._on_data_outcome)

    def _on_data_outcome(self, outcome: SendOutcome) -> None:
        if outcome is SendOutcome.DELIVERED:
            self.traffic.delivered += 1
            self.ack_fail_streak = 0
        elif outcome is SendOutcome.NO_ACK:
            self.traffic.no_ack += 1
            self.ack_fail_streak += 1
            cfg = self.sim.cfg.handover
            threshold = cfg.ack_fail_threshold
            if self.assoc.last_lq < self.tpc.lq_target - self.tpc.lq_hysteresis:
                # Link already known degraded: one dead frame is proof enough.
                threshold = cfg.degraded_ack_fail_threshold
            if self.ack_fail_streak >= threshold:
                self.start_handover("ack_failures")
        else:
            self.traffic.cca_fail += 1
        self.sim.maybe_sleep(self.node)

    # -- reception ----------------------------------------------------------

    def on_frame(self, frame: Frame, rx_power: float, lq: int) -> None:
        if frame.src == self.assoc.parent:
            self.assoc.last_lq = lq
            self.assoc.last_contact = self.sim.loop.now
            self._record_sample(frame, rx_power, lq)
        if frame.kind is FrameKind.PROBE_RESP and frame.lq_report is not None:
            if self.handover_state in ("probing", "scanning"):
                self.responses.append((frame.lq_report, frame.src))
        elif frame.kind is FrameKind.ASSOC_RESP and frame.src == self.candidate:
            self._commit_parent(frame.src)
        # A degraded parent link triggers a new search.
        if (frame.src == self.assoc.parent and self.handover_state == "idle"
                and lq < self.tpc.lq_target - self.tpc.lq_hysteresis):
            self.start_handover("low_lq")

    def _record_sample(self, frame: Frame, rx_power: float, lq: int) -> None:
        now = self.sim.loop.now
        self.samples.append(LinkSample(rx_power, lq, now, frame.src,
                                       frame.tx_power_dbm))
        window = self.sim.cfg.tpc.window_us
        self.samples = [s for s in self.samples if now - s.time <= window]
        if self.tpc_enabled and self.assoc.parent is not None:
            self.tpc_update()

    # -- transmission power control ------------------------------------------

    def tpc_update(self) -> None:
        """Pick the lowest configured level whose predicted LQ meets target.

        Prediction shifts the latest parent sample by the candidate/actual
        power difference (exact under the deterministic log-distance model).
        Decreases are gated by hysteresis; increases apply immediately.
        """
        now = self.sim.loop.now
        window = self.sim.cfg.tpc.window_us
        recent = [s for s in self.samples
                  if s.src == self.assoc.parent and now - s.time <= window]
        if not recent:
            return  # keep current level
        sample = recent[-1]
        params = self.sim.cfg.phy
        levels = sorted(self.sim.cfg.phy.power_levels_dbm)

        def predicted_lq(level: float) -> int:
            rx = sample.rx_power_dbm + (level - sample.tx_power_dbm)
            return lq_from_rx_power(rx, params)

        chosen = None
        for level in levels:
            if predicted_lq(level) >= self.tpc.lq_target:
                chosen = level
                break
        if chosen is None:
            chosen = levels[-1]
        if chosen < self.tpc.current_power_dbm:
            if predicted_lq(chosen) < self.tpc.lq_target + self.tpc.lq_hysteresis:
                return  # hold: not enough margin to step down
        if chosen != self.tpc.current_power_dbm:
            self.tpc.current_power_dbm = chosen
            self.sim.emit(self.node, "TPC_SET", outcome=f"level={chosen:.1f}")

    # -- handover ------------------------------------------------------------

    def start_handover(self, reason: str) -> None:
        if self.handover_state != "idle":
            return
        now = self.sim.loop.now
        if reason == "low_lq":
            if now < self._lq_block_until:
                return
            self._lq_block_until = now + self.sim.cfg.handover.lq_retrigger_cooldown_us
        self.stats.attempts += 1
        self.handover_epoch += 1
        self.handover_started = now
        self.responses = []
        self.candidate = None
        self.sim.emit(self.node, "HANDOVER_START", outcome=f"trigger={reason}")
        self.node.wake()
        if self.sim.cfg.handover.mode == "scan":
            self._start_scan()
        else:
            self._start_broadcast_probe()

    def _start_broadcast_probe(self) -> None:
        epoch = self.handover_epoch
        self.handover_state = "probing"
        probe = Frame(FrameKind.PROBE_REQ, self.node.mac.next_seq(),
                      self.node.node_id, BROADCAST,
                      payload_len=CONTROL_PAYLOAD[FrameKind.PROBE_REQ])

        def on_probe_out(outcome: SendOutcome) -> None:
            if self.handover_epoch != epoch:
                return
            if outcome is SendOutcome.CHANNEL_ACCESS_FAILURE:
                self._handover_failed("probe_cca_fail")
            else:
                self.sim.loop.schedule(
                    self.sim.loop.now + self.sim.cfg.handover.probe_window_us,
                    EventKind.PROBE_WINDOW_END, self.node.node_id, epoch)

        self.node.mac.csma_send(probe, on_probe_out)

    def on_probe_window_end(self, epoch: int) -> None:
        if epoch != self.handover_epoch or self.handover_state != "probing":
            return
        self._select_candidate()

    def _start_scan(self) -> None:
        self.handover_state = "scanning"
        self.scan_targets = sorted(
            n.node_id for n in self.sim.cfg.stationary_nodes()
            if n.role in (NodeRole.COORDINATOR, NodeRole.ROUTER))
        self.scan_index = 0
        if not self.scan_targets:
            self._handover_failed("no_known_nodes")
            return
        self._scan_poll_next()

    def _scan_poll_next(self) -> None:
        epoch = self.handover_epoch
        target = self.scan_targets[self.scan_index]
        probe = Frame(FrameKind.PROBE_REQ, self.node.mac.next_seq(),
                      self.node.node_id, target,
                      payload_len=CONTROL_PAYLOAD[FrameKind.PROBE_REQ])

        def on_poll_out(outcome: SendOutcome) -> None:
            if self.handover_epoch != epoch:
                return
            # Full response window per polled node, answered or not.
            self.sim.loop.schedule(
                self.sim.loop.now + self.sim.cfg.handover.scan_response_timeout_us,
                EventKind.SCAN_STEP, self.node.node_id, epoch)

        self.node.mac.csma_send(probe, on_poll_out)

    def on_scan_step(self, epoch: int) -> None:
        if epoch != self.handover_epoch or self.handover_state != "scanning":
            return
        self.scan_index += 1
        if self.scan_index < len(self.scan_targets):
            self._scan_poll_next()
        else:
            self._select_candidate()

    def _select_candidate(self) -> None:
        if not self.responses:
            self._handover_failed("no_responses")
            return
        # Highest reported LQ; ties go to the lowest node id.
        best_lq = max(lq for lq, _ in self.responses)
        best_id = min(nid for lq, nid in self.responses if lq == best_lq)
        self.candidate = best_id
        self.handover_state = "associating"
        epoch = self.handover_epoch
        req = Frame(FrameKind.ASSOC_REQ, self.node.mac.next_seq(),
                    self.node.node_id, best_id,
                    payload_len=CONTROL_PAYLOAD[FrameKind.ASSOC_REQ])

        def on_req_out(outcome: SendOutcome) -> None:
            if self.handover_epoch != epoch:
                return
            if outcome is not SendOutcome.DELIVERED:
                self._handover_failed("assoc_req_lost")
            else:
                # Guard against a lost AssocResponse.
                self.sim.loop.schedule(
                    self.sim.loop.now + self.sim.cfg.handover.probe_window_us,
                    EventKind.PROBE_RETRY, self.node.node_id,
                    ("assoc_guard", epoch))

        self.node.mac.csma_send(req, on_req_out)

    def _commit_parent(self, parent: int) -> None:
        if self.handover_state != "associating":
            return
        old = self.assoc.parent
        now = self.sim.loop.now
        self.assoc.parent = parent
        self.assoc.last_contact = now
        self.handover_state = "idle"
        self.candidate = None
        self.ack_fail_streak = 0
        if self.orphan_since is not None:
            self.stats.total_outage_us += now - self.orphan_since
            self.orphan_since = None
        latency = now - self.handover_started
        self.stats.completions += 1
        self.stats.latencies_us.append(latency)
        self.sim.emit(self.node, "HANDOVER_DONE",
                      outcome=f"parent={parent};latency_us={latency}")
        self._lq_block_until = now + self.sim.cfg.handover.lq_retrigger_cooldown_us
        if old is not None and old != parent:
            bye = Frame(FrameKind.DISASSOC, self.node.mac.next_seq(),
                        self.node.node_id, old,
                        payload_len=CONTROL_PAYLOAD[FrameKind.DISASSOC])
            self.node.mac.csma_send(bye)  # best effort, no ack
        self.sim.maybe_sleep(self.node)

    def _handover_failed(self, why: str) -> None:
        self.handover_state = "idle"
        self.stats.failures += 1
        if self.assoc.parent is not None:
            # The old parent could not be reached either: we are orphaned.
            self.assoc.parent = None
        if self.orphan_since is None:
            self.orphan_since = self.sim.loop.now
        if self.tpc_enabled:
            # Reacquire conservatively: probe at the highest level.
            top = max(self.sim.cfg.phy.power_levels_dbm)
            if self.tpc.current_power_dbm != top:
                self.tpc.current_power_dbm = top
                self.sim.emit(self.node, "TPC_SET", outcome=f"level={top:.1f}")
        self.sim.emit(self.node, "HANDOVER_FAIL", outcome=why)
        epoch = self.handover_epoch
        self.sim.loop.schedule(
            self.sim.loop.now + self.sim.cfg.handover.probe_retry_us,
            EventKind.PROBE_RETRY, self.node.node_id, ("retry", epoch))
        self.sim.maybe_sleep(self.node)

    def on_probe_retry(self, data) -> None:
        tag, epoch = data
        if tag == "assoc_guard":
            if epoch == self.handover_epoch and self.handover_state == "associating":
                self._handover_failed("assoc_resp_lost")
            return
        if epoch != self.handover_epoch or self.handover_state != "idle":
            return
        if self.assoc.parent is None:
            self.start_handover("orphan")

    def close(self, end: SimTime) -> None:
        if self.orphan_since is not None:
            self.stats.total_outage_us += end - self.orphan_since
            self.orphan_since = None
