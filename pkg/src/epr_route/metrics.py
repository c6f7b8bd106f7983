"""Contention-aware scheduling of lowered circuits and comparison reports."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, fields

from .circuit import Circuit, DepthMode, depth, gate_counts, gate_weight
from .device import Device
from .lowering import block_pairs, block_spans


@dataclass(frozen=True)
class Schedule:
    start: tuple[int, ...]   # layer of each gate (1-based; 0-width gates share their layer)
    makespan: int
    busy: dict[tuple[int, int], tuple[tuple[int, int, int], ...]]  # pair -> (block, first, last)

    @property
    def contended_depth(self) -> int:
        return self.makespan


def schedule(lowered: Circuit, device: Device, contention: bool = True,
             mode: DepthMode = DepthMode.ALL_GATES) -> Schedule:
    """ASAP list schedule; each EPR pair serves one remote block at a time.

    A block holds its pair from the layer of its first gate through the layer
    of its last. Blocks on one pair run in circuit order. With
    ``contention=False`` the result equals :func:`depth`.
    """
    mode = DepthMode(mode)
    gates = lowered.gates
    spans = block_spans(lowered)
    pairs = block_pairs(lowered, device) if contention else {}
    level: dict[tuple[str, int], int] = {}
    start = [0] * len(gates)
    pair_free: dict[tuple[int, int], int] = {}
    busy: dict[tuple[int, int], list[tuple[int, int, int]]] = {}
    placed = [False] * len(gates)
    makespan = 0

    def place(i: int, floor: int) -> int:
        g = gates[i]
        wires = g.wires()
        w = gate_weight(g, mode)
        t = max([level.get(x, 0) for x in wires] + [floor]) + w
        for x in wires:
            level[x] = t
        start[i] = t if w else max(t, 1)
        placed[i] = True
        return t

    for i, g in enumerate(gates):
        if placed[i]:
            continue
        if g.block is None or g.block not in pairs:
            makespan = max(makespan, place(i, 0))
            continue
        bid = g.block
        pair = pairs[bid]
        floor = pair_free.get(pair, 0)
        first = last = None
        for j in spans[bid]:
            t = place(j, floor)
            if gate_weight(gates[j], mode):
                first = t if first is None else min(first, t)
                last = t if last is None else max(last, t)
        makespan = max(makespan, last or 0)
        if first is not None:
            pair_free[pair] = last
            busy.setdefault(pair, []).append((bid, first, last))
    return Schedule(tuple(start), makespan, {k: tuple(v) for k, v in busy.items()})


@dataclass
class ComparisonReport:
    name: str
    n_qubits: int
    device_side: int
    epr_pairs: int
    depth_mode: str
    original_cx: int
    original_depth: int
    remote_standard_cx: int
    remote_cx: int
    remote_expanded_cx: int
    remote_depth: int
    remote_contended_depth: int
    standard_cx: int
    standard_depth: int
    cx_difference: int
    depth_difference: int
    remote_swaps: int = 0
    standard_swaps: int = 0
    status: str = "ok"
    error: str = ""

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    @classmethod
    def failed(cls, name: str, error: str, n_qubits: int = 0) -> "ComparisonReport":
        zeros = {f.name: 0 for f in fields(cls) if f.type in ("int", int)}
        zeros.update(name=name, n_qubits=n_qubits, depth_mode="", status="failed",
                     error=error)
        return cls(**zeros)

    def consistent(self) -> bool:
        return (self.cx_difference == self.standard_cx - self.remote_standard_cx
                and self.depth_difference == self.standard_depth - self.remote_depth
                and self.remote_expanded_cx == self.remote_standard_cx + 2 * self.remote_cx)


class ReportError(ValueError):
    pass


def compare(original: Circuit, remote: Circuit, remote_schedule: Schedule, standard: Circuit,
            device: Device, mode: DepthMode = DepthMode.ALL_GATES,
            remote_swaps: int = 0, standard_swaps: int = 0) -> ComparisonReport:
    """One report row; positive differences mean the remote compilation is lower."""
    mode = DepthMode(mode)
    if not (original.name == remote.name == standard.name):
        raise ReportError(f"benchmark mismatch: {original.name!r}, {remote.name!r}, "
                          f"{standard.name!r}")
    oc, rc, sc = gate_counts(original), gate_counts(remote), gate_counts(standard)
    r_depth = depth(remote, mode)
    s_depth = depth(standard, mode)
    std_cx = sc.standard_cx
    return ComparisonReport(
        name=original.name,
        n_qubits=original.n_qubits,
        device_side=device.side,
        epr_pairs=len(device.epr_pairs),
        depth_mode=mode.value,
        original_cx=oc.standard_cx,
        original_depth=depth(original, mode),
        remote_standard_cx=rc.standard_cx,
        remote_cx=rc.remote_cx,
        remote_expanded_cx=rc.expanded_cx,
        remote_depth=r_depth,
        remote_contended_depth=remote_schedule.makespan,
        standard_cx=std_cx,
        standard_depth=s_depth,
        cx_difference=std_cx - rc.standard_cx,
        depth_difference=s_depth - r_depth,
        remote_swaps=remote_swaps,
        standard_swaps=standard_swaps,
    )


def reports_to_csv(rows: list[ComparisonReport], header: str | None = None) -> str:
    buf = io.StringIO()
    if header:
        for line in header.splitlines():
            buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ComparisonReport.columns())
    for r in rows:
        w.writerow([getattr(r, c) for c in ComparisonReport.columns()])
    return buf.getvalue()


DIFF_COLUMNS = ["name", "family", "n_qubits", "cx_difference", "depth_difference"]


def differences_to_csv(rows: list[ComparisonReport], families: dict[str, str],
                       header: str | None = None) -> str:
    buf = io.StringIO()
    if header:
        for line in header.splitlines():
            buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(DIFF_COLUMNS)
    for r in rows:
        if r.status != "ok":
            continue
        w.writerow([r.name, families.get(r.name, "external"), r.n_qubits,
                    r.cx_difference, r.depth_difference])
    return buf.getvalue()


def reports_to_json(rows: list[ComparisonReport], config: dict | None = None) -> str:
    obj = {"config": config or {}, "rows": [asdict(r) for r in rows]}
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def summarize(rows: list[ComparisonReport]) -> dict:
    ok = [r for r in rows if r.status == "ok"]
    return {
        "benchmarks": len(rows),
        "failed": len(rows) - len(ok),
        "positive_cx_difference": sum(r.cx_difference > 0 for r in ok),
        "positive_depth_difference": sum(r.depth_difference > 0 for r in ok),
    }
