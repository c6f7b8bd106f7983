"""End-to-end compilation: remote (EPR-augmented) and standard (swap-only)."""

from __future__ import annotations

from dataclasses import dataclass, field

from .circuit import Circuit, DepthMode, depth, gate_counts
from .device import (AugmentedGraph, Device, DistanceMatrix, augment, plain_grid,
                     routable_grid_device, weighted_distances)
from .lowering import RemoteCxBlock, lower_with_blocks
from .metrics import ComparisonReport, Schedule, compare, schedule
from .router import RoutedCircuit, RouterParams, initial_layout, route


@dataclass(frozen=True)
class Compilation:
    mode: str  # "remote" or "standard"
    source: Circuit
    device: Device
    graph: AugmentedGraph = field(repr=False)
    dist: DistanceMatrix = field(repr=False)
    routed: RoutedCircuit = field(repr=False)
    output: Circuit = field(repr=False)
    blocks: tuple[RemoteCxBlock, ...] = ()
    schedule: Schedule | None = field(default=None, repr=False)

    def metrics(self, mode: DepthMode = DepthMode.ALL_GATES) -> dict:
        c = gate_counts(self.output)
        out = {
            "mode": self.mode,
            "n_qubits": self.source.n_qubits,
            "device_side": self.device.side,
            "epr_pairs": len(self.device.epr_pairs),
            "depth_mode": DepthMode(mode).value,
            "standard_cx": c.standard_cx,
            "remote_cx": c.remote_cx,
            "expanded_cx": c.expanded_cx,
            "single_qubit": c.single_qubit,
            "measure": c.measure,
            "depth": depth(self.output, mode),
            "swaps": self.routed.n_swaps,
        }
        if self.schedule is not None:
            out["contended_depth"] = self.schedule.makespan
        return out


def _finish(mode, circuit, device, params, physical, depth_mode) -> Compilation:
    graph = augment(device)
    dist = weighted_distances(graph)
    layout = initial_layout(circuit, graph, dist)
    routed = route(circuit, graph, dist, layout, params)
    output, blocks = lower_with_blocks(routed, device, graph, physical)
    sched = schedule(output, device, mode=depth_mode)
    return Compilation(mode, circuit, device, graph, dist, routed, output, tuple(blocks), sched)


def remote_device_for(circuit: Circuit, fidelity_standard=0.9, fidelity_augmented=0.8) -> Device:
    return routable_grid_device(max(circuit.n_qubits, 1), fidelity_standard, fidelity_augmented)


def compile_remote(circuit: Circuit, params: RouterParams | None = None,
                   device: Device | None = None, physical: bool = False,
                   fidelity_standard: float = 0.9, fidelity_augmented: float = 0.8,
                   depth_mode: DepthMode = DepthMode.ALL_GATES) -> Compilation:
    if device is None:
        device = remote_device_for(circuit, fidelity_standard, fidelity_augmented)
    return _finish("remote", circuit, device, params, physical, depth_mode)


def compile_standard(circuit: Circuit, side: int, params: RouterParams | None = None,
                     fidelity_standard: float = 0.9,
                     depth_mode: DepthMode = DepthMode.ALL_GATES) -> Compilation:
    """Swap-only baseline on a ``side x side`` grid with every node a data qubit."""
    return _finish("standard", circuit, plain_grid(side, fidelity_standard), params, False,
                   depth_mode)


def compile_both(circuit: Circuit, params: RouterParams | None = None,
                 device: Device | None = None, physical: bool = False,
                 fidelity_standard: float = 0.9, fidelity_augmented: float = 0.8,
                 depth_mode: DepthMode = DepthMode.ALL_GATES):
    rem = compile_remote(circuit, params, device, physical, fidelity_standard,
                         fidelity_augmented, depth_mode)
    std = compile_standard(circuit, rem.device.side, params, fidelity_standard, depth_mode)
    report = compare(circuit, rem.output, rem.schedule, std.output, rem.device, depth_mode,
                     rem.routed.n_swaps, std.routed.n_swaps)
    return rem, std, report


def report_for(circuit: Circuit, **kw) -> ComparisonReport:
    return compile_both(circuit, **kw)[2]
