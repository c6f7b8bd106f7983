"""Replace AUGMENTED-tagged CXs with EPR-mediated remote-CX blocks.

A remote CX(c, t) over EPR pair (a, b), with c next to a and t next to b::

    CX(c,a); CX(b,t); H(b); measure a -> ma; measure b -> mb;
    if(ma==1) X(t); if(mb==1) Z(c)

In physical mode the block is preceded by the pair preparation
``reset a; reset b; H(a); CX(a,b)``. Every gate of a block carries the block
id, so :func:`~epr_route.circuit.gate_counts` reports it as one remote CX.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit, EdgeKind, Gate, GateKind, cx
from .device import AugmentedGraph, Device
from .router import RoutedCircuit


class LoweringError(RuntimeError):
    pass


@dataclass(frozen=True)
class RemoteCxBlock:
    block_id: int
    control: int
    target: int
    epr_pair: tuple[int, int]  # (near control, near target)
    pair_id: int
    clbits: tuple[int, int]
    position: int = 0
    n_gates: int = 0

    def to_json(self) -> dict:
        return {"control": self.control, "target": self.target,
                "epr_pair": list(self.epr_pair), "pair_id": self.pair_id,
                "clbits": list(self.clbits), "position": self.position,
                "n_gates": self.n_gates}


def expand_block(control: int, target: int, a: int, b: int, ma: int, mb: int,
                 block_id: int, physical: bool = False) -> list[Gate]:
    tag = dict(block=block_id)
    gates = []
    if physical:
        gates += [Gate(GateKind.RESET, (a,), **tag), Gate(GateKind.RESET, (b,), **tag),
                  Gate(GateKind.H, (a,), **tag), cx(a, b, edge_kind=EdgeKind.STANDARD, **tag)]
    gates += [
        cx(control, a, edge_kind=EdgeKind.STANDARD, **tag),
        cx(b, target, edge_kind=EdgeKind.STANDARD, **tag),
        Gate(GateKind.H, (b,), **tag),
        Gate(GateKind.MEASURE, (a,), clbits=(ma,), **tag),
        Gate(GateKind.MEASURE, (b,), clbits=(mb,), **tag),
        Gate(GateKind.X, (target,), condition=(ma, 1), **tag),
        Gate(GateKind.Z, (control,), condition=(mb, 1), **tag),
    ]
    return gates


def _orient(device: Device, pair: tuple[int, int], c: int, t: int) -> tuple[int, int] | None:
    a, b = pair
    if c in device.neighbors(a) and t in device.neighbors(b):
        return a, b
    if c in device.neighbors(b) and t in device.neighbors(a):
        return b, a
    return None


def lower_with_blocks(routed: RoutedCircuit, device: Device, graph: AugmentedGraph,
                      physical: bool = False) -> tuple[Circuit, list[RemoteCxBlock]]:
    src = routed.circuit
    if src.n_qubits != device.n_qubits:
        raise LoweringError(f"routed circuit has {src.n_qubits} qubits, device {device.n_qubits}")
    out: list[Gate] = []
    blocks: list[RemoteCxBlock] = []
    load = [0] * len(device.epr_pairs)
    n_clbits = src.n_clbits
    for pos, g in enumerate(src.gates):
        if not (g.kind is GateKind.CX and g.edge_kind is EdgeKind.AUGMENTED):
            out.append(g)
            continue
        c, t = g.qubits
        edge = graph.edge(c, t, EdgeKind.AUGMENTED)
        if edge is None:
            raise LoweringError(f"gate {pos} {g!r}: no augmented edge ({c},{t}) in the graph")
        options = []
        for pid in sorted(edge.serving_pairs):
            oriented = _orient(device, device.epr_pairs[pid], c, t)
            if oriented is not None:
                options.append((load[pid], pid, oriented))
        if not options:
            raise LoweringError(f"gate {pos} {g!r}: no EPR pair serves ({c},{t}) in either "
                                "orientation")
        _, pid, (a, b) = min(options)
        load[pid] += 1
        bid = len(blocks)
        ma, mb = n_clbits, n_clbits + 1
        n_clbits += 2
        body = expand_block(c, t, a, b, ma, mb, bid, physical)
        blocks.append(RemoteCxBlock(bid, c, t, (a, b), pid, (ma, mb), len(out), len(body)))
        out.extend(body)
    meta = dict(src.metadata)
    meta["epr_prep"] = "emitted" if physical else "assumed"
    return Circuit(src.n_qubits, tuple(out), n_clbits, name=src.name,
                   metadata=tuple(meta.items())), blocks


def lower(routed: RoutedCircuit, device: Device, graph: AugmentedGraph,
          physical: bool = False) -> Circuit:
    return lower_with_blocks(routed, device, graph, physical)[0]


def block_spans(circuit: Circuit) -> dict[int, list[int]]:
    """Gate positions of every tagged block, keyed by block id."""
    spans: dict[int, list[int]] = {}
    for i, g in enumerate(circuit.gates):
        if g.block is not None:
            spans.setdefault(g.block, []).append(i)
    return spans


def block_pairs(circuit: Circuit, device: Device) -> dict[int, tuple[int, int]]:
    """EPR pair (sorted) used by each block, read off the ancillas it touches."""
    pair_of = {}
    for a, b in device.epr_pairs:
        pair_of[a] = pair_of[b] = (a, b)
    out: dict[int, tuple[int, int]] = {}
    for bid, idx in block_spans(circuit).items():
        for i in idx:
            for q in circuit.gates[i].qubits:
                if q in pair_of:
                    out[bid] = pair_of[q]
                    break
            if bid in out:
                break
        else:
            raise LoweringError(f"block {bid} touches no EPR ancilla")
    return out


def retag_blocks(circuit: Circuit, sidecar: dict) -> Circuit:
    """Restore block tags on a parsed circuit from its provenance sidecar."""
    gates = list(circuit.gates)
    for key, info in sidecar.get("blocks", {}).items():
        bid = int(key)
        start, n = int(info["position"]), int(info["n_gates"])
        if start + n > len(gates):
            raise LoweringError(f"block {bid} span exceeds circuit length")
        for i in range(start, start + n):
            g = gates[i]
            gates[i] = Gate(g.kind, g.qubits, g.params, g.clbits, g.condition,
                            g.edge_kind, bid, g.swap)
    return circuit.with_gates(gates)
