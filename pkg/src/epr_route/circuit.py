"""Circuit intermediate representation: single-qubit gates plus CX.

Gates are immutable records over integer qubit/clbit indices. The DAG, depth
and tally helpers are pure functions of a :class:`Circuit`.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Sequence


class CircuitError(ValueError):
    """Structural problem in a circuit (bad index, arity, ...)."""


class GateKind(Enum):
    X = "x"
    Y = "y"
    Z = "z"
    H = "h"
    S = "s"
    SDG = "sdg"
    T = "t"
    TDG = "tdg"
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    U1 = "u1"
    U2 = "u2"
    U3 = "u3"
    CX = "cx"
    MEASURE = "measure"
    RESET = "reset"
    BARRIER = "barrier"
    REMOTE_CX = "remote_cx"

    @property
    def n_params(self) -> int:
        return _N_PARAMS.get(self, 0)

    @property
    def is_two_qubit(self) -> bool:
        return self in (GateKind.CX, GateKind.REMOTE_CX)

    @property
    def is_unitary_1q(self) -> bool:
        return self not in (GateKind.CX, GateKind.REMOTE_CX, GateKind.MEASURE,
                            GateKind.RESET, GateKind.BARRIER)


_N_PARAMS = {GateKind.RX: 1, GateKind.RY: 1, GateKind.RZ: 1, GateKind.U1: 1,
             GateKind.U2: 2, GateKind.U3: 3}


class EdgeKind(Enum):
    STANDARD = "standard"
    AUGMENTED = "augmented"


class DepthMode(Enum):
    ALL_GATES = "all"
    TWO_QUBIT_ONLY = "2q"


@dataclass(frozen=True)
class Gate:
    """One operation.

    ``block`` is the remote-CX provenance id set by lowering; ``swap`` marks
    CXs that belong to a router-inserted SWAP.
    """

    kind: GateKind
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    clbits: tuple[int, ...] = ()
    condition: tuple[int, int] | None = None
    edge_kind: EdgeKind | None = None
    block: int | None = None
    swap: bool = False

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        object.__setattr__(self, "clbits", tuple(int(c) for c in self.clbits))
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"repeated qubit in {self.kind.name}{self.qubits}")
        if len(self.params) != self.kind.n_params:
            raise CircuitError(f"{self.kind.name} takes {self.kind.n_params} parameter(s), "
                               f"got {len(self.params)}")
        want = 2 if self.kind.is_two_qubit else 1
        if self.kind is GateKind.BARRIER:
            if not self.qubits:
                raise CircuitError("barrier needs at least one qubit")
        elif len(self.qubits) != want:
            raise CircuitError(f"{self.kind.name} acts on {want} qubit(s), got {len(self.qubits)}")
        if self.kind is GateKind.MEASURE and len(self.clbits) != 1:
            raise CircuitError("measure needs exactly one classical bit")
        if self.condition is not None:
            bit, value = self.condition
            if value not in (0, 1):
                raise CircuitError(f"condition value must be 0 or 1, got {value}")
            object.__setattr__(self, "condition", (int(bit), int(value)))

    def wires(self) -> tuple[tuple[str, int], ...]:
        """Qubit and clbit wires this gate touches (condition bits included)."""
        out = [("q", q) for q in self.qubits]
        out += [("c", c) for c in self.clbits]
        if self.condition is not None and self.condition[0] not in self.clbits:
            out.append(("c", self.condition[0]))
        return tuple(out)

    def remap(self, mapping: Sequence[int] | dict[int, int]) -> "Gate":
        return replace(self, qubits=tuple(mapping[q] for q in self.qubits))

    def __repr__(self) -> str:
        s = f"{self.kind.name}"
        if self.params:
            s += "(" + ",".join(f"{p:.6g}" for p in self.params) + ")"
        s += str(list(self.qubits))
        if self.clbits:
            s += f"->c{list(self.clbits)}"
        if self.condition:
            s += f" if c{self.condition[0]}=={self.condition[1]}"
        return s


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list over ``n_qubits`` qubits and ``n_clbits`` classical bits.

    Equality is structural (registers and gates); ``name`` and ``metadata``
    are carried along but not compared.
    """

    n_qubits: int
    gates: tuple[Gate, ...] = ()
    n_clbits: int = 0
    name: str = field(default="circuit", compare=False)
    metadata: tuple[tuple[str, str], ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "metadata", tuple(sorted(dict(self.metadata).items())))
        self.validate()

    def validate(self) -> None:
        for pos, g in enumerate(self.gates):
            for q in g.qubits:
                if not 0 <= q < self.n_qubits:
                    raise CircuitError(f"gate {pos} ({g!r}): qubit {q} out of range "
                                       f"[0, {self.n_qubits})")
            for c in g.clbits + ((g.condition[0],) if g.condition else ()):
                if not 0 <= c < self.n_clbits:
                    raise CircuitError(f"gate {pos} ({g!r}): clbit {c} out of range "
                                       f"[0, {self.n_clbits})")

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    @property
    def meta(self) -> dict[str, str]:
        return dict(self.metadata)

    def with_gates(self, gates: Iterable[Gate], **changes) -> "Circuit":
        return replace(self, gates=tuple(gates), **changes)

    def interaction_counts(self) -> dict[tuple[int, int], int]:
        """CX multiplicity per unordered qubit pair."""
        counts: dict[tuple[int, int], int] = {}
        for g in self.gates:
            if g.kind.is_two_qubit:
                key = (min(g.qubits), max(g.qubits))
                counts[key] = counts.get(key, 0) + 1
        return counts


@dataclass(frozen=True)
class CircuitDag:
    """Dependency DAG; node ``i`` is ``circuit.gates[i]``."""

    circuit: Circuit
    preds: tuple[frozenset[int], ...]
    succs: tuple[frozenset[int], ...]

    @property
    def n_nodes(self) -> int:
        return len(self.preds)

    @property
    def n_edges(self) -> int:
        return sum(len(p) for p in self.preds)

    def edges(self) -> list[tuple[int, int]]:
        return sorted((p, i) for i, ps in enumerate(self.preds) for p in ps)

    def topological_order(self) -> list[int]:
        """Kahn's algorithm, smallest ready index first."""
        import heapq

        indeg = [len(p) for p in self.preds]
        ready = [i for i, d in enumerate(indeg) if d == 0]
        heapq.heapify(ready)
        order = []
        while ready:
            i = heapq.heappop(ready)
            order.append(i)
            for s in self.succs[i]:
                indeg[s] -= 1
                if indeg[s] == 0:
                    heapq.heappush(ready, s)
        return order

    def linearize(self, order: Sequence[int]) -> Circuit:
        return self.circuit.with_gates(self.circuit.gates[i] for i in order)


def build_dag(circuit: Circuit) -> CircuitDag:
    circuit.validate()
    n = len(circuit.gates)
    preds: list[set[int]] = [set() for _ in range(n)]
    succs: list[set[int]] = [set() for _ in range(n)]
    last: dict[tuple[str, int], int] = {}
    for i, g in enumerate(circuit.gates):
        for w in g.wires():
            j = last.get(w)
            if j is not None:
                preds[i].add(j)
                succs[j].add(i)
            last[w] = i
    return CircuitDag(circuit, tuple(frozenset(p) for p in preds),
                      tuple(frozenset(s) for s in succs))


def gate_weight(g: Gate, mode: DepthMode) -> int:
    if g.kind is GateKind.BARRIER:
        return 0
    if mode is DepthMode.TWO_QUBIT_ONLY:
        return 1 if g.kind.is_two_qubit else 0
    return 1


def depth(circuit: Circuit, mode: DepthMode = DepthMode.ALL_GATES) -> int:
    """Longest weighted path through the dependency DAG (ASAP layer count)."""
    mode = DepthMode(mode)
    level: dict[tuple[str, int], int] = {}
    best = 0
    for g in circuit.gates:
        wires = g.wires()
        t = max((level.get(w, 0) for w in wires), default=0) + gate_weight(g, mode)
        for w in wires:
            level[w] = t
        best = max(best, t)
    return best


@dataclass(frozen=True)
class GateCounts:
    standard_cx: int = 0
    remote_cx: int = 0
    single_qubit: int = 0
    measure: int = 0

    @property
    def expanded_cx(self) -> int:
        return self.standard_cx + 2 * self.remote_cx


def gate_counts(circuit: Circuit) -> GateCounts:
    """Tally gates by kind.

    CXs carrying a remote-block tag are not standard CXs; each distinct block
    counts once as a remote CX, as does each unexpanded REMOTE_CX.
    """
    std = rem = oneq = meas = 0
    blocks = set()
    for g in circuit.gates:
        if g.block is not None:
            blocks.add(g.block)
        if g.kind is GateKind.REMOTE_CX:
            rem += 1
        elif g.kind is GateKind.CX:
            if g.block is None:
                std += 1
        elif g.kind is GateKind.MEASURE:
            meas += 1
        elif g.kind.is_unitary_1q:
            oneq += 1
    return GateCounts(std, rem + len(blocks), oneq, meas)


def cx(c: int, t: int, **kw) -> Gate:
    return Gate(GateKind.CX, (c, t), **kw)


def g1(kind: GateKind | str, q: int, *params: float, **kw) -> Gate:
    if isinstance(kind, str):
        kind = GateKind(kind)
    return Gate(kind, (q,), params, **kw)
