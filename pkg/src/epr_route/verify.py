"""Statevector simulation with mid-circuit measurement branching.

States are kept internally as flat arrays in "qubit 0 most significant"
order so a single-qubit gate on ``q`` is a reshape to
``(2**q, 2, 2**(n-q-1))``. :class:`StateVector` exposes the conventional
qubit-0-least-significant amplitude order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate, GateKind, cx
from .lowering import block_spans, block_pairs
from .router import Layout

MAX_QUBITS = 16
_EPS = 1e-12


class SimulationError(ValueError):
    pass


class NotVerifiable(SimulationError):
    """Circuit is outside the desk-scale limits of the simulator."""


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray  # index bit i = qubit i

    @property
    def n_qubits(self) -> int:
        return int(round(math.log2(len(self.amplitudes))))

    @classmethod
    def zero(cls, n: int) -> "StateVector":
        a = np.zeros(2 ** n, dtype=complex)
        a[0] = 1
        return cls(a)

    @classmethod
    def product(cls, qubit_states) -> "StateVector":
        """Tensor product, ``qubit_states[i]`` for qubit ``i``."""
        return _from_internal(_product_internal(qubit_states))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def _to_internal(sv: StateVector) -> np.ndarray:
    n = sv.n_qubits
    return np.ascontiguousarray(
        sv.amplitudes.reshape((2,) * n).transpose(tuple(range(n - 1, -1, -1))).reshape(-1)
    ) if n else sv.amplitudes.copy()


def _from_internal(psi: np.ndarray) -> StateVector:
    n = int(round(math.log2(len(psi))))
    if n == 0:
        return StateVector(psi.copy())
    return StateVector(np.ascontiguousarray(
        psi.reshape((2,) * n).transpose(tuple(range(n - 1, -1, -1))).reshape(-1)))


def _product_internal(qubit_states) -> np.ndarray:
    psi = np.ones(1, dtype=complex)
    for s in qubit_states:
        psi = np.kron(psi, np.asarray(s, dtype=complex))
    return psi


@dataclass(frozen=True)
class BranchOutcome:
    clbits: tuple[int, ...]
    probability: float
    state: StateVector


def gate_matrix(g: Gate) -> np.ndarray:
    k = g.kind
    p = g.params
    s2 = 1 / math.sqrt(2)
    if k is GateKind.X:
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if k is GateKind.Y:
        return np.array([[0, -1j], [1j, 0]], dtype=complex)
    if k is GateKind.Z:
        return np.diag([1, -1]).astype(complex)
    if k is GateKind.H:
        return np.array([[s2, s2], [s2, -s2]], dtype=complex)
    if k is GateKind.S:
        return np.diag([1, 1j])
    if k is GateKind.SDG:
        return np.diag([1, -1j])
    if k is GateKind.T:
        return np.diag([1, np.exp(1j * math.pi / 4)])
    if k is GateKind.TDG:
        return np.diag([1, np.exp(-1j * math.pi / 4)])
    if k is GateKind.RX:
        c, s = math.cos(p[0] / 2), math.sin(p[0] / 2)
        return np.array([[c, -1j * s], [-1j * s, c]])
    if k is GateKind.RY:
        c, s = math.cos(p[0] / 2), math.sin(p[0] / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if k is GateKind.RZ:
        return np.diag([np.exp(-0.5j * p[0]), np.exp(0.5j * p[0])])
    if k is GateKind.U1:
        return np.diag([1, np.exp(1j * p[0])])
    if k in (GateKind.U2, GateKind.U3):
        theta, phi, lam = (math.pi / 2, p[0], p[1]) if k is GateKind.U2 else p
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        return np.array([[c, -np.exp(1j * lam) * s],
                         [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]])
    raise SimulationError(f"no matrix for {k.name}")


def _apply_1q(psi: np.ndarray, n: int, q: int, m: np.ndarray) -> np.ndarray:
    v = psi.reshape(1 << q, 2, 1 << (n - q - 1))
    a, b = v[:, 0, :], v[:, 1, :]
    out = np.empty_like(v)
    out[:, 0, :] = m[0, 0] * a + m[0, 1] * b
    out[:, 1, :] = m[1, 0] * a + m[1, 1] * b
    return out.reshape(-1)


def _apply_cx(psi: np.ndarray, n: int, c: int, t: int) -> np.ndarray:
    out = psi.copy()
    v = out.reshape((2,) * n)
    i0 = [slice(None)] * n
    i1 = [slice(None)] * n
    i0[c] = i1[c] = 1
    i0[t], i1[t] = 0, 1
    i0, i1 = tuple(i0), tuple(i1)
    tmp = v[i0].copy()
    v[i0] = v[i1]
    v[i1] = tmp
    return out


def _project(psi: np.ndarray, n: int, q: int, bit: int) -> tuple[float, np.ndarray]:
    """Probability of ``bit`` on ``q`` and the renormalised projected state."""
    v = psi.reshape(1 << q, 2, 1 << (n - q - 1))
    part = v[:, bit, :]
    prob = float(np.vdot(part, part).real)
    out = np.zeros_like(v)
    if prob > 0:
        out[:, bit, :] = part / math.sqrt(prob)
    return prob, out.reshape(-1)


_X = np.array([[0, 1], [1, 0]], dtype=complex)


def _check(circuit: Circuit):
    if circuit.n_qubits > MAX_QUBITS:
        raise NotVerifiable(f"{circuit.n_qubits} qubits exceeds the {MAX_QUBITS}-qubit "
                            "simulation limit")
    for pos, g in enumerate(circuit.gates):
        if g.kind is GateKind.REMOTE_CX:
            raise SimulationError(f"unexpanded composite REMOTE_CX at position {pos}")


def _step(g: Gate, psi: np.ndarray, n: int, bits: list[int]):
    """Apply one gate; yields (probability factor, state, bits) per outcome, 0 first."""
    if g.condition is not None and bits[g.condition[0]] != g.condition[1]:
        yield 1.0, psi, bits
        return
    k = g.kind
    if k is GateKind.BARRIER:
        yield 1.0, psi, bits
    elif k is GateKind.CX:
        yield 1.0, _apply_cx(psi, n, *g.qubits), bits
    elif k in (GateKind.MEASURE, GateKind.RESET):
        q = g.qubits[0]
        for bit in (0, 1):
            p, post = _project(psi, n, q, bit)
            if p <= _EPS:
                continue
            nb = bits
            if k is GateKind.MEASURE:
                nb = list(bits)
                nb[g.clbits[0]] = bit
            elif bit == 1:
                post = _apply_1q(post, n, q, _X)
            yield p, post, nb
    else:
        yield 1.0, _apply_1q(psi, n, g.qubits[0], gate_matrix(g)), bits


def simulate(circuit: Circuit, initial: StateVector | None = None) -> list[BranchOutcome]:
    """Exact depth-first enumeration of measurement branches (outcome 0 first)."""
    _check(circuit)
    n = circuit.n_qubits
    init = StateVector.zero(n) if initial is None else initial
    if init.n_qubits != n:
        raise SimulationError(f"initial state has {init.n_qubits} qubits, circuit {n}")
    gates = circuit.gates
    out: list[BranchOutcome] = []
    stack = [(0, _to_internal(init), [0] * circuit.n_clbits, 1.0)]
    while stack:
        i, psi, bits, prob = stack.pop()
        while i < len(gates):
            outcomes = list(_step(gates[i], psi, n, bits))
            for p, s, b in reversed(outcomes[1:]):
                stack.append((i + 1, s, b, prob * p))
            p, psi, bits = outcomes[0]
            prob *= p
            i += 1
        out.append(BranchOutcome(tuple(bits), prob, _from_internal(psi)))
    return out


def simulate_merged(circuit: Circuit, initial: np.ndarray, max_branches: int = 4096):
    """Breadth-first simulation that merges indistinguishable branches.

    Two branches merge when their states agree up to global phase and their
    classical bits agree on every bit still read later. A measured qubit whose
    next use is a reset (or that is never used again) is reset immediately,
    which leaves every other qubit's state untouched. Returns a list of
    ``(probability, internal_state, bits)``.
    """
    _check(circuit)
    n = circuit.n_qubits
    gates = list(circuit.gates)
    last_read = {}
    for i, g in enumerate(gates):
        if g.condition is not None:
            last_read[g.condition[0]] = i
    dead_after = set()
    for i, g in enumerate(gates):
        if g.kind is not GateKind.MEASURE:
            continue
        q = g.qubits[0]
        nxt = next((j for j in range(i + 1, len(gates)) if q in gates[j].qubits), None)
        if nxt is None or (gates[nxt].kind is GateKind.RESET and gates[nxt].condition is None):
            dead_after.add(i)

    branches = [(1.0, initial, [0] * circuit.n_clbits)]
    for i, g in enumerate(gates):
        nxt: list = []
        for prob, psi, bits in branches:
            for p, s, b in _step(g, psi, n, bits):
                if i in dead_after and g.kind is GateKind.MEASURE and b[g.clbits[0]] == 1:
                    s = _apply_1q(s, n, g.qubits[0], _X)
                nxt.append((prob * p, s, b))
        if len(nxt) > 1:
            live = [c for c, j in last_read.items() if j > i]
            merged: list = []
            for prob, psi, bits in nxt:
                key = tuple(bits[c] for c in live)
                for m in merged:
                    if m[3] == key and abs(np.vdot(m[1], psi)) ** 2 > 1 - 1e-12:
                        m[0] += prob
                        break
                else:
                    merged.append([prob, psi, bits, key])
            nxt = [(m[0], m[1], m[2]) for m in merged]
        if len(nxt) > max_branches:
            raise SimulationError(f"more than {max_branches} distinct branches")
        branches = nxt
    return branches


def with_epr_prep(circuit: Circuit, device) -> Circuit:
    """Insert ``reset; reset; H; CX`` pair preparation before every tagged block
    that does not already prepare its own pair."""
    spans = block_spans(circuit)
    if not spans:
        return circuit
    pairs = block_pairs(circuit, device)
    insert_at: dict[int, list[Gate]] = {}
    for bid, idx in spans.items():
        if any(circuit.gates[i].kind is GateKind.RESET for i in idx):
            continue
        a, b = _oriented_pair(circuit, idx, pairs[bid])
        insert_at[idx[0]] = [Gate(GateKind.RESET, (a,)), Gate(GateKind.RESET, (b,)),
                             Gate(GateKind.H, (a,)), cx(a, b)]
    gates: list[Gate] = []
    for i, g in enumerate(circuit.gates):
        gates.extend(insert_at.get(i, ()))
        gates.append(g)
    return circuit.with_gates(gates)


def _oriented_pair(circuit: Circuit, idx, pair):
    # the first CX of a block targets the control-side ancilla
    for i in idx:
        g = circuit.gates[i]
        if g.kind is GateKind.CX and g.qubits[1] in pair:
            a = g.qubits[1]
            return a, pair[1] if a == pair[0] else pair[0]
    return pair


def haar_qubit(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return v / np.linalg.norm(v)


@dataclass(frozen=True)
class EquivalenceResult:
    passed: bool
    min_fidelity: float
    trials: int
    seed: int
    branches: int


def check_equivalence(source: Circuit, compiled: Circuit, initial_layout: Layout,
                      final_layout: Layout, trials: int = 20, seed: int = 0,
                      device=None, threshold: float = 1 - 1e-9) -> EquivalenceResult:
    """Compare ``compiled`` against ``source`` on seeded random product states.

    When ``device`` is given, remote blocks that assume a ready EPR pair get
    an explicit preparation inserted before them.
    """
    for pos, g in enumerate(source.gates):
        if g.kind in (GateKind.MEASURE, GateKind.RESET) or g.condition is not None:
            raise SimulationError(f"source must be measurement-free (gate {pos})")
    if source.n_qubits > MAX_QUBITS:
        raise NotVerifiable(f"source has {source.n_qubits} qubits")
    if device is not None:
        compiled = with_epr_prep(compiled, device)
    _check(compiled)
    nv, nc = source.n_qubits, compiled.n_qubits
    for lay in (initial_layout, final_layout):
        if len(lay) != nv or any(not 0 <= p < nc for p in lay.v2p):
            raise SimulationError(f"layout {lay.v2p} inconsistent with {nv} virtual / "
                                  f"{nc} physical qubits")
    rng = np.random.default_rng(seed)
    zero = np.array([1, 0], dtype=complex)
    worst = 1.0
    n_branches = 0
    for _ in range(trials):
        qs = [haar_qubit(rng) for _ in range(nv)]
        (src_out,) = simulate_merged(source, _product_internal(qs))
        target = src_out[1]
        phys = [zero] * nc
        for v, p in enumerate(initial_layout.v2p):
            phys[p] = qs[v]
        for prob, psi, _ in simulate_merged(compiled, _product_internal(phys)):
            n_branches += 1
            t = psi.reshape((2,) * nc)
            order = list(final_layout.v2p)
            rest = [q for q in range(nc) if q not in set(order)]
            m = t.transpose(order + rest).reshape(1 << nv, -1)
            amp = target.conj() @ m
            worst = min(worst, float(np.vdot(amp, amp).real))
    return EquivalenceResult(worst >= threshold, worst, trials, seed, n_branches)
