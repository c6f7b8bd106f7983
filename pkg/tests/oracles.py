"""Independent reference implementations used as test oracles.

Nothing here calls into the package's simulator, distance code or scheduler;
only the circuit/device data types are shared.
"""

from __future__ import annotations

import math
from collections import deque

import numpy as np

from epr_route.circuit import Circuit, Gate, GateKind, cx, g1

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
P0 = np.diag([1, 0]).astype(complex)
P1 = np.diag([0, 1]).astype(complex)


def u3(theta, phi, lam):
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -np.exp(1j * lam) * s],
                     [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]])


def one_qubit_matrix(kind: GateKind, params=()) -> np.ndarray:
    t = params[0] if params else 0.0
    return {
        GateKind.X: lambda: X, GateKind.Y: lambda: Y, GateKind.Z: lambda: Z,
        GateKind.H: lambda: H,
        GateKind.S: lambda: np.diag([1, 1j]), GateKind.SDG: lambda: np.diag([1, -1j]),
        GateKind.T: lambda: np.diag([1, np.exp(1j * math.pi / 4)]),
        GateKind.TDG: lambda: np.diag([1, np.exp(-1j * math.pi / 4)]),
        GateKind.RX: lambda: np.array([[math.cos(t / 2), -1j * math.sin(t / 2)],
                                       [-1j * math.sin(t / 2), math.cos(t / 2)]]),
        GateKind.RY: lambda: np.array([[math.cos(t / 2), -math.sin(t / 2)],
                                       [math.sin(t / 2), math.cos(t / 2)]]),
        GateKind.RZ: lambda: np.diag([np.exp(-1j * t / 2), np.exp(1j * t / 2)]),
        GateKind.U1: lambda: np.diag([1, np.exp(1j * t)]),
        GateKind.U2: lambda: u3(math.pi / 2, params[0], params[1]),
        GateKind.U3: lambda: u3(*params),
    }[kind]().astype(complex)


def embed(op: np.ndarray, q: int, n: int) -> np.ndarray:
    """Full 2^n matrix of a 1q operator on qubit q (qubit 0 = least significant)."""
    full = np.array([[1]], dtype=complex)
    for k in reversed(range(n)):
        full = np.kron(full, op if k == q else I2)
    return full


def cx_matrix(c: int, t: int, n: int) -> np.ndarray:
    return embed(P0, c, n) + embed(P1, c, n) @ embed(X, t, n)


def cz_matrix(c: int, t: int, n: int) -> np.ndarray:
    return embed(P0, c, n) + embed(P1, c, n) @ embed(Z, t, n)


def unitary(circuit: Circuit) -> np.ndarray:
    n = circuit.n_qubits
    u = np.eye(2 ** n, dtype=complex)
    for g in circuit.gates:
        if g.kind is GateKind.BARRIER:
            continue
        if g.kind is GateKind.CX:
            m = cx_matrix(*g.qubits, n)
        elif g.kind.is_unitary_1q and g.condition is None:
            m = embed(one_qubit_matrix(g.kind, g.params), g.qubits[0], n)
        else:
            raise ValueError(f"not unitary: {g}")
        u = m @ u
    return u


def dft_matrix(n_qubits: int) -> np.ndarray:
    N = 2 ** n_qubits
    j, k = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    return np.exp(2j * math.pi * j * k / N) / math.sqrt(N)


def bit_reverse_permutation(n: int) -> np.ndarray:
    N = 2 ** n
    p = np.zeros((N, N))
    for i in range(N):
        r = int(format(i, f"0{n}b")[::-1], 2)
        p[r, i] = 1
    return p


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(a[idx]) < 1e-12:
        return False
    phase = b[idx] / a[idx]
    return np.allclose(a * phase, b, atol=tol)


# ---------------------------------------------------------------- graphs

def floyd_warshall(n: int, edges: list[tuple[int, int, float]], nodes) -> np.ndarray:
    """Textbook Floyd-Warshall (row-vectorised relaxation per pivot)."""
    d = np.full((n, n), np.inf)
    for u in nodes:
        d[u, u] = 0.0
    for u, v, w in edges:
        d[u, v] = min(d[u, v], w)
        d[v, u] = min(d[v, u], w)
    for k in nodes:
        d = np.minimum(d, d[:, k:k + 1] + d[k:k + 1, :])
    return d


# ---------------------------------------------------------------- depth

def asap_layers(circuit: Circuit, two_qubit_only: bool = False) -> int:
    """Greedy layer peeling: each round places every gate none of whose wires
    is held by an earlier unplaced gate. In 2q mode single-qubit unitaries
    are dropped first, which cannot change the 2q critical path."""
    gates = list(circuit.gates)
    if any(g.kind is GateKind.BARRIER for g in gates):
        raise ValueError("oracle does not model barriers")
    if two_qubit_only:
        gates = [g for g in gates if g.kind.is_two_qubit
                 or not (g.kind.is_unitary_1q and g.condition is None)]
    wires = [g.wires() for g in gates]
    remaining = list(range(len(gates)))
    layers = 0
    while remaining:
        layers += 1
        blocked: set = set()
        keep = []
        for i in remaining:
            if any(w in blocked for w in wires[i]):
                keep.append(i)
            blocked.update(wires[i])
        remaining = keep
    if two_qubit_only and any(not g.kind.is_two_qubit for g in gates):
        raise ValueError("2q oracle only models unitary circuits")
    return layers


# ---------------------------------------------------------------- routing

def optimal_swaps(circuit: Circuit, std_edges: list[tuple[int, int]], layout: list[int],
                  max_swaps: int) -> int | None:
    """Minimum swap count over all swap insertions and DAG-respecting orders.

    BFS over (placement, executed-CX set). Returns None if more than
    ``max_swaps`` swaps are needed.
    """
    cxs = [g.qubits for g in circuit.gates if g.kind.is_two_qubit]
    preds = []
    last: dict[int, int] = {}
    for i, (a, b) in enumerate(cxs):
        preds.append({last[q] for q in (a, b) if q in last})
        last[a] = last[b] = i
    adj = {frozenset(e) for e in std_edges}
    full = (1 << len(cxs)) - 1

    def closure(pos, done):
        changed = True
        while changed:
            changed = False
            for i, (a, b) in enumerate(cxs):
                if done >> i & 1 or any(not done >> p & 1 for p in preds[i]):
                    continue
                if frozenset((pos[a], pos[b])) in adj:
                    done |= 1 << i
                    changed = True
        return done

    start = (tuple(layout), closure(layout, 0))
    seen = {start}
    frontier = deque([(start, 0)])
    while frontier:
        (pos, done), k = frontier.popleft()
        if done == full:
            return k
        if k == max_swaps:
            continue
        inv = {p: v for v, p in enumerate(pos)}
        for u, v in std_edges:
            new = list(pos)
            if u in inv:
                new[inv[u]] = v
            if v in inv:
                new[inv[v]] = u
            if u not in inv and v not in inv:
                continue
            state = (tuple(new), closure(new, done))
            if state not in seen:
                seen.add(state)
                frontier.append((state, k + 1))
    return None


# ---------------------------------------------------------------- scheduling

def block_intervals(block: list[Gate], horizon: int) -> set[tuple[int, int]]:
    """All (first, last) layer spans achievable by a block scheduled alone.

    Exhaustive over every assignment of unit-time start layers in
    [1, horizon] that respects wire order (gates visited in program order, so
    only dependency-violating branches are pruned).
    """
    wires = [set(g.wires()) for g in block]
    deps = [[j for j in range(i) if wires[i] & wires[j]] for i in range(len(block))]
    spans: set[tuple[int, int]] = set()
    times = [0] * len(block)

    def visit(i: int):
        if i == len(block):
            spans.add((min(times), max(times)))
            return
        lo = max((times[j] for j in deps[i]), default=0) + 1
        for t in range(lo, horizon + 1):
            times[i] = t
            visit(i + 1)

    visit(0)
    return spans


def best_shared_pair_makespan(spans1, spans2) -> int:
    best = math.inf
    for f1, l1 in spans1:
        for f2, l2 in spans2:
            if l1 < f2 or l2 < f1:
                best = min(best, max(l1, l2))
    return best


# ---------------------------------------------------------------- circuits

_ONE_Q = [GateKind.X, GateKind.Y, GateKind.Z, GateKind.H, GateKind.S, GateKind.SDG,
          GateKind.T, GateKind.TDG, GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.U1,
          GateKind.U2, GateKind.U3]


def random_circuit(rng: np.random.Generator, n_qubits: int, n_gates: int,
                   cx_fraction: float = 0.5, name: str = "rand") -> Circuit:
    gates = []
    for _ in range(n_gates):
        if rng.random() < cx_fraction:
            a, b = rng.choice(n_qubits, size=2, replace=False)
            gates.append(cx(int(a), int(b)))
        else:
            kind = _ONE_Q[int(rng.integers(len(_ONE_Q)))]
            params = [float(x) for x in rng.uniform(-math.pi, math.pi, size=kind.n_params)]
            gates.append(g1(kind, int(rng.integers(n_qubits)), *params))
    return Circuit(n_qubits, tuple(gates), name=name)


def density_of(psi: np.ndarray, keep: list[int], n: int) -> np.ndarray:
    """Reduced density matrix on ``keep`` (qubit 0 = least significant)."""
    t = psi.reshape([2] * n)  # axis i is qubit n-1-i
    axes_keep = [n - 1 - q for q in keep]
    axes_drop = [a for a in range(n) if a not in axes_keep]
    t = np.transpose(t, axes_keep + axes_drop).reshape(2 ** len(keep), -1)
    return t @ t.conj().T
