"""Layout selection and weighted swap-based routing over an augmented graph.

A CX is executable as soon as its two physical qubits share any edge of the
augmented graph; STANDARD is preferred over AUGMENTED when both exist.
Otherwise SWAPs (three CXs) are inserted on STANDARD edges only, chosen by a
lookahead cost over fidelity-weighted distances with per-qubit decay.
Every choice breaks ties lexicographically, so routing is deterministic.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .circuit import Circuit, EdgeKind, Gate, GateKind, build_dag, cx
from .device import AugmentedGraph, DistanceMatrix


class RoutingError(RuntimeError):
    pass


@dataclass(frozen=True)
class Layout:
    """Virtual qubit ``v`` lives on physical node ``v2p[v]``."""

    v2p: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "v2p", tuple(int(p) for p in self.v2p))
        if len(set(self.v2p)) != len(self.v2p):
            raise ValueError(f"layout is not injective: {self.v2p}")

    @property
    def p2v(self) -> dict[int, int]:
        return {p: v for v, p in enumerate(self.v2p)}

    def __len__(self) -> int:
        return len(self.v2p)

    def to_json(self) -> list[int]:
        return list(self.v2p)


@dataclass(frozen=True)
class RouterParams:
    lookahead_size: int = 20
    lookahead_weight: float = 0.5
    decay: float = 0.001
    decay_reset: int = 5

    def __post_init__(self):
        if self.lookahead_size < 0:
            raise ValueError("lookahead_size must be >= 0")
        if self.lookahead_weight < 0:
            raise ValueError("lookahead_weight must be >= 0")
        if self.decay < 0:
            raise ValueError("decay must be >= 0")
        if self.decay_reset < 1:
            raise ValueError("decay_reset must be >= 1")


@dataclass(frozen=True)
class RoutedCircuit:
    circuit: Circuit
    initial_layout: Layout
    final_layout: Layout
    params: RouterParams = field(default_factory=RouterParams)

    @property
    def n_swaps(self) -> int:
        return sum(1 for g in self.circuit.gates if g.swap) // 3

    @property
    def n_augmented(self) -> int:
        return sum(1 for g in self.circuit.gates if g.edge_kind is EdgeKind.AUGMENTED)


def interaction_degrees(circuit: Circuit) -> list[int]:
    deg = [0] * circuit.n_qubits
    for (a, b), w in circuit.interaction_counts().items():
        deg[a] += w
        deg[b] += w
    return deg


def initial_layout(circuit: Circuit, graph: AugmentedGraph, dist: DistanceMatrix,
                   candidates: list[int] | None = None) -> Layout:
    """Greedy placement guided by the CX interaction graph.

    Virtual qubits are placed by descending weighted degree. The first goes to
    the candidate node of minimal eccentricity; each later one to the free node
    minimising the multiplicity-weighted distance to its placed partners, ties
    broken by distance to that first node, then node index.
    """
    cands = sorted(graph.routable_nodes() if candidates is None else candidates)
    n = circuit.n_qubits
    if n > len(cands):
        raise RoutingError(f"circuit needs {n} qubits but the device offers only "
                           f"{len(cands)} routable data nodes")
    if n == 0:
        return Layout(())
    d = dist.dist
    seed = min(cands, key=lambda p: (dist.eccentricity(p, cands), p))
    counts = circuit.interaction_counts()
    partners: dict[int, dict[int, int]] = {v: {} for v in range(n)}
    for (a, b), w in counts.items():
        partners[a][b] = w
        partners[b][a] = w
    deg = interaction_degrees(circuit)
    order = sorted(range(n), key=lambda v: (-deg[v], v))

    v2p: dict[int, int] = {order[0]: seed}
    free = [p for p in cands if p != seed]
    for v in order[1:]:
        placed = [(w, v2p[u]) for u, w in sorted(partners[v].items()) if u in v2p]

        def cost(p):
            return (sum(w * d[p, q] for w, q in placed), d[seed, p], p)

        best = min(free, key=cost)
        v2p[v] = best
        free.remove(best)
    return Layout(tuple(v2p[v] for v in range(n)))


def route(circuit: Circuit, graph: AugmentedGraph, dist: DistanceMatrix, layout: Layout,
          params: RouterParams | None = None) -> RoutedCircuit:
    params = params or RouterParams()
    if len(layout) != circuit.n_qubits:
        raise RoutingError(f"layout covers {len(layout)} qubits, circuit has {circuit.n_qubits}")
    nodes = set(graph.nodes)
    for p in layout.v2p:
        if p not in nodes:
            raise RoutingError(f"layout places a qubit on non-data node {p}")
    for pos, g in enumerate(circuit.gates):
        if g.kind is GateKind.REMOTE_CX:
            raise RoutingError(f"input already contains REMOTE_CX (position {pos})")

    dag = build_dag(circuit)
    gates = circuit.gates
    indeg = [len(p) for p in dag.preds]
    front = sorted(i for i, k in enumerate(indeg) if k == 0)
    done = [False] * len(gates)

    l2p = list(layout.v2p)
    p2l = {p: v for v, p in enumerate(l2p)}
    std_nbrs = graph.standard_neighbors()
    d = dist.dist.tolist()
    decay = {p: 1.0 for p in graph.nodes}
    out: list[Gate] = []
    rounds = 0
    stalled = 0
    stall_limit = max(10, 2 * len(graph.nodes))

    def finish(i: int):
        done[i] = True
        for s in sorted(dag.succs[i]):
            indeg[s] -= 1
            if indeg[s] == 0:
                new_front.append(s)

    def apply_swap(a: int, b: int):
        nonlocal rounds
        tag = dict(edge_kind=EdgeKind.STANDARD, swap=True)
        out.extend([cx(a, b, **tag), cx(b, a, **tag), cx(a, b, **tag)])
        va, vb = p2l.pop(a, None), p2l.pop(b, None)
        if va is not None:
            l2p[va] = b
            p2l[b] = va
        if vb is not None:
            l2p[vb] = a
            p2l[a] = vb
        decay[a] += params.decay
        decay[b] += params.decay
        rounds += 1
        if rounds % params.decay_reset == 0:
            for p in decay:
                decay[p] = 1.0

    while front:
        # execute everything executable, repeatedly, in index order
        n_before = sum(done)
        while True:
            new_front: list[int] = []
            blocked = []
            for i in front:
                g = gates[i]
                if g.kind.is_two_qubit:
                    pa, pb = l2p[g.qubits[0]], l2p[g.qubits[1]]
                    kind = graph.shared_kind(pa, pb)
                    if kind is None:
                        blocked.append(i)
                        continue
                    out.append(Gate(GateKind.CX, (pa, pb), g.params, g.clbits, g.condition,
                                    edge_kind=kind))
                else:
                    out.append(g.remap(l2p))
                finish(i)
            if not new_front:
                front = blocked
                break
            front = sorted(blocked + new_front)
        if not front:
            break
        if sum(done) > n_before:
            stalled = 0
            for p in decay:
                decay[p] = 1.0

        cand = set()
        for i in front:
            for q in gates[i].qubits:
                p = l2p[q]
                for nb in std_nbrs[p]:
                    cand.add((min(p, nb), max(p, nb)))
        if not cand:
            raise RoutingError(f"no legal swap can help gate {front[0]} ({gates[front[0]]!r})")

        if stalled >= stall_limit:
            _force_adjacent(gates[front[0]], l2p, graph, std_nbrs, apply_swap)
            stalled = 0
            continue

        look = _extended_set(front, dag.succs, gates, params.lookahead_size)
        front_pairs = [gates[i].qubits for i in front]
        look_pairs = [gates[i].qubits for i in look]
        look_scale = params.lookahead_weight / len(look_pairs) if look_pairs else 0.0

        best = None
        for a, b in sorted(cand):
            def pos(q):
                p = l2p[q]
                return b if p == a else a if p == b else p

            h = sum(d[pos(c)][pos(t)] for c, t in front_pairs)
            if look_pairs:
                h += look_scale * sum(d[pos(c)][pos(t)] for c, t in look_pairs)
            h *= max(decay[a], decay[b])
            key = (h, a, b)
            if best is None or key < best:
                best = key
        apply_swap(best[1], best[2])
        stalled += 1

    routed = Circuit(graph.n_physical, tuple(out), circuit.n_clbits, name=circuit.name,
                     metadata=circuit.metadata)
    return RoutedCircuit(routed, layout, Layout(tuple(l2p)), params)


def _extended_set(front: list[int], succs, gates, size: int) -> list[int]:
    """First ``size`` two-qubit gates reached breadth-first from the front layer."""
    if size == 0:
        return []
    look: list[int] = []
    seen = set(front)
    layer = front
    while layer and len(look) < size:
        nxt = sorted({s for i in layer for s in succs[i]} - seen)
        seen.update(nxt)
        for i in nxt:
            if gates[i].kind.is_two_qubit:
                look.append(i)
                if len(look) == size:
                    break
        layer = nxt
    return look


def _force_adjacent(g: Gate, l2p, graph: AugmentedGraph, std_nbrs, apply_swap) -> None:
    """Walk the control along a STANDARD shortest path until the gate is executable."""
    src, dst = l2p[g.qubits[0]], l2p[g.qubits[1]]
    prev = {src: None}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        if u == dst:
            break
        for v in std_nbrs[u]:
            if v not in prev:
                prev[v] = u
                queue.append(v)
    if dst not in prev:
        raise RoutingError(f"qubits on nodes {src} and {dst} cannot be brought together "
                           "by STANDARD swaps")
    path = [dst]
    while path[-1] != src:
        path.append(prev[path[-1]])
    path.reverse()
    here = src
    for nxt in path[1:-1]:
        if graph.shared_kind(here, dst) is not None:
            break
        apply_swap(min(here, nxt), max(here, nxt))
        here = nxt


def check_routing(routed: RoutedCircuit, graph: AugmentedGraph) -> list[str]:
    """Every violation of the edge-kind contract, as messages (empty when valid)."""
    problems = []
    for pos, g in enumerate(routed.circuit.gates):
        if not g.kind.is_two_qubit:
            continue
        u, v = g.qubits
        if g.edge_kind is None:
            problems.append(f"gate {pos} {g!r}: missing edge-kind tag")
        elif graph.edge(u, v, g.edge_kind) is None:
            problems.append(f"gate {pos} {g!r}: no {g.edge_kind.value} edge ({u},{v})")
        elif g.edge_kind is EdgeKind.AUGMENTED and graph.edge(u, v, EdgeKind.STANDARD):
            problems.append(f"gate {pos} {g!r}: tagged augmented but a standard edge exists")
        if g.swap and g.edge_kind is not EdgeKind.STANDARD:
            problems.append(f"gate {pos} {g!r}: swap on a non-standard edge")
    return problems
