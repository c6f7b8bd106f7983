"""Square-grid devices with border EPR ancillas and their augmented graphs.

Physical qubits are numbered row-major on a ``side x side`` grid. Ancillas sit
on the border at odd offsets (never corners); the two ancillas at the ends
of the same row or column share an EPR pair. The augmented graph drops the
ancillas and links every data qubit next to one half of a pair with every
data qubit next to the other half.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .circuit import EdgeKind


class DeviceError(ValueError):
    pass


class Role(Enum):
    DATA = "data"
    ANCILLA = "ancilla"


@dataclass(frozen=True)
class Device:
    side: int
    roles: tuple[Role, ...]
    epr_pairs: tuple[tuple[int, int], ...] = ()
    fidelity_standard: float = 0.9
    fidelity_augmented: float = 0.8

    def __post_init__(self):
        object.__setattr__(self, "roles", tuple(Role(r) for r in self.roles))
        object.__setattr__(self, "epr_pairs",
                           tuple(tuple(sorted(map(int, p))) for p in self.epr_pairs))
        self.validate()

    @property
    def n_qubits(self) -> int:
        return self.side * self.side

    @property
    def data_nodes(self) -> list[int]:
        return [i for i, r in enumerate(self.roles) if r is Role.DATA]

    @property
    def ancillas(self) -> list[int]:
        return [i for i, r in enumerate(self.roles) if r is Role.ANCILLA]

    def coords(self, node: int) -> tuple[int, int]:
        return divmod(node, self.side)

    def neighbors(self, node: int) -> list[int]:
        r, c = self.coords(node)
        k = self.side
        out = []
        for dr, dc in ((-1, 0), (0, -1), (0, 1), (1, 0)):
            rr, cc = r + dr, c + dc
            if 0 <= rr < k and 0 <= cc < k:
                out.append(rr * k + cc)
        return out

    def standard_edges(self) -> list[tuple[int, int]]:
        """All 4-neighbour grid adjacencies, ancilla-incident ones included."""
        return sorted({(min(u, v), max(u, v)) for u in range(self.n_qubits)
                       for v in self.neighbors(u)})

    def validate(self) -> None:
        k = self.side
        if k < 1:
            raise DeviceError("grid side must be positive")
        if len(self.roles) != k * k:
            raise DeviceError(f"expected {k * k} roles, got {len(self.roles)}")
        for f in (self.fidelity_standard, self.fidelity_augmented):
            if not 0.0 < f < 1.0:
                raise DeviceError(f"fidelity {f} outside (0, 1)")
        members: dict[int, int] = {}
        corners = {0, k - 1, k * (k - 1), k * k - 1}
        for pid, (a, b) in enumerate(self.epr_pairs):
            for x in (a, b):
                if not 0 <= x < k * k:
                    raise DeviceError(f"EPR pair {pid} node {x} off the grid")
                if x in members:
                    raise DeviceError(f"ancilla {x} belongs to more than one EPR pair")
                members[x] = pid
                if self.roles[x] is not Role.ANCILLA:
                    raise DeviceError(f"EPR pair {pid} uses data node {x}")
                r, c = self.coords(x)
                if x in corners or not (r in (0, k - 1) or c in (0, k - 1)):
                    raise DeviceError(f"ancilla {x} is not on a non-corner border site")
            (ra, ca), (rb, cb) = self.coords(a), self.coords(b)
            vertical = ca == cb and {ra, rb} == {0, k - 1}
            horizontal = ra == rb and {ca, cb} == {0, k - 1}
            if not (vertical or horizontal):
                raise DeviceError(f"EPR pair ({a},{b}) is not at the two ends of a row or column")
        for x in self.ancillas:
            if x not in members:
                raise DeviceError(f"ancilla {x} has no EPR partner")

    def to_json(self) -> dict:
        return {
            "side": self.side,
            "roles": [r.value for r in self.roles],
            "epr_pairs": [list(p) for p in self.epr_pairs],
            "fidelity_standard": self.fidelity_standard,
            "fidelity_augmented": self.fidelity_augmented,
        }

    @classmethod
    def from_json(cls, obj: dict | str) -> "Device":
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            return cls(int(obj["side"]), tuple(obj["roles"]),
                       tuple(tuple(p) for p in obj.get("epr_pairs", ())),
                       float(obj.get("fidelity_standard", 0.9)),
                       float(obj.get("fidelity_augmented", 0.8)))
        except (KeyError, TypeError, ValueError) as e:
            raise DeviceError(f"invalid device JSON: {e}") from e

    def with_fidelities(self, standard: float, augmented: float) -> "Device":
        return Device(self.side, self.roles, self.epr_pairs, standard, augmented)


def data_count(side: int) -> int:
    return side * side - 4 * ((side - 1) // 2)


def grid_device(side: int, fidelity_standard: float = 0.9,
                fidelity_augmented: float = 0.8) -> Device:
    """``side x side`` grid with ancilla pairs at every odd border offset."""
    k = side
    roles = [Role.DATA] * (k * k)
    pairs = []
    for j in range(1, k - 1, 2):
        pairs.append((j, (k - 1) * k + j))        # top/bottom ends of column j
        pairs.append((j * k, j * k + k - 1))      # left/right ends of row j
    for a, b in pairs:
        roles[a] = roles[b] = Role.ANCILLA
    return Device(k, tuple(roles), tuple(sorted(pairs)), fidelity_standard, fidelity_augmented)


def plain_grid(side: int, fidelity_standard: float = 0.9) -> Device:
    """Grid with every node a data qubit (the swap-only baseline)."""
    return Device(side, (Role.DATA,) * (side * side), (), fidelity_standard, 0.8)


def build_grid_device(min_data_qubits: int, fidelity_standard: float = 0.9,
                      fidelity_augmented: float = 0.8) -> Device:
    """Smallest grid (side >= 2) with at least ``min_data_qubits`` data nodes."""
    if min_data_qubits < 1:
        raise DeviceError("min_data_qubits must be >= 1")
    k = 2
    while data_count(k) < min_data_qubits:
        k += 1
    return grid_device(k, fidelity_standard, fidelity_augmented)


def routable_grid_device(n_qubits: int, fidelity_standard: float = 0.9,
                         fidelity_augmented: float = 0.8) -> Device:
    """Smallest grid whose routable data nodes can hold ``n_qubits``.

    Border corners flanked by two ancillas have no STANDARD edge, so a qubit
    placed there could never be swapped; compilation sizes devices by the
    routable node count instead of the raw data count.
    """
    if n_qubits < 1:
        raise DeviceError("n_qubits must be >= 1")
    k = 2
    while True:
        dev = grid_device(k, fidelity_standard, fidelity_augmented)
        if data_count(k) >= n_qubits and len(augment(dev).routable_nodes()) >= n_qubits:
            return dev
        k += 1


@dataclass(frozen=True)
class Edge:
    kind: EdgeKind
    u: int
    v: int
    weight: float
    serving_pairs: frozenset[int] = frozenset()


@dataclass(frozen=True)
class AugmentedGraph:
    """Routable graph over data nodes.

    ``edges`` maps each unordered pair ``(u, v)`` with ``u < v`` to a list of
    edges (one per kind present). ``n_physical`` is the size of the full
    physical index space so matrices can be indexed by physical node.
    """

    n_physical: int
    nodes: tuple[int, ...]
    edges: dict[tuple[int, int], tuple[Edge, ...]] = field(hash=False)

    def edge(self, u: int, v: int, kind: EdgeKind | None = None) -> Edge | None:
        es = self.edges.get((min(u, v), max(u, v)), ())
        for e in es:
            if kind is None or e.kind is kind:
                return e
        return None

    def shared_kind(self, u: int, v: int) -> EdgeKind | None:
        """STANDARD if that edge exists, else AUGMENTED if that exists, else None."""
        if self.edge(u, v, EdgeKind.STANDARD) is not None:
            return EdgeKind.STANDARD
        if self.edge(u, v, EdgeKind.AUGMENTED) is not None:
            return EdgeKind.AUGMENTED
        return None

    def edge_list(self, kind: EdgeKind | None = None) -> list[Edge]:
        return [e for key in sorted(self.edges) for e in self.edges[key]
                if kind is None or e.kind is kind]

    def standard_neighbors(self) -> dict[int, list[int]]:
        nbrs: dict[int, list[int]] = {u: [] for u in self.nodes}
        for e in self.edge_list(EdgeKind.STANDARD):
            nbrs[e.u].append(e.v)
            nbrs[e.v].append(e.u)
        return {u: sorted(vs) for u, vs in nbrs.items()}

    def routable_nodes(self) -> list[int]:
        """Data nodes a router can place virtual qubits on.

        Swaps only travel along STANDARD edges, so qubits must sit in one
        STANDARD-connected component (the largest, lowest node on ties).
        When every pair of data nodes is already adjacent, no swap is ever
        needed and all data nodes qualify.
        """
        n = len(self.nodes)
        if n * (n - 1) // 2 == len(self.edges):
            return list(self.nodes)
        nbrs = self.standard_neighbors()
        seen: set[int] = set()
        best: list[int] = []
        for s in self.nodes:
            if s in seen:
                continue
            comp, stack = [], [s]
            seen.add(s)
            while stack:
                u = stack.pop()
                comp.append(u)
                for v in nbrs[u]:
                    if v not in seen:
                        seen.add(v)
                        stack.append(v)
            if len(comp) > len(best):
                best = comp
        return sorted(best)

    def to_dot(self, device: Device | None = None) -> str:
        lines = ["graph augmented {", "  node [shape=circle];"]
        for u in self.nodes:
            lines.append(f'  q{u} [label="q{u}"];')
        if device is not None:
            for a in device.ancillas:
                lines.append(f'  q{a} [label="q{a}", style=filled, fillcolor=palegreen, '
                             'color=gray];')
            for a, b in device.epr_pairs:
                lines.append(f"  q{a} -- q{b} [style=dotted, color=gray];")
        for e in self.edge_list():
            if e.kind is EdgeKind.STANDARD:
                lines.append(f'  q{e.u} -- q{e.v} [weight="{e.weight:.6g}"];')
            else:
                pairs = ",".join(str(p) for p in sorted(e.serving_pairs))
                lines.append(f'  q{e.u} -- q{e.v} [color=green, penwidth=2, '
                             f'weight="{e.weight:.6g}", pairs="{pairs}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def fidelity_weight(fidelity: float) -> float:
    """Edge weight ``1 - fidelity``, rounded so 0.9 maps to exactly 0.1."""
    return round(1.0 - fidelity, 12)


def augment(device: Device) -> AugmentedGraph:
    data = set(device.data_nodes)
    w_std = fidelity_weight(device.fidelity_standard)
    w_aug = fidelity_weight(device.fidelity_augmented)
    edges: dict[tuple[int, int], list[Edge]] = {}
    for u, v in device.standard_edges():
        if u in data and v in data:
            edges[(u, v)] = [Edge(EdgeKind.STANDARD, u, v, w_std)]
    serving: dict[tuple[int, int], set[int]] = {}
    for pid, (a, b) in enumerate(device.epr_pairs):
        near_a = [x for x in device.neighbors(a) if x in data]
        near_b = [x for x in device.neighbors(b) if x in data]
        for x in near_a:
            for y in near_b:
                if x != y:
                    serving.setdefault((min(x, y), max(x, y)), set()).add(pid)
    for key in sorted(serving):
        edges.setdefault(key, []).append(
            Edge(EdgeKind.AUGMENTED, key[0], key[1], w_aug, frozenset(serving[key])))
    return AugmentedGraph(device.n_qubits, tuple(sorted(data)),
                          {k: tuple(v) for k, v in sorted(edges.items())})


def graph_from_edges(n_physical: int, nodes, standard, augmented=(), w_std=0.1, w_aug=0.2):
    """Hand-built graph for experiments that are not grid devices."""
    edges: dict[tuple[int, int], list[Edge]] = {}
    for u, v in standard:
        u, v = min(u, v), max(u, v)
        edges.setdefault((u, v), []).append(Edge(EdgeKind.STANDARD, u, v, w_std))
    for u, v in augmented:
        u, v = min(u, v), max(u, v)
        edges.setdefault((u, v), []).append(Edge(EdgeKind.AUGMENTED, u, v, w_aug))
    return AugmentedGraph(n_physical, tuple(sorted(nodes)),
                          {k: tuple(v) for k, v in sorted(edges.items())})


@dataclass(frozen=True)
class DistanceMatrix:
    """All-pairs weighted distances indexed by physical node (inf off-graph)."""

    nodes: tuple[int, ...]
    dist: np.ndarray = field(compare=False)

    def __call__(self, u: int, v: int) -> float:
        return float(self.dist[u, v])

    def eccentricity(self, u: int, among=None) -> float:
        among = self.nodes if among is None else among
        return float(max(self.dist[u, v] for v in among))


def weighted_distances(graph: AugmentedGraph) -> DistanceMatrix:
    """All-pairs Dijkstra over the data nodes, rounded to 12 decimals like the
    edge weights so that path sums do not depend on addition order."""
    n = graph.n_physical
    rows, cols, vals = [], [], []
    for (u, v), es in graph.edges.items():
        w = min(e.weight for e in es)
        rows += [u, v]
        cols += [v, u]
        vals += [w, w]
    nodes = list(graph.nodes)
    idx = {u: i for i, u in enumerate(nodes)}
    m = len(nodes)
    # explicit zeros would vanish from the sparse matrix
    if any(v <= 0 for v in vals):
        raise DeviceError("edge weights must be positive (fidelity < 1)")
    adj = csr_matrix((vals, ([idx[r] for r in rows], [idx[c] for c in cols])), shape=(m, m))
    ncomp, labels = connected_components(adj, directed=False)
    if ncomp > 1:
        comps = [sorted(nodes[i] for i in range(m) if labels[i] == c) for c in range(ncomp)]
        raise DeviceError(f"data-node graph is disconnected; components: {comps}")
    sub = shortest_path(adj, method="D", directed=False)
    full = np.full((n, n), np.inf)
    # canonical 12-decimal values, independent of summation order
    full[np.ix_(nodes, nodes)] = np.round(sub, 12)
    return DistanceMatrix(tuple(nodes), full)
