"""QFT and Deutsch-Jozsa benchmark circuits over the 1q + CX gate set."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

from .circuit import Circuit, Gate, GateKind, cx, g1


@dataclass(frozen=True)
class BenchmarkSpec:
    family: str  # "qft", "dj" or "external"
    n_qubits: int = 0
    path: str | None = None

    @property
    def name(self) -> str:
        if self.family == "external":
            return Path(self.path).stem
        return f"{self.family}{self.n_qubits}"

    def build(self) -> Circuit:
        if self.family == "qft":
            return qft(self.n_qubits)
        if self.family == "dj":
            return dj(self.n_qubits)
        from .qasm import load_qasm

        return load_qasm(self.path)


GENERATORS = {"qft", "dj"}


def parse_gen_spec(text: str) -> list[BenchmarkSpec]:
    """``qft:5`` or a range ``qft:4..12`` (inclusive)."""
    m = re.fullmatch(r"\s*([a-zA-Z]+)\s*:\s*(\d+)(?:\s*\.\.\s*(\d+))?\s*", text)
    if not m or m.group(1).lower() not in GENERATORS:
        raise ValueError(f"bad generator spec {text!r}; expected FAMILY:N or FAMILY:N..M "
                         f"with FAMILY in {sorted(GENERATORS)}")
    fam = m.group(1).lower()
    lo = int(m.group(2))
    hi = int(m.group(3)) if m.group(3) else lo
    if hi < lo:
        raise ValueError(f"empty range in {text!r}")
    return [BenchmarkSpec(fam, n) for n in range(lo, hi + 1)]


def controlled_phase(theta: float, ctrl: int, tgt: int) -> list[Gate]:
    """CP(theta) up to global phase, as RZ/CX."""
    return [g1(GateKind.RZ, ctrl, theta / 2), cx(ctrl, tgt), g1(GateKind.RZ, tgt, -theta / 2),
            cx(ctrl, tgt), g1(GateKind.RZ, tgt, theta / 2)]


def qft(n: int) -> Circuit:
    """QFT without the final qubit-reversal swaps (outputs come out bit-reversed)."""
    if n < 2:
        raise ValueError("qft needs n >= 2")
    gates: list[Gate] = []
    for k in range(n):
        gates.append(g1(GateKind.H, k))
        for j in range(k + 1, n):
            gates += controlled_phase(math.pi / 2 ** (j - k), k, j)
    return Circuit(n, tuple(gates), name=f"qft{n}",
                   metadata=(("family", "qft"), ("bit_reversal", "omitted")))


def dj(n: int) -> Circuit:
    """Deutsch-Jozsa on n-1 query qubits with the all-ones balanced oracle."""
    if n < 2:
        raise ValueError("dj needs n >= 2")
    anc = n - 1
    gates = [g1(GateKind.X, anc)]
    gates += [g1(GateKind.H, q) for q in range(n)]
    gates += [cx(q, anc) for q in range(n - 1)]
    gates += [g1(GateKind.H, q) for q in range(n - 1)]
    return Circuit(n, tuple(gates), name=f"dj{n}",
                   metadata=(("family", "dj"), ("oracle", "balanced-parity")))
