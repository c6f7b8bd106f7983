import math
from itertools import combinations

import pytest

from epr_route.circuit import GateKind, cx, g1
from epr_route.generators import BenchmarkSpec, dj, parse_gen_spec, qft

SUPPORTED = {k for k in GateKind if k is not GateKind.REMOTE_CX}


def test_qft2_exact():
    assert list(qft(2).gates) == [
        g1("h", 0), g1(GateKind.RZ, 0, math.pi / 4), cx(0, 1),
        g1(GateKind.RZ, 1, -math.pi / 4), cx(0, 1), g1(GateKind.RZ, 1, math.pi / 4),
        g1("h", 1)]


@pytest.mark.parametrize("n", range(2, 21))
def test_qft_counts_and_complete_graph(n):
    c = qft(n)
    cxs = [g.qubits for g in c.gates if g.kind is GateKind.CX]
    assert len(cxs) == n * (n - 1)
    assert {tuple(sorted(p)) for p in cxs} == set(combinations(range(n), 2))
    assert c.meta["bit_reversal"] == "omitted"
    assert {g.kind for g in c.gates} <= SUPPORTED


def test_dj2_exact():
    assert list(dj(2).gates) == [g1("x", 1), g1("h", 0), g1("h", 1), cx(0, 1), g1("h", 0)]


@pytest.mark.parametrize("n", range(2, 21))
def test_dj_star(n):
    c = dj(n)
    cxs = [g.qubits for g in c.gates if g.kind is GateKind.CX]
    assert len(cxs) == n - 1
    assert all(t == n - 1 for _, t in cxs)
    assert sorted(q for q, _ in cxs) == list(range(n - 1))


def test_deterministic():
    assert qft(9) == qft(9) and dj(9) == dj(9)


@pytest.mark.parametrize("bad", [1, 0])
def test_small_sizes_rejected(bad):
    with pytest.raises(ValueError):
        qft(bad)
    with pytest.raises(ValueError):
        dj(bad)


def test_generator_string_parsing():
    assert [s.name for s in parse_gen_spec("qft:4..6")] == ["qft4", "qft5", "qft6"]
    assert parse_gen_spec("DJ:3") == [BenchmarkSpec("dj", 3)]
    for bad in ("ghz:4", "qft", "qft:6..4", "qft:x"):
        with pytest.raises(ValueError):
            parse_gen_spec(bad)


def test_external_benchmark_name(tmp_path):
    p = tmp_path / "gf_mult.qasm"
    p.write_text('OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[2];\ncx q[0],q[1];\n')
    spec = BenchmarkSpec("external", path=str(p))
    assert spec.name == "gf_mult" and spec.build().n_qubits == 2
