import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epr_route.circuit import Circuit, Gate, GateKind, cx, g1
from epr_route.generators import dj, qft
from epr_route.lowering import expand_block
from epr_route.qasm import EmitError, QasmError, emit_qasm, load_qasm, parse_qasm
from oracles import random_circuit

DATA = Path(__file__).parent / "data"
HDR = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'


def test_single_cx():
    c = parse_qasm(HDR + "qreg q[2]; cx q[0],q[1];")
    assert c.n_qubits == 2 and c.gates == (cx(0, 1),)


def test_feedforward_mapping():
    c = parse_qasm(HDR + "qreg q[1]; creg c[1]; h q[0]; measure q[0]->c[0]; if(c==1) x q[0];")
    assert c.gates == (g1("h", 0), Gate(GateKind.MEASURE, (0,), clbits=(0,)),
                       Gate(GateKind.X, (0,), condition=(0, 1)))


def test_registers_flattened_in_declaration_order():
    c = load_qasm(DATA / "multi_register.qasm")
    assert c.n_qubits == 5
    assert c.gates[0] == g1("h", 0) and c.gates[1] == g1("h", 1)
    assert c.gates[2] == cx(0, 2)
    assert c.gates[4].params == pytest.approx((-math.pi / 2, 0.25 * math.pi, 3 * math.pi / 8 - 1))
    barrier = c.gates[6]
    assert barrier.kind is GateKind.BARRIER and barrier.qubits == (0, 1, 3)
    assert c.gates[8].params == pytest.approx((-math.pi / 3,))
    assert c.gates[9].params == pytest.approx((2 ** 0.5,))


def test_uppercase_aliases():
    c = parse_qasm(HDR + "qreg q[2]; U(0,0,pi) q[0]; CX q[0],q[1];")
    assert c.gates[0].kind is GateKind.U3 and c.gates[1] == cx(0, 1)


@pytest.mark.parametrize("src,needle", [
    ("qreg q[1]; ccx q[0],q[0],q[0];", "unsupported gate"),
    ("qreg q[2]; cx q[0];", ""),
    ("qreg q[1]; h r[0];", "r"),
    ("qreg q[1]; rz(pi*) q[0];", ""),
    ("qreg q[1]; h q[3];", ""),
    ("qreg q[1]; gate foo a { h a; }", ""),
    ("qreg q[1]; creg c[2]; if(c==1) x q[0];", ""),
    ("qreg q[1]; creg c[1]; if(c==1) h q[0];", ""),
])
def test_errors_carry_location(src, needle):
    with pytest.raises(QasmError) as ei:
        parse_qasm(HDR + src)
    assert ei.value.line is not None and ei.value.col is not None
    assert needle in str(ei.value)
    assert f"line {ei.value.line}, column {ei.value.col}" in str(ei.value)


def test_version_checked():
    with pytest.raises(QasmError, match="version"):
        parse_qasm('OPENQASM 3.0;\nqreg q[1];')


def test_emit_single_cx():
    text = emit_qasm(Circuit(2, (cx(0, 1),)))
    assert text.count("cx q[0],q[1];") == 1
    assert text.count("qreg") == 1


def test_emit_expanded_block():
    c = Circuit(4, tuple(expand_block(0, 3, 1, 2, 0, 1, block_id=0)), n_clbits=2)
    body = [ln for ln in emit_qasm(c).splitlines() if not ln.startswith(("OPENQASM", "include",
                                                                         "qreg", "creg"))]
    assert sum(ln.startswith("cx ") for ln in body) == 2
    assert sum(ln.startswith("h ") for ln in body) == 1
    assert sum(ln.startswith("measure ") for ln in body) == 2
    assert sum(ln.startswith("if(") and ") x " in ln for ln in body) == 1
    assert sum(ln.startswith("if(") and ") z " in ln for ln in body) == 1


def test_emit_rejects_composite():
    with pytest.raises(EmitError, match="composite gate not emittable"):
        emit_qasm(Circuit(2, (Gate(GateKind.REMOTE_CX, (0, 1)),)))


def test_emit_deterministic():
    assert emit_qasm(qft(6)) == emit_qasm(qft(6))


def test_angles_exact_through_roundtrip():
    c = Circuit(1, (g1(GateKind.RZ, 0, 0.1 + 0.2), g1(GateKind.U3, 0, math.pi, -1e-300, 1 / 3)))
    assert parse_qasm(emit_qasm(c)).gates == c.gates


def test_header_is_comment():
    text = emit_qasm(qft(2), header="line one\nline two")
    assert text.startswith("// line one\n// line two\nOPENQASM 2.0;")
    assert parse_qasm(text).gates == qft(2).gates


CORPUS = sorted(DATA.glob("*.qasm"))


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.name)
def test_roundtrip_ingested(path):
    first = load_qasm(path)
    assert parse_qasm(emit_qasm(first)) == first


@pytest.mark.parametrize("circuit", [qft(n) for n in range(2, 13)] + [dj(n) for n in range(2, 13)],
                         ids=lambda c: c.name)
def test_roundtrip_generated(circuit):
    first = parse_qasm(emit_qasm(circuit))
    assert first == circuit
    assert parse_qasm(emit_qasm(first)) == first


@st.composite
def feedforward_circuits(draw):
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    n = draw(st.integers(1, 5))
    base = random_circuit(rng, n, draw(st.integers(0, 20)), cx_fraction=0.3 if n > 1 else 0)
    gates = list(base.gates)
    n_cl = draw(st.integers(0, 3))
    for c in range(n_cl):
        pos = draw(st.integers(0, len(gates)))
        q = draw(st.integers(0, n - 1))
        gates.insert(pos, Gate(GateKind.MEASURE, (q,), clbits=(c,)))
        if draw(st.booleans()):
            kind = draw(st.sampled_from([GateKind.X, GateKind.Z]))
            gates.insert(pos + 1, Gate(kind, (draw(st.integers(0, n - 1)),),
                                       condition=(c, draw(st.integers(0, 1)))))
    if draw(st.booleans()):
        gates.append(Gate(GateKind.RESET, (0,)))
    return Circuit(n, tuple(gates), n_clbits=n_cl)


@settings(max_examples=150, deadline=None)
@given(feedforward_circuits())
def test_roundtrip_property(c):
    once = parse_qasm(emit_qasm(c))
    assert once == c
    assert parse_qasm(emit_qasm(once)) == once
