from collections import Counter

import pytest

from epr_route.circuit import Circuit, EdgeKind, GateKind, cx, g1, gate_counts
from epr_route.device import augment, grid_device, weighted_distances
from epr_route.generators import qft
from epr_route.lowering import (LoweringError, block_pairs, block_spans, expand_block,
                                lower, lower_with_blocks, retag_blocks)
from epr_route.pipeline import compile_remote
from epr_route.qasm import emit_qasm, parse_qasm
from epr_route.router import Layout, RoutedCircuit, route


def routed_on_5x5(circuit, v2p):
    dev = grid_device(5)
    g = augment(dev)
    r = route(circuit, g, weighted_distances(g), Layout(v2p))
    return dev, g, r


def multiset(gates):
    return Counter((x.kind, x.condition is not None) for x in gates)


BLOCK = Counter({(GateKind.CX, False): 2, (GateKind.H, False): 1, (GateKind.MEASURE, False): 2,
                 (GateKind.X, True): 1, (GateKind.Z, True): 1})
PREP = Counter({(GateKind.RESET, False): 2, (GateKind.H, False): 1, (GateKind.CX, False): 1})


def test_identity_without_augmented_tags():
    dev, g, r = routed_on_5x5(Circuit(2, (g1("h", 0), cx(0, 1))), (6, 7))
    out = lower(r, dev, g)
    assert out.gates == r.circuit.gates


def test_single_remote_uses_lowest_pair():
    dev, g, r = routed_on_5x5(Circuit(2, (cx(0, 1),)), (2, 22))
    out, blocks = lower_with_blocks(r, dev, g)
    assert len(blocks) == 1
    assert dev.epr_pairs[blocks[0].pair_id] == (1, 21)
    assert blocks[0].epr_pair == (1, 21)
    assert multiset(out.gates) == BLOCK
    assert out.n_clbits == 2


def test_physical_mode_adds_prep():
    dev, g, r = routed_on_5x5(Circuit(2, (cx(0, 1),)), (2, 22))
    out = lower(r, dev, g, physical=True)
    assert multiset(out.gates) == BLOCK + PREP
    assert out.meta["epr_prep"] == "emitted"
    assert lower(r, dev, g).meta["epr_prep"] == "assumed"


def test_least_loaded_assignment():
    dev, g, r = routed_on_5x5(Circuit(2, (cx(0, 1), cx(0, 1))), (2, 22))
    _, blocks = lower_with_blocks(r, dev, g)
    assert [dev.epr_pairs[b.pair_id] for b in blocks] == [(1, 21), (3, 23)]


def test_orientation_follows_control():
    dev, g, r = routed_on_5x5(Circuit(2, (cx(1, 0),)), (2, 22))
    out, blocks = lower_with_blocks(r, dev, g)
    b = blocks[0]
    assert (b.control, b.target) == (22, 2)
    assert b.epr_pair == (21, 1)
    assert out.gates[0].qubits == (22, 21) and out.gates[1].qubits == (1, 2)


def test_expansion_is_distance_independent():
    for c, t, a, b in [(0, 3, 1, 2), (10, 40, 11, 39)]:
        assert multiset(expand_block(c, t, a, b, 0, 1, 0)) == BLOCK
        assert multiset(expand_block(c, t, a, b, 0, 1, 0, physical=True)) == BLOCK + PREP


def test_clbits_fresh_per_block():
    dev, g, r = routed_on_5x5(Circuit(2, (cx(0, 1), cx(0, 1), cx(0, 1))), (2, 22))
    out, blocks = lower_with_blocks(r, dev, g)
    bits = [b.clbits for b in blocks]
    assert bits == [(0, 1), (2, 3), (4, 5)]
    assert gate_counts(out).remote_cx == 3


def test_lowering_rejects_missing_edge():
    dev = grid_device(5)
    g = augment(dev)
    bad = Circuit(25, (cx(6, 18, edge_kind=EdgeKind.AUGMENTED),))
    with pytest.raises(LoweringError):
        lower(RoutedCircuit(bad, Layout((6, 18)), Layout((6, 18))), dev, g)


@pytest.mark.parametrize("n", [5, 8, 12, 17])
@pytest.mark.parametrize("physical", [False, True])
def test_lowered_only_grid_adjacent(n, physical):
    comp = compile_remote(qft(n), physical=physical)
    dev = comp.device
    adjacent = {frozenset(e) for e in dev.standard_edges()}
    pairs = {frozenset(p) for p in dev.epr_pairs}
    assert all(x.edge_kind is not EdgeKind.AUGMENTED for x in comp.output.gates)
    for x in comp.output.gates:
        if x.kind.is_two_qubit and frozenset(x.qubits) not in adjacent:
            # the pair-preparation CX stands in for the entanglement source
            assert physical and x.block is not None and frozenset(x.qubits) in pairs, x
    spans = block_spans(comp.output)
    found = block_pairs(comp.output, dev)
    assert set(spans) == set(found) == {b.block_id for b in comp.blocks}
    want = BLOCK + PREP if physical else BLOCK
    for b in comp.blocks:
        assert multiset(comp.output.gates[i] for i in spans[b.block_id]) == want
        assert tuple(sorted(b.epr_pair)) == found[b.block_id]


def test_retag_restores_blocks_after_qasm():
    comp = compile_remote(qft(7))
    sidecar = {"blocks": {str(b.block_id): b.to_json() for b in comp.blocks}}
    parsed = parse_qasm(emit_qasm(comp.output))
    again = retag_blocks(parsed, sidecar)
    assert [x.block for x in again.gates] == [x.block for x in comp.output.gates]
    assert gate_counts(again).remote_cx == gate_counts(comp.output).remote_cx
