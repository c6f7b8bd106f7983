"""Qubit routing on square grids augmented with EPR-pair remote CX gates."""

__version__ = "0.1.0"

from .circuit import (Circuit, CircuitDag, CircuitError, DepthMode, EdgeKind, Gate, GateCounts,
                      GateKind, build_dag, depth, gate_counts)
from .device import (AugmentedGraph, Device, DeviceError, DistanceMatrix, Edge, Role, augment,
                     build_grid_device, grid_device, plain_grid, routable_grid_device,
                     weighted_distances)
from .generators import BenchmarkSpec, dj, parse_gen_spec, qft
from .lowering import RemoteCxBlock, expand_block, lower, lower_with_blocks
from .metrics import ComparisonReport, Schedule, compare, schedule
from .pipeline import Compilation, compile_both, compile_remote, compile_standard
from .qasm import QasmError, emit_qasm, load_qasm, parse_qasm
from .router import Layout, RoutedCircuit, RouterParams, RoutingError, initial_layout, route
from .verify import (EquivalenceResult, NotVerifiable, SimulationError, StateVector,
                     check_equivalence, simulate)

__all__ = [name for name in dir() if not name.startswith("_")]
