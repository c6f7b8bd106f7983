"""``epr-route`` command line: compile, bench, verify, gen, device.

Exit codes: 0 success/pass, 1 verification failure, 2 usage error,
3 pipeline error, 4 not verifiable at desk scale.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .circuit import DepthMode
from .device import Device, augment, build_grid_device, grid_device
from .generators import BenchmarkSpec, parse_gen_spec
from .lowering import retag_blocks
from .metrics import (ComparisonReport, compare, differences_to_csv, reports_to_csv,
                      reports_to_json, summarize)
from .pipeline import compile_remote, compile_standard
from .qasm import emit_qasm, load_qasm
from .router import Layout, RouterParams
from .verify import NotVerifiable, check_equivalence

log = logging.getLogger("epr_route")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_PIPELINE, EXIT_NOT_VERIFIABLE = 0, 1, 2, 3, 4


@dataclass
class RunConfig:
    command: str
    inputs: list[str] = field(default_factory=list)
    gens: list[str] = field(default_factory=list)
    mode: str = "both"
    lookahead: int = 20
    lookahead_weight: float = 0.5
    decay: float = 0.001
    fidelity_standard: float = 0.9
    fidelity_augmented: float = 0.8
    physical: bool = False
    depth_mode: str = "all"
    seed: int = 0
    trials: int = 20
    out: str = "out"
    device_json: str | None = None
    compiled: str | None = None
    version: str = __version__

    @property
    def router_params(self) -> RouterParams:
        return RouterParams(self.lookahead, self.lookahead_weight, self.decay)

    def header(self) -> str:
        return "epr-route config: " + json.dumps(asdict(self), sort_keys=True)

    def suite(self) -> list[BenchmarkSpec]:
        try:
            specs = [s for g in self.gens for s in parse_gen_spec(g)]
        except ValueError as e:
            raise UsageError(str(e)) from None
        specs += [BenchmarkSpec("external", path=p) for p in self.inputs]
        return specs

    def device(self) -> Device | None:
        if self.device_json is None:
            return None
        dev = Device.from_json(Path(self.device_json).read_text(encoding="utf-8"))
        return dev.with_fidelities(self.fidelity_standard, self.fidelity_augmented)


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    log.info("wrote %s", path)


def _compile_one(spec: BenchmarkSpec, cfg: RunConfig, out: Path) -> ComparisonReport | None:
    circuit = spec.build()
    depth_mode = DepthMode(cfg.depth_mode)
    header = cfg.header()
    params = cfg.router_params
    rem = std = None
    metrics = {"config": asdict(cfg), "name": circuit.name}
    device = cfg.device()
    if cfg.mode in ("remote", "both") or device is None:
        rem = compile_remote(circuit, params, device, cfg.physical, cfg.fidelity_standard,
                             cfg.fidelity_augmented, depth_mode)
        device = rem.device
    targets = []
    if cfg.mode in ("remote", "both"):
        targets.append(rem)
    if cfg.mode in ("standard", "both"):
        std = compile_standard(circuit, device.side, params, cfg.fidelity_standard, depth_mode)
        targets.append(std)
    for comp in targets:
        stem = f"{circuit.name}.{comp.mode}"
        _write(out / f"{stem}.qasm", emit_qasm(comp.output, header))
        _write(out / f"{stem}.layout.json", _dump({
            "config": asdict(cfg),
            "initial_layout": comp.routed.initial_layout.to_json(),
            "final_layout": comp.routed.final_layout.to_json(),
            "device": comp.device.to_json(),
        }))
        if comp.mode == "remote":
            _write(out / f"{stem}.blocks.json", _dump({
                "config": asdict(cfg),
                "blocks": {str(b.block_id): b.to_json() for b in comp.blocks},
            }))
        metrics[comp.mode] = comp.metrics(depth_mode)
    report = None
    if rem is not None and std is not None:
        report = compare(circuit, rem.output, rem.schedule, std.output, rem.device, depth_mode,
                         rem.routed.n_swaps, std.routed.n_swaps)
        metrics["comparison"] = asdict(report)
        _write(out / f"{circuit.name}.comparison.csv", reports_to_csv([report], header))
    _write(out / f"{circuit.name}.metrics.json", _dump(metrics))
    return report


def cmd_compile(cfg: RunConfig) -> int:
    suite = cfg.suite()
    if not suite:
        raise UsageError("compile needs --input or --gen")
    out = Path(cfg.out)
    for spec in suite:
        _compile_one(spec, cfg, out)
    return EXIT_OK


def cmd_bench(cfg: RunConfig) -> int:
    depth_mode = DepthMode(cfg.depth_mode)
    rows: list[ComparisonReport] = []
    families: dict[str, str] = {}
    device = cfg.device()
    for spec in cfg.suite():
        families[spec.name] = spec.family
        try:
            circuit = spec.build()
            rem = compile_remote(circuit, cfg.router_params, device, cfg.physical,
                                 cfg.fidelity_standard, cfg.fidelity_augmented, depth_mode)
            std = compile_standard(circuit, rem.device.side, cfg.router_params,
                                   cfg.fidelity_standard, depth_mode)
            rows.append(compare(circuit, rem.output, rem.schedule, std.output, rem.device,
                                depth_mode, rem.routed.n_swaps, std.routed.n_swaps))
        except Exception as e:  # noqa: BLE001 -- one bad benchmark must not stop the suite
            log.warning("benchmark %s failed: %s", spec.name, e)
            rows.append(ComparisonReport.failed(spec.name, f"{type(e).__name__}: {e}"))
    out = Path(cfg.out)
    header = cfg.header()
    _write(out / "report.csv", reports_to_csv(rows, header))
    _write(out / "report.json", reports_to_json(rows, asdict(cfg)))
    _write(out / "differences.csv", differences_to_csv(rows, families, header))
    summary = summarize(rows)
    _write(out / "summary.json", _dump({"config": asdict(cfg), "summary": summary}))
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


def _sibling(path: Path, suffix: str) -> Path:
    return path.with_name(path.name[:-len(".qasm")] + suffix if path.name.endswith(".qasm")
                          else path.name + suffix)


def cmd_verify(cfg: RunConfig) -> int:
    suite = cfg.suite()
    if len(suite) != 1 or not cfg.compiled:
        raise UsageError("verify needs exactly one source (--input or --gen) and --compiled")
    source = suite[0].build()
    compiled_path = Path(cfg.compiled)
    layout_path = _sibling(compiled_path, ".layout.json")
    blocks_path = _sibling(compiled_path, ".blocks.json")
    status = {"source": source.name, "compiled": str(compiled_path), "seed": cfg.seed,
              "trials": cfg.trials}
    try:
        compiled = load_qasm(compiled_path)
        lay = json.loads(layout_path.read_text(encoding="utf-8"))
        device = Device.from_json(lay["device"])
        if blocks_path.exists():
            compiled = retag_blocks(compiled, json.loads(blocks_path.read_text(encoding="utf-8")))
        result = check_equivalence(source, compiled, Layout(lay["initial_layout"]),
                                   Layout(lay["final_layout"]), cfg.trials, cfg.seed, device)
    except NotVerifiable as e:
        status.update(status="not verifiable at desk scale", reason=str(e))
        print(json.dumps(status, sort_keys=True))
        return EXIT_NOT_VERIFIABLE
    status.update(status="pass" if result.passed else "fail",
                  min_fidelity=result.min_fidelity, branches=result.branches)
    print(json.dumps(status, sort_keys=True))
    return EXIT_OK if result.passed else EXIT_FAIL


def cmd_gen(cfg: RunConfig) -> int:
    specs = cfg.suite()
    if not specs or cfg.inputs:
        raise UsageError("gen needs --gen FAMILY:N and no --input")
    for spec in specs:
        c = spec.build()
        _write(Path(cfg.out) / f"{c.name}.qasm", emit_qasm(c, cfg.header()))
    return EXIT_OK


def cmd_device(cfg: RunConfig, qubits: int | None, side: int | None) -> int:
    if cfg.device_json:
        dev = cfg.device()
    elif side is not None:
        dev = grid_device(side, cfg.fidelity_standard, cfg.fidelity_augmented)
    elif qubits is not None:
        dev = build_grid_device(qubits, cfg.fidelity_standard, cfg.fidelity_augmented)
    else:
        raise UsageError("device needs --qubits, --side or --device-json")
    graph = augment(dev)
    stem = f"device{dev.side}"
    _write(Path(cfg.out) / f"{stem}.json", _dump(dev.to_json()))
    _write(Path(cfg.out) / f"{stem}.dot",
           "// " + cfg.header() + "\n" + graph.to_dot(dev))
    print(json.dumps({"side": dev.side, "data_nodes": len(dev.data_nodes),
                      "epr_pairs": len(dev.epr_pairs),
                      "augmented_edges": len(graph.edge_list()) - sum(
                          1 for e in graph.edge_list() if e.kind.value == "standard")},
                     sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", action="append", default=[], metavar="PATH",
                        help="OpenQASM 2.0 source (repeatable)")
    common.add_argument("--gen", action="append", default=[], metavar="FAMILY:N",
                        help="generated benchmark, e.g. qft:5 or qft:4..12 (repeatable)")
    common.add_argument("--mode", choices=["remote", "standard", "both"], default="both")
    common.add_argument("--fidelity-standard", type=float, default=0.9)
    common.add_argument("--fidelity-augmented", type=float, default=0.8)
    common.add_argument("--lookahead", type=int, default=20)
    common.add_argument("--lookahead-weight", type=float, default=0.5)
    common.add_argument("--decay", type=float, default=0.001)
    common.add_argument("--physical", action="store_true",
                        help="emit EPR preparation gates before each remote block")
    common.add_argument("--depth-mode", choices=["all", "2q"], default="all")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default="out", metavar="DIR")
    common.add_argument("--device-json", metavar="PATH", help="override the generated device")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="epr-route",
                                description="Route circuits onto EPR-augmented square grids.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("compile", parents=[common], help="compile circuits")
    sub.add_parser("bench", parents=[common], help="remote vs standard comparison report")
    v = sub.add_parser("verify", parents=[common], help="check a compiled circuit")
    v.add_argument("--compiled", required=True, metavar="PATH")
    v.add_argument("--trials", type=int, default=20)
    sub.add_parser("gen", parents=[common], help="write generated benchmarks as QASM")
    d = sub.add_parser("device", parents=[common], help="export device JSON and DOT")
    d.add_argument("--qubits", type=int)
    d.add_argument("--side", type=int)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    cfg = RunConfig(
        command=args.command, inputs=args.input, gens=args.gen, mode=args.mode,
        lookahead=args.lookahead, lookahead_weight=args.lookahead_weight, decay=args.decay,
        fidelity_standard=args.fidelity_standard, fidelity_augmented=args.fidelity_augmented,
        physical=args.physical, depth_mode=args.depth_mode, seed=args.seed, out=args.out,
        device_json=args.device_json, trials=getattr(args, "trials", 20),
        compiled=getattr(args, "compiled", None),
    )
    try:
        if args.command == "compile":
            return cmd_compile(cfg)
        if args.command == "bench":
            return cmd_bench(cfg)
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "gen":
            return cmd_gen(cfg)
        return cmd_device(cfg, args.qubits, args.side)
    except UsageError as e:
        print(f"epr-route: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        if args.command in ("compile", "gen", "device", "verify"):
            print(f"epr-route: error: {e}", file=sys.stderr)
            return EXIT_PIPELINE
        raise
    except (RuntimeError, OSError, KeyError) as e:
        print(f"epr-route: error: {e}", file=sys.stderr)
        return EXIT_PIPELINE


if __name__ == "__main__":
    sys.exit(main())
