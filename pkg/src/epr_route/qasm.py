"""OpenQASM 2.0 subset: parse into a :class:`Circuit` and emit back.

Accepted statements: ``qreg``/``creg`` declarations, the gates
h x y z s sdg t tdg rx ry rz u1 u2 u3 cx (plus ``U``/``CX`` aliases),
``measure``, ``reset``, ``barrier`` and ``if(creg==k) x|z q[i];`` on
single-bit registers. ``include "qelib1.inc";`` is ignored; anything else
is rejected with a source location.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .circuit import Circuit, Gate, GateKind


class QasmError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


_GATES = {
    "h": GateKind.H, "x": GateKind.X, "y": GateKind.Y, "z": GateKind.Z,
    "s": GateKind.S, "sdg": GateKind.SDG, "t": GateKind.T, "tdg": GateKind.TDG,
    "rx": GateKind.RX, "ry": GateKind.RY, "rz": GateKind.RZ,
    "u1": GateKind.U1, "u2": GateKind.U2, "u3": GateKind.U3, "U": GateKind.U3,
    "cx": GateKind.CX, "CX": GateKind.CX,
}

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*)
  | (?P<real>(?:\d+\.\d*|\.\d+)(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+)
  | (?P<int>\d+)
  | (?P<string>"[^"\n]*")
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>==|->|[\[\](){};,+\-*/^])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise QasmError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            toks.append(Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    toks.append(Token("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.qregs: dict[str, tuple[int, int]] = {}  # name -> (offset, size)
        self.cregs: dict[str, tuple[int, int]] = {}
        self.nq = 0
        self.nc = 0
        self.gates: list[Gate] = []

    # -- token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        raise QasmError(msg, tok.line, tok.col)

    def next(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str | None = None, kind: str | None = None) -> Token:
        t = self.tok
        if (text is not None and t.text != text) or (kind is not None and t.kind != kind):
            want = repr(text) if text is not None else kind
            self.error(f"expected {want}, found {t.text or 'end of input'!r}")
        return self.next()

    def accept(self, text: str) -> bool:
        if self.tok.text == text and self.tok.kind != "string":
            self.i += 1
            return True
        return False

    # -- grammar
    def parse(self, name: str) -> Circuit:
        self.expect("OPENQASM")
        v = self.tok
        if v.kind not in ("real", "int") or float(v.text) != 2.0:
            self.error(f"unsupported OpenQASM version {v.text!r}; only 2.0 is accepted")
        self.next()
        self.expect(";")
        while self.tok.kind != "eof":
            self.statement()
        return Circuit(self.nq, tuple(self.gates), self.nc, name=name)

    def statement(self):
        t = self.tok
        if t.kind != "id":
            self.error(f"unexpected token {t.text!r}")
        word = t.text
        if word == "include":
            self.next()
            s = self.expect(kind="string")
            if s.text != '"qelib1.inc"':
                self.error(f"cannot include {s.text}; only qelib1.inc is recognised", s)
            self.expect(";")
        elif word in ("qreg", "creg"):
            self.next()
            self.declare(word)
        elif word == "measure":
            self.next()
            self.measure()
        elif word in ("reset", "barrier"):
            self.next()
            self.reset_or_barrier(word)
        elif word == "if":
            self.next()
            self.conditional()
        elif word in ("gate", "opaque"):
            self.error(f"'{word}' definitions are not supported; inline them first")
        else:
            self.application(None)

    def declare(self, kind: str):
        name_tok = self.expect(kind="id")
        name = name_tok.text
        if name in self.qregs or name in self.cregs:
            self.error(f"register {name!r} redeclared", name_tok)
        self.expect("[")
        size = int(self.expect(kind="int").text)
        if size < 1:
            self.error("register size must be positive")
        self.expect("]")
        self.expect(";")
        if kind == "qreg":
            self.qregs[name] = (self.nq, size)
            self.nq += size
        else:
            self.cregs[name] = (self.nc, size)
            self.nc += size

    def argument(self, regs: dict[str, tuple[int, int]], what: str) -> list[int]:
        name_tok = self.expect(kind="id")
        if name_tok.text not in regs:
            self.error(f"undeclared {what} register {name_tok.text!r}", name_tok)
        offset, size = regs[name_tok.text]
        if self.accept("["):
            idx_tok = self.expect(kind="int")
            idx = int(idx_tok.text)
            if idx >= size:
                self.error(f"index {idx} out of range for {name_tok.text}[{size}]", idx_tok)
            self.expect("]")
            return [offset + idx]
        return list(range(offset, offset + size))

    def measure(self):
        start = self.tok
        qs = self.argument(self.qregs, "quantum")
        self.expect("->")
        cs = self.argument(self.cregs, "classical")
        self.expect(";")
        if len(qs) != len(cs):
            self.error("measure register sizes differ", start)
        for q, c in zip(qs, cs):
            self.gates.append(Gate(GateKind.MEASURE, (q,), clbits=(c,)))

    def reset_or_barrier(self, word: str):
        args = [self.argument(self.qregs, "quantum")]
        while self.accept(","):
            args.append(self.argument(self.qregs, "quantum"))
        self.expect(";")
        flat = [q for a in args for q in a]
        if word == "barrier":
            if len(set(flat)) != len(flat):
                self.error("repeated qubit in barrier")
            self.gates.append(Gate(GateKind.BARRIER, tuple(flat)))
        else:
            self.gates.extend(Gate(GateKind.RESET, (q,)) for q in flat)

    def conditional(self):
        self.expect("(")
        reg_tok = self.expect(kind="id")
        if reg_tok.text not in self.cregs:
            self.error(f"undeclared classical register {reg_tok.text!r}", reg_tok)
        offset, size = self.cregs[reg_tok.text]
        if size != 1:
            self.error("conditions are only supported on 1-bit registers", reg_tok)
        self.expect("==")
        val_tok = self.expect(kind="int")
        value = int(val_tok.text)
        if value not in (0, 1):
            self.error("condition value must be 0 or 1", val_tok)
        self.expect(")")
        gate_tok = self.tok
        if gate_tok.text not in ("x", "z"):
            self.error(f"only x and z may be conditioned, found {gate_tok.text!r}")
        self.application((offset, value))

    def application(self, condition):
        name_tok = self.next()
        kind = _GATES.get(name_tok.text)
        if kind is None:
            self.error(f"unsupported gate {name_tok.text!r}", name_tok)
        params: list[float] = []
        if self.accept("("):
            if not self.accept(")"):
                params.append(self.expr())
                while self.accept(","):
                    params.append(self.expr())
                self.expect(")")
        if len(params) != kind.n_params:
            self.error(f"gate {name_tok.text!r} takes {kind.n_params} parameter(s), "
                       f"got {len(params)}", name_tok)
        args = [self.argument(self.qregs, "quantum")]
        while self.accept(","):
            args.append(self.argument(self.qregs, "quantum"))
        self.expect(";")
        arity = 2 if kind.is_two_qubit else 1
        if len(args) != arity:
            self.error(f"gate {name_tok.text!r} expects {arity} argument(s), got {len(args)}",
                       name_tok)
        width = {len(a) for a in args if len(a) > 1}
        if len(width) > 1:
            self.error("register arguments of different sizes", name_tok)
        n = width.pop() if width else 1
        for k in range(n):
            qs = tuple(a[k] if len(a) > 1 else a[0] for a in args)
            if len(set(qs)) != len(qs):
                self.error("repeated qubit in gate arguments", name_tok)
            self.gates.append(Gate(kind, qs, tuple(params), condition=condition))

    # expression grammar: sum := term (('+'|'-') term)*; term := unary (('*'|'/') unary)*
    # unary := '-' unary | power; power := atom ('^' unary)?
    def expr(self) -> float:
        v = self.term()
        while self.tok.text in ("+", "-"):
            op = self.next().text
            rhs = self.term()
            v = v + rhs if op == "+" else v - rhs
        return v

    def term(self) -> float:
        v = self.unary()
        while self.tok.text in ("*", "/"):
            op_tok = self.next()
            rhs = self.unary()
            if op_tok.text == "*":
                v = v * rhs
            else:
                if rhs == 0:
                    self.error("division by zero in expression", op_tok)
                v = v / rhs
        return v

    def unary(self) -> float:
        if self.accept("-"):
            return -self.unary()
        if self.accept("+"):
            return self.unary()
        v = self.atom()
        if self.accept("^"):
            v = v ** self.unary()
        return v

    def atom(self) -> float:
        t = self.tok
        if t.kind in ("real", "int"):
            self.next()
            return float(t.text)
        if t.text == "pi":
            self.next()
            return math.pi
        if self.accept("("):
            v = self.expr()
            self.expect(")")
            return v
        self.error(f"malformed expression at {t.text or 'end of input'!r}")


def parse_qasm(text: str, name: str = "circuit") -> Circuit:
    return _Parser(text).parse(name)


def load_qasm(path) -> Circuit:
    from pathlib import Path

    path = Path(path)
    return parse_qasm(path.read_text(encoding="utf-8"), name=path.stem)


class EmitError(ValueError):
    pass


def _fmt(x: float) -> str:
    return format(x, ".17g")


def _creg_layout(circuit: Circuit) -> tuple[list[tuple[str, int]], dict[int, tuple[str, int]]]:
    """Declare classical registers in clbit-index order.

    Each remote-block bit gets a one-bit register ``rcx<k>a`` / ``rcx<k>b``
    (QASM 2 conditions compare whole registers). Other bits share ``meas[m]``
    unless one of them drives a condition, in which case each gets its own
    one-bit ``c<i>`` register.
    """
    owner: dict[int, int] = {}
    conditioned = set()
    for g in circuit.gates:
        if g.block is not None:
            for c in g.clbits + ((g.condition[0],) if g.condition else ()):
                owner[c] = g.block
        elif g.condition is not None:
            conditioned.add(g.condition[0])
    plain = [c for c in range(circuit.n_clbits) if c not in owner]
    shared = bool(plain) and not conditioned and plain == list(range(len(plain)))

    regs: list[tuple[str, int]] = []
    where: dict[int, tuple[str, int]] = {}
    seen: dict[int, int] = {}
    for c in range(circuit.n_clbits):
        if c in owner:
            b = owner[c]
            j = seen.get(b, 0)
            seen[b] = j + 1
            name = f"rcx{b}" + ("ab"[j] if j < 2 else f"_{j}")
        elif shared:
            if c == 0:
                regs.append(("meas", len(plain)))
            where[c] = ("meas", c)
            continue
        else:
            name = f"c{c}"
        regs.append((name, 1))
        where[c] = (name, 0)
    return regs, where


def emit_qasm(circuit: Circuit, header: str | None = None) -> str:
    """Render ``circuit`` as OpenQASM 2.0 with one flat ``q`` register.

    ``header`` is written as leading ``//`` comment lines.
    """
    regs, where = _creg_layout(circuit)
    lines = []
    if header:
        lines += [f"// {h}" for h in header.splitlines()]
    lines += ["OPENQASM 2.0;", 'include "qelib1.inc";']
    if circuit.n_qubits:
        lines.append(f"qreg q[{circuit.n_qubits}];")
    lines += [f"creg {name}[{size}];" for name, size in regs]
    for pos, g in enumerate(circuit.gates):
        k = g.kind
        if k is GateKind.REMOTE_CX:
            raise EmitError(f"composite gate not emittable: REMOTE_CX at position {pos}; "
                            "lower it first")
        qs = ",".join(f"q[{q}]" for q in g.qubits)
        if k is GateKind.MEASURE:
            reg, idx = where[g.clbits[0]]
            stmt = f"measure q[{g.qubits[0]}] -> {reg}[{idx}];"
        elif k in (GateKind.RESET, GateKind.BARRIER):
            stmt = f"{k.value} {qs};"
        else:
            ps = "(" + ",".join(_fmt(p) for p in g.params) + ")" if g.params else ""
            stmt = f"{k.value}{ps} {qs};"
        if g.condition is not None:
            if k not in (GateKind.X, GateKind.Z):
                raise EmitError(f"only x/z may be conditioned (position {pos})")
            reg, _ = where[g.condition[0]]
            stmt = f"if({reg}=={g.condition[1]}) {stmt}"
        lines.append(stmt)
    return "\n".join(lines) + "\n"
