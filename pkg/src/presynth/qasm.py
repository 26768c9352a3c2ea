"""OpenQASM 2.0 subset import/export for named-gate circuits."""
from __future__ import annotations

import ast
import math
import re

from .circuit import Circuit, Gate
from .errors import ParseError, UnrepresentableGate

_NAMES = {
    "h": "H", "s": "S", "sdg": "Sdg", "t": "T", "tdg": "Tdg",
    "x": "X", "y": "Y", "z": "Z", "cx": "CX", "rz": "Rz", "rx": "Rx",
    "ry": "Ry", "u3": "U3", "u": "U3", "rxx": "Rxx", "rzz": "Rzz", "crx": "CRx",
}
_EMIT = {v: k for k, v in _NAMES.items() if k != "u"}

_STMT = re.compile(r"^([a-z_][a-z0-9_]*)\s*(?:\((.*)\))?\s+(.+)$", re.S)
_ARG = re.compile(r"^([a-z_][a-z0-9_]*)\s*\[\s*(\d+)\s*\]$")


def _eval_angle(expr: str, line: int, col: int) -> float:
    try:
        tree = ast.parse(expr.strip(), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"bad expression {expr!r}", line, col) from exc

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            a, b = ev(node.left), ev(node.right)
            ops = {ast.Add: a.__add__, ast.Sub: a.__sub__, ast.Mult: a.__mul__,
                   ast.Div: a.__truediv__, ast.Pow: a.__pow__}
            for t, f in ops.items():
                if isinstance(node.op, t):
                    return f(b)
        raise ParseError(f"unsupported expression {expr!r}", line, col)

    return ev(tree)


def _statements(text: str):
    """Yield (statement, line, col) split on ';' with comments removed."""
    clean = "\n".join(l.split("//", 1)[0] for l in text.splitlines())
    start = 0
    for m in re.finditer(";", clean):
        chunk = clean[start:m.start()]
        stripped = chunk.lstrip()
        off = start + len(chunk) - len(stripped)
        line = clean.count("\n", 0, off) + 1
        col = off - (clean.rfind("\n", 0, off) + 1) + 1
        if stripped.strip():
            yield stripped.strip(), line, col
        start = m.end()
    tail = clean[start:]
    if tail.strip():
        off = start + len(tail) - len(tail.lstrip())
        line = clean.count("\n", 0, off) + 1
        raise ParseError("missing ';'", line, 1)


def parse_qasm(text: str) -> Circuit:
    regs: dict[str, tuple[int, int]] = {}
    n = 0
    gates: list[Gate] = []
    for i, (stmt, line, col) in enumerate(_statements(text)):
        if stmt.upper().startswith("OPENQASM"):
            if i != 0 or not re.fullmatch(r"OPENQASM\s+2(\.0)?", stmt):
                raise ParseError(f"malformed header {stmt!r}", line, col)
            continue
        if stmt.startswith("include"):
            continue
        if stmt.startswith("qreg"):
            m = re.fullmatch(r"qreg\s+([a-z_][a-z0-9_]*)\s*\[\s*(\d+)\s*\]", stmt)
            if not m:
                raise ParseError(f"bad register declaration {stmt!r}", line, col)
            regs[m.group(1)] = (n, int(m.group(2)))
            n += int(m.group(2))
            continue
        if stmt.startswith("barrier"):
            continue
        m = _STMT.match(stmt)
        if not m:
            raise ParseError(f"cannot parse {stmt!r}", line, col)
        name, pstr, argstr = m.group(1), m.group(2), m.group(3)
        if name not in _NAMES:
            raise ParseError(f"unsupported gate {name!r}", line, col)
        params = [] if pstr is None else [_eval_angle(p, line, col) for p in pstr.split(",")]
        qubits = []
        for a in argstr.split(","):
            am = _ARG.match(a.strip())
            if not am or am.group(1) not in regs:
                raise ParseError(f"bad qubit argument {a.strip()!r}", line, col)
            off, size = regs[am.group(1)]
            k = int(am.group(2))
            if k >= size:
                raise ParseError(f"index {k} out of range for {am.group(1)}", line, col)
            qubits.append(off + k)
        try:
            gates.append(Gate(_NAMES[name], tuple(qubits), tuple(params)))
        except Exception as exc:
            raise ParseError(str(exc), line, col) from exc
    return Circuit(n, gates)


def emit_qasm(c: Circuit) -> str:
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{c.n_qubits}];"]
    for g in c.gates:
        if g.kind not in _EMIT:
            raise UnrepresentableGate(f"{g.kind} has no QASM name")
        p = "(" + ",".join(repr(x) for x in g.params) + ")" if g.params else ""
        args = ",".join(f"q[{q}]" for q in g.qubits)
        lines.append(f"{_EMIT[g.kind]}{p} {args};")
    return "\n".join(lines) + "\n"
