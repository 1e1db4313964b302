"""OpenQASM 2.0 subset reader and writer.

Accepted grammar:

    OPENQASM 2.0;
    include "qelib1.inc";
    qreg <id>[<int>];
    u3(<expr>,<expr>,<expr>) <id>[<int>];
    cx <id>[<int>],<id>[<int>];

where <expr> is a floating literal optionally combined with `pi`, `*`, `/`,
`+`, `-` and unary minus. `//` comments run to end of line. u3 statements
become variable gates, cx statements fixed CNOT gates.
"""

from __future__ import annotations

from dataclasses import dataclass
import math
import operator

import numpy as np
import pyparsing as pp

from .circuit import Circuit, Gate, cnot_matrix, zyz_reparameterize
from .exceptions import QasmBoundsError, QasmParseError, UnsupportedExportError

_BINARY_OPS = {
    "*": operator.mul,
    "/": operator.truediv,
    "+": operator.add,
    "-": operator.sub,
}

_U3_PARAMS = 3


def _eval_unary(tokens: pp.ParseResults) -> float:
    sign, value = tokens[0]
    return -value if sign == "-" else value


def _eval_binary(source: str, loc: int, tokens: pp.ParseResults) -> float:
    items = tokens[0]
    value = items[0]
    for op, rhs in zip(items[1::2], items[2::2], strict=True):
        try:
            value = _BINARY_OPS[op](value, rhs)
        except ArithmeticError as e:
            raise pp.ParseFatalException(source, loc, f"bad parameter: {e}") from None
    return value


@dataclass(frozen=True)
class _Qubit:
    register: str
    index: int


@dataclass(frozen=True)
class _Statement:
    name: str
    params: tuple[float, ...] | None
    qubits: tuple[_Qubit, ...]
    line: int


def _build_grammar() -> pp.ParserElement:
    lpar, rpar, lbra, rbra, semi = map(pp.Suppress, "()[];")
    ident = pp.Word(pp.alphas + "_", pp.alphanums + "_")
    integer = pp.Word(pp.nums).set_parse_action(lambda t: int(t[0]))

    number = pp.Regex(r"(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?")
    number.set_parse_action(lambda t: float(t[0]))
    pi = pp.Keyword("pi").set_parse_action(lambda: math.pi)
    expr = pp.infix_notation(
        number | pi,
        [
            (pp.Literal("-"), 1, pp.OpAssoc.RIGHT, _eval_unary),
            (pp.one_of("* /"), 2, pp.OpAssoc.LEFT, _eval_binary),
            (pp.one_of("+ -"), 2, pp.OpAssoc.LEFT, _eval_binary),
        ],
    )

    qubit = (ident + lbra + integer + rbra).set_parse_action(
        lambda t: _Qubit(str(t[0]), int(t[1]))
    )
    params = pp.Group(lpar + pp.Optional(pp.DelimitedList(expr)) + rpar)
    gate_name = ~pp.Keyword("qreg") + ident
    statement = gate_name + pp.Optional(params) + pp.Group(
        pp.DelimitedList(qubit)
    ) + semi

    def make_statement(source: str, loc: int, toks: pp.ParseResults) -> _Statement:
        name = str(toks[0])
        has_params = len(toks) == 3
        values = tuple(toks[1]) if has_params else None
        qubits = tuple(toks[-1])
        return _Statement(name, values, qubits, pp.lineno(loc, source))

    statement.set_parse_action(make_statement)

    header = pp.Suppress(pp.Keyword("OPENQASM") + pp.Literal("2.0") + semi)
    include = pp.Suppress(pp.Keyword("include") + pp.QuotedString('"') + semi)
    qreg = pp.Group(
        pp.Suppress(pp.Keyword("qreg")) + ident + lbra + integer + rbra + semi
    )("qreg")
    program = (
        header
        + pp.Optional(include)
        + qreg
        + pp.Group(pp.ZeroOrMore(statement))("body")
        + pp.StringEnd()
    )
    program.ignore(pp.cpp_style_comment)
    return program


_GRAMMAR = _build_grammar()


def parse_qasm(text: str) -> Circuit:
    """Parse an OpenQASM 2.0 u3/cx program into a Circuit.

    Args:
        text: QASM source.

    Returns:
        Circuit with gates in source order.

    Raises:
        QasmParseError: On syntax errors, unknown gates or bad parameter lists.
        QasmBoundsError: If a qubit index is outside the register.
    """
    try:
        parsed = _GRAMMAR.parse_string(text, parse_all=True)
    except pp.ParseBaseException as e:
        raise QasmParseError(f"syntax error: {e.msg}", line=e.lineno) from None

    reg_name, size = parsed["qreg"][0], parsed["qreg"][1]
    if size < 1:
        raise QasmParseError("register must hold at least one qubit")
    gates = [_to_gate(stmt, str(reg_name), int(size)) for stmt in parsed["body"]]
    return Circuit(int(size), tuple(gates))


def _to_gate(stmt: _Statement, reg_name: str, size: int) -> Gate:
    for qubit in stmt.qubits:
        if qubit.register != reg_name:
            raise QasmParseError(f"unknown register '{qubit.register}'", stmt.line)
        if qubit.index >= size:
            raise QasmBoundsError(
                f"qubit index {qubit.index} outside register of size {size}",
                stmt.line,
            )

    if stmt.name == "u3":
        if stmt.params is None or len(stmt.params) != _U3_PARAMS:
            raise QasmParseError("u3 takes exactly three parameters", stmt.line)
        if len(stmt.qubits) != 1:
            raise QasmParseError("u3 acts on exactly one qubit", stmt.line)
        if not all(math.isfinite(p) for p in stmt.params):
            raise QasmParseError("u3 parameters must be finite", stmt.line)
        theta, phi, lam = stmt.params
        return Gate.u3(stmt.qubits[0].index, theta, phi, lam)

    if stmt.name == "cx":
        if stmt.params is not None:
            raise QasmParseError("cx takes no parameters", stmt.line)
        if len(stmt.qubits) != 2:
            raise QasmParseError("cx acts on exactly two qubits", stmt.line)
        control, target = (q.index for q in stmt.qubits)
        if control == target:
            raise QasmParseError("cx control and target must differ", stmt.line)
        return Gate.cx(control, target)

    raise QasmParseError(f"unknown gate '{stmt.name}'", stmt.line)


def _format_angle(value: float) -> str:
    return repr(float(value))


def write_qasm(circuit: Circuit, register: str = "q") -> str:
    """Serialize a circuit of single-qubit gates and CNOTs.

    Variable single-qubit gates are re-parameterized as u3; the dropped
    global phase is recorded in a trailing comment. Fixed gates must be CNOTs,
    so that parsing the output restores every gate kind.

    Raises:
        UnsupportedExportError: For multi-qubit variable gates and for fixed
            gates that are not CNOT.
    """
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg {register}[{circuit.n}];"]
    for index, gate in enumerate(circuit.gates):
        lines.append(_write_gate(gate, index, register))
    return "\n".join(lines) + "\n"


def _write_gate(gate: Gate, index: int, register: str) -> str:
    if gate.arity == 1 and gate.is_variable:
        theta, phi, lam, gamma = zyz_reparameterize(gate.unitary)
        angles = ",".join(_format_angle(a) for a in (theta, phi, lam))
        qubit = gate.location[0]
        return f"u3({angles}) {register}[{qubit}]; // phase {_format_angle(gamma)}"

    if gate.arity == 2 and not gate.is_variable:
        low, high = gate.location
        if np.allclose(gate.unitary, cnot_matrix(control_is_low=True), atol=1e-12):
            return f"cx {register}[{low}],{register}[{high}];"
        if np.allclose(gate.unitary, cnot_matrix(control_is_low=False), atol=1e-12):
            return f"cx {register}[{high}],{register}[{low}];"

    kind = "variable" if gate.is_variable else "fixed"
    raise UnsupportedExportError(
        f"gate {index} ({kind}, {gate.arity} qubits on {gate.location}) "
        "has no u3/cx form"
    )
