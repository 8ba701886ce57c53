"""
Line-oriented circuit description language.

::

    # two-source hybrid interferometer
    basis down up paths R L U D
    input down@R down@L
    hbs   down@R up@D
    phase R 0.0
    bs    L D
    pbs   transmit=down R U rphase=i
    qwp   R
    raman down@R up@U area=1.5707963267948966 phase=0.0

One statement per line, ``#`` starts a comment, keywords are case-sensitive.
The basis is ``spins x paths`` in spin-major order.
"""

from __future__ import annotations

import math
import re
from typing import Optional

from hyperhybrid.circuit import Circuit
from hyperhybrid.elements import (
    REFLECTION_PHASES,
    Custom,
    HybridBS,
    Phase,
    PolarizingBS,
    QuarterWave,
    Raman,
    StandardBS,
)
from hyperhybrid.errors import CircuitSemanticError, CircuitSyntaxError, HyperhybridError
from hyperhybrid.modes import Mode, Spin, product_basis

SPIN_TOKENS = ("down", "up")
_TOKEN = re.compile(r"\S+")
_PATH = re.compile(r"[!-~]+")


class _Token:
    __slots__ = ("text", "col")

    def __init__(self, text, col):
        self.text = text
        self.col = col


class _Parser:
    def __init__(self, text: str, filename: str):
        self.text = text
        self.filename = filename
        self.basis = None
        self.inputs = None
        self.elements = []
        self.line = 0

    def syntax(self, message, col):
        return CircuitSyntaxError(message, self.line, col, self.filename)

    def semantic(self, message, col):
        return CircuitSemanticError(message, self.line, col, self.filename)

    # -- token helpers --------------------------------------------------

    def spin(self, tok: _Token, text: Optional[str] = None, col: Optional[int] = None) -> Spin:
        text = tok.text if text is None else text
        if text not in SPIN_TOKENS:
            raise self.semantic(f"unknown spin {text!r}", tok.col if col is None else col)
        return Spin.parse(text)

    def path(self, tok: _Token, text: Optional[str] = None, col: Optional[int] = None) -> str:
        text = tok.text if text is None else text
        col = tok.col if col is None else col
        if not _PATH.fullmatch(text) or any(c in text for c in "@:,="):
            raise self.syntax(f"malformed path label {text!r}", col)
        if text not in self.basis.paths:
            raise self.semantic(f"unknown path {text!r}", col)
        return text

    def mode(self, tok: _Token) -> Mode:
        spin, sep, path = tok.text.partition("@")
        if not sep or not spin or not path:
            raise self.syntax(f"expected <spin>@<path>, got {tok.text!r}", tok.col)
        return Mode(self.spin(tok, spin), self.path(tok, path, tok.col + len(spin) + 1))

    def number(self, tok: _Token, text: str, col: int) -> float:
        try:
            value = float(text)
        except ValueError:
            raise self.syntax(f"expected a number, got {text!r}", col) from None
        if not math.isfinite(value):
            raise self.syntax(f"number must be finite, got {text!r}", col)
        return value

    def keyword_arg(self, tok: _Token, key: str) -> tuple:
        name, sep, value = tok.text.partition("=")
        if name != key or not sep:
            raise self.syntax(f"expected {key}=<value>, got {tok.text!r}", tok.col)
        return value, tok.col + len(key) + 1

    def arity(self, keyword: _Token, args, low, high=None):
        high = low if high is None else high
        if not low <= len(args) <= high:
            want = str(low) if low == high else f"{low} to {high}"
            col = args[high].col if len(args) > high else keyword.col + len(keyword.text)
            raise self.syntax(f"'{keyword.text}' takes {want} argument(s), got {len(args)}", col)

    # -- statements -----------------------------------------------------

    def parse(self) -> Circuit:
        for self.line, raw in enumerate(self.text.splitlines(), start=1):
            content = raw.split("#", 1)[0]
            tokens = [_Token(m.group(), m.start() + 1) for m in _TOKEN.finditer(content)]
            if tokens:
                self.statement(tokens[0], tokens[1:])
        self.line = max(self.line, 1)
        if self.basis is None:
            raise self.semantic("missing 'basis' statement", 1)
        if self.inputs is None:
            raise self.semantic("missing 'input' statement", 1)
        return Circuit(self.basis, self.inputs, tuple(self.elements))

    def statement(self, keyword: _Token, args):
        handler = getattr(self, f"stmt_{keyword.text}", None)
        if handler is None:
            raise self.syntax(f"unknown keyword {keyword.text!r}", keyword.col)
        if keyword.text != "basis" and self.basis is None:
            raise self.semantic(f"'{keyword.text}' before 'basis'", keyword.col)
        if keyword.text not in ("basis", "input") and self.inputs is None:
            raise self.semantic(f"'{keyword.text}' before 'input'", keyword.col)
        try:
            handler(keyword, args)
        except HyperhybridError as exc:
            if isinstance(exc, (CircuitSyntaxError, CircuitSemanticError)):
                raise
            col = args[0].col if args else keyword.col
            raise self.semantic(str(exc), col) from exc

    def stmt_basis(self, keyword, args):
        if self.basis is not None:
            raise self.semantic("duplicate 'basis' statement", keyword.col)
        split = next((i for i, t in enumerate(args) if t.text == "paths"), None)
        if split is None:
            raise self.syntax("'basis' needs a 'paths' section", keyword.col + len(keyword.text))
        spin_toks, path_toks = args[:split], args[split + 1:]
        if not spin_toks:
            raise self.syntax("'basis' needs at least one spin", args[split].col)
        if not path_toks:
            raise self.syntax("'basis' needs at least one path", args[split].col + len("paths"))
        spins = [self.spin(t) for t in spin_toks]
        for toks, what in ((spin_toks, "spin"), (path_toks, "path")):
            seen = set()
            for t in toks:
                if t.text in seen:
                    raise self.semantic(f"duplicate {what} {t.text!r}", t.col)
                seen.add(t.text)
        for t in path_toks:
            if not _PATH.fullmatch(t.text) or any(c in t.text for c in "@:,="):
                raise self.syntax(f"malformed path label {t.text!r}", t.col)
        self.basis = product_basis(spins, [t.text for t in path_toks])

    def stmt_input(self, keyword, args):
        if self.inputs is not None:
            raise self.semantic("duplicate 'input' statement", keyword.col)
        modes = []
        for tok in args:
            mode = self.mode(tok)
            if mode not in self.basis:
                raise self.semantic(f"mode {mode} is not in the basis", tok.col)
            modes.append(mode)
        self.inputs = tuple(modes)

    def stmt_hbs(self, keyword, args):
        self.arity(keyword, args, 2)
        a, b = self.mode(args[0]), self.mode(args[1])
        for tok, mode in zip(args, (a, b)):
            if mode not in self.basis:
                raise self.semantic(f"mode {mode} is not in the basis", tok.col)
        if a.spin == b.spin:
            raise self.semantic("hybrid splitter requires distinct spins", args[1].col)
        if a.path == b.path:
            raise self.semantic("hybrid splitter requires distinct paths", args[1].col)
        self.elements.append(HybridBS((a, b)))

    def stmt_bs(self, keyword, args):
        self.arity(keyword, args, 2)
        p1, p2 = self.path(args[0]), self.path(args[1])
        if p1 == p2:
            raise self.semantic("standard splitter requires distinct paths", args[1].col)
        self.elements.append(StandardBS((p1, p2)))

    def stmt_pbs(self, keyword, args):
        self.arity(keyword, args, 3, 4)
        text, col = self.keyword_arg(args[0], "transmit")
        transmit = self.spin(args[0], text, col)
        p1, p2 = self.path(args[1]), self.path(args[2])
        if p1 == p2:
            raise self.semantic("polarizing splitter requires distinct paths", args[2].col)
        phase = REFLECTION_PHASES["1"]
        if len(args) == 4:
            text, col = self.keyword_arg(args[3], "rphase")
            if text not in REFLECTION_PHASES:
                raise self.syntax(f"rphase must be one of 1, i, -1, -i; got {text!r}", col)
            phase = REFLECTION_PHASES[text]
        self.elements.append(PolarizingBS(transmit, (p1, p2), phase))

    def stmt_qwp(self, keyword, args):
        self.arity(keyword, args, 1)
        self.elements.append(QuarterWave(self.path(args[0])))

    def stmt_raman(self, keyword, args):
        self.arity(keyword, args, 4)
        a, b = self.mode(args[0]), self.mode(args[1])
        if a.spin == b.spin:
            raise self.semantic("raman pulse requires distinct spins", args[1].col)
        if a.path == b.path:
            raise self.semantic("raman pulse requires distinct paths", args[1].col)
        area = self.number(args[2], *self.keyword_arg(args[2], "area"))
        phase = self.number(args[3], *self.keyword_arg(args[3], "phase"))
        self.elements.append(Raman((a, b), area, phase))

    def stmt_phase(self, keyword, args):
        self.arity(keyword, args, 2)
        path = self.path(args[0])
        self.elements.append(Phase(path, self.number(args[1], args[1].text, args[1].col)))


def parse(text: str, filename: str = "<string>") -> Circuit:
    """Parse a circuit document; errors carry ``filename:line:col``."""
    return _Parser(text, filename).parse()


def parse_file(path) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), str(path))


def _num(value: float) -> str:
    return repr(float(value))


def _rphase(value: complex) -> str:
    for token, phase in REFLECTION_PHASES.items():
        if abs(value - phase) < 1e-15:
            return token
    raise ValueError(f"reflection phase {value} has no textual form")


def render(circuit: Circuit) -> str:
    """Serialise a circuit; ``parse(render(c)) == c`` for every renderable circuit."""
    basis = circuit.basis
    if not basis.is_product():
        raise ValueError("only spins x paths bases can be rendered")
    lines = [
        f"basis {' '.join(s.token for s in basis.spins)} paths {' '.join(basis.paths)}",
        f"input {' '.join(map(str, circuit.inputs))}".rstrip(),
    ]
    for spec in circuit.elements:
        if isinstance(spec, HybridBS):
            lines.append(f"hbs {spec.pair[0]} {spec.pair[1]}")
        elif isinstance(spec, StandardBS):
            lines.append(f"bs {spec.paths[0]} {spec.paths[1]}")
        elif isinstance(spec, Phase):
            lines.append(f"phase {spec.path} {_num(spec.angle)}")
        elif isinstance(spec, PolarizingBS):
            lines.append(
                f"pbs transmit={spec.transmit.token} {spec.paths[0]} {spec.paths[1]} "
                f"rphase={_rphase(spec.reflection_phase)}"
            )
        elif isinstance(spec, QuarterWave):
            lines.append(f"qwp {spec.path}")
        elif isinstance(spec, Raman):
            lines.append(
                f"raman {spec.pair[0]} {spec.pair[1]} area={_num(spec.pulse_area)} phase={_num(spec.laser_phase)}"
            )
        elif isinstance(spec, Custom):
            raise ValueError("custom matrix elements have no textual form")
        else:
            raise TypeError(f"not an element: {spec!r}")
    return "\n".join(lines) + "\n"
