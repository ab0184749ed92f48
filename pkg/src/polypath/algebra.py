"""Multivariate complex polynomials and polynomial systems.

Sparse (coefficient, exponent-vector) term representation with fused
numpy evaluation kernels, a small text format, homogenization, Bezout
counts, total-degree start systems, and the cyclic/katsura benchmark
families.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Polynomial",
    "PolynomialSystem",
    "StartPair",
    "ParseError",
    "parse_system",
    "format_system",
    "homogenize",
    "bezout_number",
    "total_degree_start",
    "generate_benchmark",
]


class Polynomial:
    """A sparse multivariate polynomial with complex coefficients.

    Terms are stored as a mapping from exponent tuples to nonzero
    complex coefficients; duplicate monomials are merged and zero
    coefficients dropped on construction.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Iterable[tuple[complex, Sequence[int]]] = ()):
        if nvars < 0:
            raise ValueError("nvars must be nonnegative")
        merged: dict[tuple[int, ...], complex] = {}
        for coeff, exps in terms:
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars:
                raise ValueError(f"exponent vector {exps} does not have length {nvars}")
            if any(e < 0 for e in exps):
                raise ValueError("exponents must be nonnegative")
            merged[exps] = merged.get(exps, 0j) + complex(coeff)
        self.nvars = nvars
        self.terms = {e: c for e, c in merged.items() if c != 0}

    @classmethod
    def constant(cls, nvars: int, value: complex) -> Polynomial:
        return cls(nvars, [(value, (0,) * nvars)])

    @classmethod
    def variable(cls, nvars: int, index: int) -> Polynomial:
        exps = [0] * nvars
        exps[index] = 1
        return cls(nvars, [(1.0, exps)])

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def evaluate(self, x: Sequence[complex]) -> complex:
        if len(x) != self.nvars:
            raise ValueError("point length does not match variable count")
        total = 0j
        for exps, coeff in self.terms.items():
            value = coeff
            for xi, e in zip(x, exps):
                if e:
                    value *= xi ** e
            total += value
        return total

    def __add__(self, other: Polynomial) -> Polynomial:
        self._check_compatible(other)
        items = [(c, e) for e, c in self.terms.items()]
        items += [(c, e) for e, c in other.terms.items()]
        return Polynomial(self.nvars, items)

    def __neg__(self) -> Polynomial:
        return Polynomial(self.nvars, [(-c, e) for e, c in self.terms.items()])

    def __sub__(self, other: Polynomial) -> Polynomial:
        return self + (-other)

    def __mul__(self, other: Polynomial) -> Polynomial:
        self._check_compatible(other)
        items = []
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                items.append((ca * cb, tuple(a + b for a, b in zip(ea, eb))))
        return Polynomial(self.nvars, items)

    def __pow__(self, exponent: int) -> Polynomial:
        if exponent < 0:
            raise ValueError("negative exponent")
        result = Polynomial.constant(self.nvars, 1.0)
        base = self
        n = exponent
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, factor: complex) -> Polynomial:
        return Polynomial(self.nvars, [(factor * c, e) for e, c in self.terms.items()])

    def _check_compatible(self, other: Polynomial) -> None:
        if not isinstance(other, Polynomial) or other.nvars != self.nvars:
            raise ValueError("polynomials must share the variable count")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Polynomial(nvars={self.nvars}, terms={len(self.terms)})"


class _StackedTerms:
    """All terms of a polynomial block stacked into flat numpy arrays.

    Shared by PolynomialSystem and the homotopy evaluation path.  Rows
    with no terms are padded with a zero term so that segment reductions
    (np.add.reduceat) stay well defined.
    """

    __slots__ = ("nrows", "nvars", "exps", "coeffs", "starts", "maxdeg",
                 "idx", "idxm1", "expf")

    def __init__(self, rows: Sequence[Sequence[tuple[complex, tuple[int, ...]]]], nvars: int):
        exps_list: list[tuple[int, ...]] = []
        coeff_list: list[complex] = []
        starts = []
        zero = (0,) * nvars
        for row in rows:
            starts.append(len(exps_list))
            if row:
                for coeff, exps in row:
                    coeff_list.append(coeff)
                    exps_list.append(exps)
            else:
                coeff_list.append(0j)
                exps_list.append(zero)
        self.nrows = len(rows)
        self.nvars = nvars
        self.exps = np.array(exps_list, dtype=np.int64).reshape(len(exps_list), nvars)
        self.coeffs = np.array(coeff_list, dtype=np.complex128)
        self.starts = np.array(starts, dtype=np.intp)
        self.maxdeg = int(self.exps.max(initial=0))
        width = self.maxdeg + 1
        base = np.arange(nvars, dtype=np.intp) * width
        self.idx = base[None, :] + self.exps
        self.idxm1 = np.maximum(self.idx - 1, base[None, :])
        self.expf = self.exps.astype(np.float64)

    @classmethod
    def from_polynomials(cls, polys: Sequence[Polynomial], nvars: int) -> _StackedTerms:
        rows = [[(c, e) for e, c in p.terms.items()] for p in polys]
        return cls(rows, nvars)

    def power_table(self, x: np.ndarray) -> np.ndarray:
        """Flat table of x_i^d for d = 0..maxdeg, shape (nvars*(maxdeg+1),)."""
        table = np.empty((self.nvars, self.maxdeg + 1), dtype=np.complex128)
        table[:, 0] = 1.0
        for d in range(1, self.maxdeg + 1):
            np.multiply(table[:, d - 1], x, out=table[:, d])
        return table.reshape(-1)

    def monomials(self, x: np.ndarray) -> np.ndarray:
        """Per-term monomial values, shape (nterms,)."""
        gathered = self.power_table(x)[self.idx]
        return np.prod(gathered, axis=1)

    def monomials_and_gradients(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Monomial values plus per-term gradient monomials.

        Returns (mon, grad) with mon shape (nterms,) and grad shape
        (nterms, nvars) where grad[t, i] = d/dx_i of the monomial of
        term t (coefficients not applied).
        """
        flat = self.power_table(x)
        gathered = flat[self.idx]
        # suffix[t, i] = prod_{j > i} gathered[t, j], prefix analogous
        rev = np.cumprod(gathered[:, ::-1], axis=1)[:, ::-1]
        mon = rev[:, 0].copy()
        suffix = np.empty_like(gathered)
        suffix[:, -1] = 1.0
        if self.nvars > 1:
            suffix[:, :-1] = rev[:, 1:]
        prefix = np.empty_like(gathered)
        prefix[:, 0] = 1.0
        if self.nvars > 1:
            np.cumprod(gathered[:, :-1], axis=1, out=prefix[:, 1:])
        grad = self.expf * prefix * suffix * flat[self.idxm1]
        return mon, grad

    def reduce_rows(self, per_term: np.ndarray) -> np.ndarray:
        return np.add.reduceat(per_term, self.starts, axis=0)

    def monomial_jets(self, xjet: np.ndarray) -> np.ndarray:
        """Per-term truncated power series of the monomials.

        xjet has shape (nvars, K): row i holds the series coefficients
        of x_i(s).  Returns shape (nterms, K).
        """
        n, order = xjet.shape
        width = self.maxdeg + 1
        powers = np.zeros((n, width, order), dtype=np.complex128)
        powers[:, 0, 0] = 1.0
        for d in range(1, width):
            powers[:, d] = _jet_mul(powers[:, d - 1], xjet)
        gathered = powers.reshape(n * width, order)[self.idx]
        acc = gathered[:, 0]
        for i in range(1, n):
            acc = _jet_mul(acc, gathered[:, i])
        return acc


def _jet_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Truncated product of coefficient series along the last axis."""
    order = a.shape[-1]
    shape = np.broadcast_shapes(a.shape, b.shape)
    out = np.zeros(shape, dtype=np.complex128)
    for k in range(order):
        for j in range(k + 1):
            out[..., k] += a[..., j] * b[..., k - j]
    return out


class PolynomialSystem:
    """An ordered list of polynomials over a shared variable list.

    Immutable after construction; evaluation data (stacked exponent and
    coefficient arrays, power-table indices) is precomputed once so that
    point evaluation and Jacobian assembly are a handful of vectorized
    operations.
    """

    def __init__(self, polynomials: Sequence[Polynomial], variables: Sequence[str]):
        polynomials = tuple(polynomials)
        variables = tuple(str(v) for v in variables)
        if not polynomials:
            raise ValueError("a system needs at least one polynomial")
        if len(set(variables)) != len(variables):
            raise ValueError("duplicate variable names")
        for p in polynomials:
            if p.nvars != len(variables):
                raise ValueError("all polynomials must agree on the variable count")
        self.polynomials = polynomials
        self.variables = variables
        self._stack = _StackedTerms.from_polynomials(polynomials, len(variables))

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def npolys(self) -> int:
        return len(self.polynomials)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(p.degree for p in self.polynomials)

    def is_homogeneous(self) -> bool:
        for p in self.polynomials:
            d = p.degree
            if any(sum(e) != d for e in p.terms):
                return False
        return True

    def _point(self, x: Sequence[complex]) -> np.ndarray:
        x = np.asarray(x, dtype=np.complex128)
        if x.shape != (self.nvars,):
            raise ValueError(f"expected a point of length {self.nvars}")
        return x

    def evaluate(self, x: Sequence[complex]) -> np.ndarray:
        x = self._point(x)
        st = self._stack
        return st.reduce_rows(st.coeffs * st.monomials(x))

    def jacobian(self, x: Sequence[complex]) -> np.ndarray:
        x = self._point(x)
        st = self._stack
        _, grad = st.monomials_and_gradients(x)
        return st.reduce_rows(st.coeffs[:, None] * grad)

    def eval_and_jac(self, x: Sequence[complex]) -> tuple[np.ndarray, np.ndarray]:
        x = self._point(x)
        st = self._stack
        mon, grad = st.monomials_and_gradients(x)
        return (st.reduce_rows(st.coeffs * mon),
                st.reduce_rows(st.coeffs[:, None] * grad))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolynomialSystem):
            return NotImplemented
        return self.variables == other.variables and self.polynomials == other.polynomials

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"PolynomialSystem({self.npolys} polynomials in {list(self.variables)})"


@dataclass(frozen=True)
class StartPair:
    """A start system together with its known solutions."""

    system: PolynomialSystem
    solutions: np.ndarray


# ---------------------------------------------------------------------------
# Text format


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


_TOKEN_RE = re.compile(
    r"""
    (?P<complex>\(\s*[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?\s*
        [+-]\s*(?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?i\s*\))
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*^()])
  | (?P<ws>\s+)
    """,
    re.VERBOSE,
)

_COMPLEX_RE = re.compile(
    r"\(\s*(?P<re>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*"
    r"(?P<sign>[+-])\s*(?P<im>(?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)i\s*\)"
)


def _tokenize(text: str, line_no: int) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line_no, pos + 1)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos + 1))
        pos = m.end()
    tokens.append(("end", "", len(text) + 1))
    return tokens


class _PolyParser:
    def __init__(self, tokens, variables: Sequence[str], line_no: int):
        self.tokens = tokens
        self.pos = 0
        self.vars = {name: i for i, name in enumerate(variables)}
        self.nvars = len(variables)
        self.line = line_no

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str):
        _, _, col = self.peek()
        raise ParseError(message, self.line, col)

    def parse(self) -> Polynomial:
        poly = self.parse_expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected token {self.peek()[1]!r}")
        return poly

    def parse_expr(self) -> Polynomial:
        sign = 1.0
        if self.peek()[0] == "op" and self.peek()[1] in "+-":
            sign = -1.0 if self.advance()[1] == "-" else 1.0
        poly = self.parse_term().scale(sign)
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.advance()[1]
            rhs = self.parse_term()
            poly = poly + rhs if op == "+" else poly - rhs
        return poly

    def parse_term(self) -> Polynomial:
        poly = self.parse_factor()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.advance()
            poly = poly * self.parse_factor()
        return poly

    def parse_factor(self) -> Polynomial:
        base = self.parse_atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.advance()
            kind, text, col = self.peek()
            if kind != "number" or not text.isdigit():
                self.error("exponent must be a nonnegative integer")
            self.advance()
            return base ** int(text)
        return base

    def parse_atom(self) -> Polynomial:
        kind, text, col = self.peek()
        if kind == "number":
            self.advance()
            return Polynomial.constant(self.nvars, float(text))
        if kind == "complex":
            self.advance()
            m = _COMPLEX_RE.fullmatch(text)
            if m is None:
                raise ParseError(f"malformed complex literal {text!r}", self.line, col)
            imag = float(m.group("im")) if m.group("im") else 1.0
            if m.group("sign") == "-":
                imag = -imag
            return Polynomial.constant(self.nvars, complex(float(m.group("re")), imag))
        if kind == "name":
            self.advance()
            if text not in self.vars:
                raise ParseError(f"unknown variable {text!r}", self.line, col)
            return Polynomial.variable(self.nvars, self.vars[text])
        if kind == "op" and text == "(":
            self.advance()
            poly = self.parse_expr()
            k2, t2, _ = self.peek()
            if k2 != "op" or t2 != ")":
                self.error("expected ')'")
            self.advance()
            return poly
        self.error(f"unexpected token {text!r}" if text else "unexpected end of input")
        raise AssertionError  # unreachable


def parse_system(text: str) -> PolynomialSystem:
    """Parse the plain-text system format.

    The first non-comment line is ``vars: x, y, z``; each following
    non-empty line is one polynomial.  ``#`` starts a comment, complex
    literals are written ``(a+bi)`` or ``(a-bi)``, and the operators are
    ``+ - * ^`` (no juxtaposition).
    """
    variables: tuple[str, ...] | None = None
    polys: list[Polynomial] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if variables is None:
            m = re.fullmatch(r"vars\s*:\s*(.*)", line)
            if m is None:
                raise ParseError("expected a 'vars:' header line", line_no, 1)
            names = [v.strip() for v in m.group(1).split(",")]
            if not names or any(not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", v) for v in names):
                raise ParseError("invalid variable list", line_no, 1)
            if len(set(names)) != len(names):
                raise ParseError("duplicate variable names", line_no, 1)
            variables = tuple(names)
            continue
        tokens = _tokenize(line, line_no)
        polys.append(_PolyParser(tokens, variables, line_no).parse())
    if variables is None:
        raise ParseError("missing 'vars:' header", 1, 1)
    if not polys:
        raise ParseError("no polynomials given", 1, 1)
    return PolynomialSystem(polys, variables)


def _format_coefficient(c: complex) -> str:
    if c.imag == 0.0:
        return repr(c.real)
    sign = "+" if c.imag >= 0 else "-"
    return f"({c.real!r}{sign}{abs(c.imag)!r}i)"


def _format_polynomial(p: Polynomial, variables: Sequence[str]) -> str:
    if not p.terms:
        return "0"
    pieces = []
    for exps in sorted(p.terms, key=lambda e: (-sum(e), tuple(-v for v in e))):
        coeff = p.terms[exps]
        if coeff.imag == 0.0 and coeff.real < 0:
            sign, shown = "-", -coeff
        else:
            sign, shown = "+", coeff
        factors = [_format_coefficient(shown)]
        for name, e in zip(variables, exps):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        pieces.append((sign, "*".join(factors)))
    first_sign, first_body = pieces[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


def format_system(system: PolynomialSystem) -> str:
    """Print a system in the text format; parse_system inverts this."""
    lines = ["vars: " + ", ".join(system.variables)]
    lines += [_format_polynomial(p, system.variables) for p in system.polynomials]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Constructions


def homogenize(system: PolynomialSystem) -> PolynomialSystem:
    """Add a leading variable making every polynomial homogeneous.

    Dehomogenizing (setting the new first variable to 1) recovers the
    input.
    """
    fresh = "x0"
    while fresh in system.variables:
        fresh += "_"
    out = []
    for p in system.polynomials:
        d = p.degree
        terms = [(c, (d - sum(e),) + e) for e, c in p.terms.items()]
        out.append(Polynomial(p.nvars + 1, terms))
    return PolynomialSystem(out, (fresh,) + system.variables)


def bezout_number(system: PolynomialSystem) -> int:
    """Product of the total degrees of a square system."""
    if system.npolys != system.nvars:
        raise ValueError("Bezout number requires a square system")
    result = 1
    for p in system.polynomials:
        d = p.degree
        if d < 0:
            raise ValueError("zero polynomial has no degree")
        result *= d
    return result


def total_degree_start(target: PolynomialSystem) -> StartPair:
    """Start system x_i^{d_i} - 1 with all roots-of-unity solutions."""
    if target.npolys != target.nvars:
        raise ValueError("total-degree start requires a square system")
    degrees = target.degrees
    if any(d < 1 for d in degrees):
        raise ValueError("every target polynomial must have degree at least 1")
    n = target.nvars
    polys = []
    for i, d in enumerate(degrees):
        exps = [0] * n
        exps[i] = d
        polys.append(Polynomial(n, [(1.0, exps), (-1.0, (0,) * n)]))
    system = PolynomialSystem(polys, target.variables)
    axes = [np.exp(2j * np.pi * np.arange(d) / d) for d in degrees]
    solutions = np.array(list(itertools.product(*axes)), dtype=np.complex128)
    return StartPair(system, solutions)


def generate_benchmark(family: str, n: int) -> PolynomialSystem:
    """Generate a classic benchmark system.

    cyclic-n: the n-1 cyclic sums plus x_1*...*x_n - 1 in n variables.
    katsura-n: n quadrics plus one linear normalization in n+1 variables.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if family == "cyclic":
        variables = [f"x{i + 1}" for i in range(n)]
        polys = []
        for d in range(1, n):
            terms = []
            for i in range(n):
                exps = [0] * n
                for j in range(d):
                    exps[(i + j) % n] += 1
                terms.append((1.0, exps))
            polys.append(Polynomial(n, terms))
        polys.append(Polynomial(n, [(1.0, (1,) * n), (-1.0, (0,) * n)]))
        return PolynomialSystem(polys, variables)
    if family == "katsura":
        nv = n + 1
        variables = [f"u{i}" for i in range(nv)]

        def u(index: int) -> list[int] | None:
            index = abs(index)
            if index > n:
                return None
            exps = [0] * nv
            exps[index] = 1
            return exps

        polys = []
        for m in range(n):
            terms = []
            for l in range(-n, n + 1):
                a, b = u(l), u(m - l)
                if a is None or b is None:
                    continue
                terms.append((1.0, [x + y for x, y in zip(a, b)]))
            terms.append((-1.0, u(m)))
            polys.append(Polynomial(nv, terms))
        linear = [(1.0, u(0))] + [(2.0, u(l)) for l in range(1, n + 1)]
        linear.append((-1.0, [0] * nv))
        polys.append(Polynomial(nv, linear))
        return PolynomialSystem(polys, variables)
    raise ValueError(f"unknown benchmark family {family!r}")
