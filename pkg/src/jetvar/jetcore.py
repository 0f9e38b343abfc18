"""Differential polynomials in jet coordinates with exact rational coefficients.

A :class:`DiffPoly` is a sparse map from monomials to nonzero rationals.  Every
variable (an independent variable ``x^i`` or a jet coordinate ``u_alpha``) is
encoded as a small integer id by its :class:`JetContext`, and a monomial is a
sorted tuple of ``(var_id, exponent)`` pairs.  Keeping that encoding canonical
makes equality of polynomials plain dict equality.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple, Union

Monomial = Tuple[Tuple[int, int], ...]
MultiIndex = Tuple[int, ...]
Rational = Union[int, Fraction]

DEFAULT_MAX_ORDER = 16


class JetError(Exception):
    """Base class for kernel errors."""


class ParseError(JetError):
    def __init__(self, message: str, pos: int = -1, text: str = ""):
        self.pos = pos
        self.text = text
        if pos >= 0:
            message = f"{message} at position {pos}"
        super().__init__(message)


class OrderCapError(JetError):
    pass


def _norm(c: Rational) -> Rational:
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def as_rational(c) -> Rational:
    if isinstance(c, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return _norm(c)
    raise TypeError(f"not an exact rational: {c!r}")


# -- multi-indices ----------------------------------------------------------

def mi_add(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b))


def mi_order(a: MultiIndex) -> int:
    return sum(a)


@dataclass(frozen=True)
class JetContext:
    """Coordinates of a jet space with one dependent variable.

    Independent variables get ids ``0..n-1``; the jet ``u_alpha`` gets
    ``n + sum(alpha_i * base**i)`` with ``base = max_order + 1``.
    """

    indep_vars: Tuple[str, ...]
    dep_var: str = "u"
    max_order: int = DEFAULT_MAX_ORDER
    _base: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "indep_vars", tuple(self.indep_vars))
        n = len(self.indep_vars)
        if not 1 <= n <= 3:
            raise ValueError("1 to 3 independent variables are supported")
        names = set(self.indep_vars) | {self.dep_var}
        if len(names) != n + 1:
            raise ValueError("variable names must be distinct")
        for name in names:
            if not re.fullmatch(r"[A-Za-z][A-Za-z0-9]*", name):
                raise ValueError(f"bad variable name {name!r}")
        if self.max_order < 1:
            raise ValueError("max_order must be >= 1")
        object.__setattr__(self, "_base", self.max_order + 1)

    @property
    def n(self) -> int:
        return len(self.indep_vars)

    def index(self, name: str) -> int:
        try:
            return self.indep_vars.index(name)
        except ValueError:
            raise JetError(f"unknown independent variable {name!r}") from None

    def unit(self, name: str) -> MultiIndex:
        i = self.index(name)
        return tuple(int(k == i) for k in range(self.n))

    def zero(self) -> MultiIndex:
        return (0,) * self.n

    def jet_id(self, alpha: Sequence[int]) -> int:
        if len(alpha) != self.n or any(a < 0 for a in alpha):
            raise JetError(f"bad multi-index {tuple(alpha)}")
        if sum(alpha) > self.max_order:
            raise OrderCapError(
                f"jet order {sum(alpha)} exceeds the cap {self.max_order}")
        vid = self.n
        step = 1
        for a in alpha:
            vid += a * step
            step *= self._base
        return vid

    def alpha(self, vid: int) -> Optional[MultiIndex]:
        """Multi-index of a jet id, or None for an independent variable."""
        return _decode(self.n, self._base, vid)

    def shift(self, vid: int, i: int) -> int:
        """Id of ``u_{alpha + x^i}`` for the jet ``vid``."""
        alpha = self.alpha(vid)
        if sum(alpha) + 1 > self.max_order:
            raise OrderCapError(
                f"jet order {sum(alpha) + 1} exceeds the cap {self.max_order}")
        return vid + self._base ** i

    def var_name(self, vid: int) -> str:
        alpha = self.alpha(vid)
        if alpha is None:
            return self.indep_vars[vid]
        if not any(alpha):
            return self.dep_var
        if all(len(v) == 1 for v in self.indep_vars):
            return self.dep_var + "_" + "".join(
                v * a for v, a in zip(self.indep_vars, alpha))
        return f"{self.dep_var}[{','.join(map(str, alpha))}]"

    def var_key(self, vid: int):
        """Sort key for variables: jets by (|alpha|, reversed alpha), then
        independent variables in declaration order."""
        alpha = self.alpha(vid)
        if alpha is None:
            return (1, vid, ())
        return (0, sum(alpha), tuple(reversed(alpha)))


@lru_cache(maxsize=None)
def _decode(n: int, base: int, vid: int) -> Optional[MultiIndex]:
    if vid < n:
        return None
    rest = vid - n
    out = []
    for _ in range(n):
        rest, a = divmod(rest, base)
        out.append(a)
    return tuple(out)


# -- monomial helpers -------------------------------------------------------

def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def _add_into(acc: Dict[Monomial, Rational], m: Monomial, c: Rational) -> None:
    s = acc.get(m, 0) + c
    if s:
        acc[m] = s
    else:
        acc.pop(m, None)


class DiffPoly:
    """Immutable sparse polynomial over Q in the variables of a JetContext."""

    __slots__ = ("ctx", "terms", "_hash")

    def __init__(self, ctx: JetContext, terms: Optional[Mapping[Monomial, Rational]] = None):
        self.ctx = ctx
        if terms is None:
            self.terms = {}
        else:
            self.terms = {m: _norm(c) for m, c in terms.items() if c}
        self._hash = None

    @classmethod
    def _raw(cls, ctx: JetContext, terms: Dict[Monomial, Rational]) -> "DiffPoly":
        p = cls.__new__(cls)
        p.ctx = ctx
        p.terms = terms
        p._hash = None
        return p

    # -- constructors --

    @classmethod
    def const(cls, ctx: JetContext, c) -> "DiffPoly":
        c = as_rational(c)
        return cls._raw(ctx, {(): c} if c else {})

    @classmethod
    def var(cls, ctx: JetContext, name: str) -> "DiffPoly":
        return cls._raw(ctx, {((ctx.index(name), 1),): 1})

    @classmethod
    def jet(cls, ctx: JetContext, alpha: Sequence[int]) -> "DiffPoly":
        return cls._raw(ctx, {((ctx.jet_id(alpha), 1),): 1})

    @classmethod
    def from_var_id(cls, ctx: JetContext, vid: int, exp: int = 1) -> "DiffPoly":
        return cls._raw(ctx, {((vid, exp),) if exp else (): 1})

    @classmethod
    def monomial(cls, ctx: JetContext, m: Monomial, c: Rational = 1) -> "DiffPoly":
        return cls._raw(ctx, {m: as_rational(c)} if c else {})

    # -- inspection --

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self) -> Iterator[Tuple[Monomial, Rational]]:
        return iter(self.terms.items())

    def variables(self) -> set:
        return {v for m in self.terms for v, _ in m}

    def jet_ids(self) -> set:
        return {v for v in self.variables() if v >= self.ctx.n}

    def constant_term(self) -> Rational:
        return self.terms.get((), 0)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def degree(self) -> int:
        return max((mono_degree(m) for m in self.terms), default=-1)

    def degree_in(self, vid: int) -> int:
        return max((dict(m).get(vid, 0) for m in self.terms), default=0)

    # -- arithmetic --

    def _coerce(self, other) -> "DiffPoly":
        if isinstance(other, DiffPoly):
            if other.ctx != self.ctx:
                raise JetError("polynomials live in different jet contexts")
            return other
        return DiffPoly.const(self.ctx, other)

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if len(other.terms) > len(self.terms):
            big, small = other.terms, self.terms
        else:
            big, small = self.terms, other.terms
        acc = dict(big)
        for m, c in small.items():
            _add_into(acc, m, c)
        return DiffPoly._raw(self.ctx, acc)

    __radd__ = __add__

    def __neg__(self):
        return DiffPoly._raw(self.ctx, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        acc = dict(self.terms)
        for m, c in other.terms.items():
            _add_into(acc, m, -c)
        return DiffPoly._raw(self.ctx, acc)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "DiffPoly":
        c = as_rational(c)
        if not c:
            return DiffPoly._raw(self.ctx, {})
        return DiffPoly._raw(self.ctx, {m: _norm(v * c) for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        if not isinstance(other, DiffPoly):
            return NotImplemented
        other = self._coerce(other)
        acc: Dict[Monomial, Rational] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                _add_into(acc, mono_mul(m1, m2), c1 * c2)
        return DiffPoly._raw(self.ctx, {m: _norm(c) for m, c in acc.items()})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if not other:
                raise ZeroDivisionError("division of a polynomial by zero")
            return self.scale(Fraction(1) / other)
        return NotImplemented

    def __pow__(self, k):
        if not isinstance(k, int) or isinstance(k, bool):
            raise TypeError("exponent must be an int")
        if k < 0:
            raise JetError("negative exponent")
        result = DiffPoly.const(self.ctx, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, DiffPoly):
            return self.ctx == other.ctx and self.terms == other.terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.terms == ({(): other} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"DiffPoly({format_expr(self)!r})"

    def __str__(self):
        return format_expr(self)

    # -- calculus primitives --

    def diff(self, vid: int) -> "DiffPoly":
        """Partial derivative with respect to the variable with id ``vid``."""
        acc: Dict[Monomial, Rational] = {}
        for m, c in self.terms.items():
            for k, (v, e) in enumerate(m):
                if v == vid:
                    if e == 1:
                        nm = m[:k] + m[k + 1:]
                    else:
                        nm = m[:k] + ((v, e - 1),) + m[k + 1:]
                    acc[nm] = c * e
                    break
        return DiffPoly._raw(self.ctx, acc)

    def subs(self, mapping: Mapping[int, "DiffPoly"]) -> "DiffPoly":
        """Substitute polynomials for variables (by id), simultaneously."""
        if not mapping:
            return self
        powers: Dict[Tuple[int, int], DiffPoly] = {}

        def power(v, e):
            key = (v, e)
            if key not in powers:
                powers[key] = mapping[v] ** e
            return powers[key]

        acc: Dict[Monomial, Rational] = {}
        for m, c in self.terms.items():
            kept = tuple((v, e) for v, e in m if v not in mapping)
            replaced = [(v, e) for v, e in m if v in mapping]
            if not replaced:
                _add_into(acc, m, c)
                continue
            prod = DiffPoly._raw(self.ctx, {kept: c})
            for v, e in replaced:
                prod = prod * power(v, e)
                if not prod.terms:
                    break
            for pm, pc in prod.terms.items():
                _add_into(acc, pm, pc)
        return DiffPoly._raw(self.ctx, acc)

    def coefficient_of(self, vid: int, exp: int) -> "DiffPoly":
        """Coefficient of ``var**exp`` when viewed as a polynomial in ``var``."""
        acc: Dict[Monomial, Rational] = {}
        for m, c in self.terms.items():
            d = dict(m)
            if d.get(vid, 0) == exp:
                d.pop(vid, None)
                acc[tuple(sorted(d.items()))] = c
        return DiffPoly._raw(self.ctx, acc)


def zero(ctx: JetContext) -> DiffPoly:
    return DiffPoly._raw(ctx, {})


def one(ctx: JetContext) -> DiffPoly:
    return DiffPoly._raw(ctx, {(): 1})


def arith(kind: str, a: DiffPoly, b=None) -> DiffPoly:
    """Named entry point for ring operations: add, mul, neg, pow."""
    if kind == "add":
        return a + b
    if kind == "mul":
        return a * b
    if kind == "neg":
        return -a
    if kind == "pow":
        return a ** b
    raise ValueError(f"unknown arithmetic kind {kind!r}")


def poly_sum(ctx: JetContext, polys: Iterable[DiffPoly]) -> DiffPoly:
    acc: Dict[Monomial, Rational] = {}
    for p in polys:
        for m, c in p.terms.items():
            _add_into(acc, m, c)
    return DiffPoly._raw(ctx, acc)


# -- canonical printing -----------------------------------------------------

def mono_sort_key(ctx: JetContext, m: Monomial):
    """Graded order: higher total degree first, then lexicographic on the
    exponent vector with variables ranked by ``JetContext.var_key``."""
    ranked = sorted(m, key=lambda ve: ctx.var_key(ve[0]))
    return (-mono_degree(m), tuple((ctx.var_key(v), -e) for v, e in ranked))


def format_monomial(ctx: JetContext, m: Monomial) -> str:
    parts = []
    for v, e in sorted(m, key=lambda ve: ctx.var_key(ve[0])):
        name = ctx.var_name(v)
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


def _format_coeff(c: Rational) -> str:
    return str(c)


def format_expr(p: DiffPoly) -> str:
    if not p.terms:
        return "0"
    ctx = p.ctx
    out = []
    for m in sorted(p.terms, key=lambda m: mono_sort_key(ctx, m)):
        c = p.terms[m]
        neg = c < 0
        a = -c if neg else c
        if not m:
            body = _format_coeff(a)
        elif a == 1:
            body = format_monomial(ctx, m)
        else:
            body = f"{_format_coeff(a)}*{format_monomial(ctx, m)}"
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


# -- parsing ----------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<ident>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*/^()\[\],]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        start = m.start(m.lastgroup)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, ctx: JetContext, extra: Sequence[str] = ()):
        self.text = text
        self.ctx = ctx
        self.extra = tuple(extra)
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value:
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}", pos, self.text)

    def parse(self) -> DiffPoly:
        if self.peek()[0] == "end":
            raise ParseError("empty expression", 0, self.text)
        p = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {val!r}", pos, self.text)
        return p

    def expr(self):
        p = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            pos = self.peek()[2]
            q = self.unary()
            if op == "*":
                p = p * q
            elif not q.is_constant() or not q:
                raise ParseError("division only by a nonzero constant", pos, self.text)
            else:
                p = p / q.constant_term()
        return p

    def unary(self):
        kind, val, pos = self.peek()
        if kind == "op" and val in ("-", "+"):
            self.take()
            p = self.unary()
            return -p if val == "-" else p
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            kind, val, pos = self.take()
            if kind == "op" and val == "-":
                raise ParseError("negative exponent", pos, self.text)
            if kind != "num":
                raise ParseError("exponent must be a non-negative integer literal", pos, self.text)
            return base ** int(val)
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return DiffPoly.const(self.ctx, int(val))
        if kind == "ident":
            return self.identifier(val, pos)
        if kind == "op" and val == "(":
            p = self.expr()
            self.expect(")")
            return p
        raise ParseError(f"unexpected {val or 'end of input'!r}", pos, self.text)

    def identifier(self, name: str, pos: int) -> DiffPoly:
        ctx = self.ctx
        if name in self.extra:
            return DiffPoly._raw(ctx, {((-1 - self.extra.index(name), 1),): 1})
        if name in ctx.indep_vars:
            return DiffPoly.var(ctx, name)
        dep = ctx.dep_var
        if name == dep:
            kind, val, _ = self.peek()
            if kind == "op" and val == "[":
                self.take()
                counts = []
                while True:
                    k, v, p2 = self.take()
                    if k != "num" or "/" in v:
                        raise ParseError("expected a non-negative integer count", p2, self.text)
                    counts.append(int(v))
                    k, v, p2 = self.take()
                    if v == "]":
                        break
                    if v != ",":
                        raise ParseError("expected ',' or ']'", p2, self.text)
                if len(counts) != ctx.n:
                    raise ParseError(
                        f"multi-index needs {ctx.n} counts, got {len(counts)}", pos, self.text)
                return self._jet(counts, pos)
            return self._jet(ctx.zero(), pos)
        if name.startswith(dep + "_"):
            letters = name[len(dep) + 1:]
            if not letters:
                raise ParseError(f"empty derivative suffix in {name!r}", pos, self.text)
            counts = [0] * ctx.n
            for ch in letters:
                if ch not in ctx.indep_vars:
                    raise ParseError(f"unknown variable {ch!r} in {name!r}", pos, self.text)
                counts[ctx.indep_vars.index(ch)] += 1
            return self._jet(counts, pos)
        raise ParseError(f"unknown variable {name!r}", pos, self.text)

    def _jet(self, counts, pos):
        if sum(counts) > self.ctx.max_order:
            raise OrderCapError(
                f"jet order {sum(counts)} exceeds the cap {self.ctx.max_order} at position {pos}")
        return DiffPoly.jet(self.ctx, counts)


def parse_expr(text: str, ctx: JetContext) -> DiffPoly:
    """Parse an expression into its canonical DiffPoly."""
    return _Parser(text, ctx).parse()


def parse_with_symbols(text: str, ctx: JetContext, extra: Sequence[str]) -> DiffPoly:
    """Parse allowing formal extra symbols; the i-th gets variable id ``-1-i``.

    Used by the operator text format, where ``Dx`` is such a symbol.
    """
    return _Parser(text, ctx, extra).parse()
