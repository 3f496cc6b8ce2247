"""Exact scalar functions on a coordinate chart.

A :class:`Scalar` is a fraction ``N/D`` where ``N`` and ``D`` live in the ring
``Q[x_1, ..., x_n][exp(l) : l a rational linear form]``.  The exponential
monomials form a Laurent group, so the ring is an integral domain in which
zero-equality is decided by looking at the canonical numerator.

Polynomials are stored sparsely as ``{monomial: Fraction}`` where a monomial is
a pair ``(xpart, linpart)``; ``xpart`` is a sorted tuple of ``(var, exponent)``
and ``linpart`` a sorted tuple of ``(var, coefficient)`` describing
``exp(sum coefficient * var)``.  Scalars are not tied to a chart object: the
variables are plain names, which makes pullbacks along product projections a
renaming.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache, reduce
from math import lcm
from typing import Dict, Iterable, Mapping, Tuple

from sympy.polys.domains import QQ
from sympy.polys.rings import ring

from ..errors import EvaluationError, PoleError

XPart = Tuple[Tuple[str, int], ...]
LinPart = Tuple[Tuple[str, Fraction], ...]
Mono = Tuple[XPart, LinPart]
Poly = Dict[Mono, Fraction]

ONE_MONO: Mono = ((), ())

# Reserved pseudo-variable: exp(r * TRANSCENDENTAL) stands for the real number e^r.
TRANSCENDENTAL = "_e"


def _merge(a, b):
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for k, v in b:
        w = d.get(k, 0) + v
        if w:
            d[k] = w
        else:
            del d[k]
    return tuple(sorted(d.items()))


# Exponent tuples and linear forms get separate caches: (("p", 1),) and
# (("p", Fraction(1)),) are equal keys, and a shared cache would hand
# Fraction exponents back to the polynomial part.
_merge_x = lru_cache(maxsize=1 << 16)(_merge)
_merge_lin = lru_cache(maxsize=1 << 16)(_merge)


def _mono_mul(m1: Mono, m2: Mono) -> Mono:
    return (_merge_x(m1[0], m2[0]), _merge_lin(m1[1], m2[1]))


def _lin_neg(lin: LinPart) -> LinPart:
    return tuple((v, -c) for v, c in lin)


def _padd(a: Poly, b: Poly, sign=1) -> Poly:
    out = dict(a)
    for m, c in b.items():
        w = out.get(m, 0) + sign * c
        if w:
            out[m] = w
        else:
            out.pop(m, None)
    return out


def _pmul(a: Poly, b: Poly) -> Poly:
    if len(a) == 1 and ONE_MONO in a:
        c = a[ONE_MONO]
        return {m: c * v for m, v in b.items()} if c != 1 else dict(b)
    if len(b) == 1 and ONE_MONO in b:
        c = b[ONE_MONO]
        return {m: c * v for m, v in a.items()} if c != 1 else dict(a)
    out: Poly = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = _mono_mul(m1, m2)
            w = out.get(m, 0) + c1 * c2
            if w:
                out[m] = w
            else:
                out.pop(m, None)
    return out


def _pscale(a: Poly, c: Fraction, lin: LinPart = ()) -> Poly:
    if lin:
        return {(m[0], _merge_lin(m[1], lin)): c * v for m, v in a.items()}
    return {m: c * v for m, v in a.items()}


def _is_one(p: Poly) -> bool:
    return len(p) == 1 and p.get(ONE_MONO) == 1


def _pvars(p: Poly):
    xs, es = set(), set()
    for xm, lm in p:
        xs.update(v for v, _ in xm)
        es.update(v for v, _ in lm)
    return xs, es


def _dense_key(m: Mono, xvars, evars):
    xd, ld = dict(m[0]), dict(m[1])
    return (tuple(xd.get(v, 0) for v in xvars), tuple(ld.get(v, 0) for v in evars))


@lru_cache(maxsize=64)
def _sympy_ring(nx: int, ne: int):
    names = [f"x{i}" for i in range(nx)] + [f"y{i}" for i in range(ne)]
    if not names:
        names = ["x0"]
    return ring(",".join(names), QQ)[0]


def _cancel_general(num: Poly, den: Poly):
    xs1, es1 = _pvars(num)
    xs2, es2 = _pvars(den)
    xvars = sorted(xs1 | xs2)
    evars = sorted(es1 | es2)
    scale, shift = {}, {}
    for v in evars:
        coeffs = [dict(m[1]).get(v, Fraction(0)) for p in (num, den) for m in p]
        scale[v] = reduce(lcm, (Fraction(c).denominator for c in coeffs), 1)
        shift[v] = min(coeffs)
    R = _sympy_ring(len(xvars), len(evars))

    def to_ring(p):
        d = {}
        for (xm, lm), c in p.items():
            xd, ld = dict(xm), dict(lm)
            key = tuple(xd.get(v, 0) for v in xvars) + tuple(
                int((ld.get(v, 0) - shift[v]) * scale[v]) for v in evars
            )
            if not xvars and not evars:
                key = (0,)
            d[key] = QQ(c.numerator, c.denominator)
        return R.from_dict(d)

    def from_ring(el):
        out = {}
        for key, c in el.terms():
            xm = tuple((v, e) for v, e in zip(xvars, key[: len(xvars)]) if e)
            lm = []
            for v, e in zip(evars, key[len(xvars):]):
                val = shift[v] + Fraction(e, scale[v])
                if val:
                    lm.append((v, val))
            out[(xm, tuple(lm))] = Fraction(int(c.numerator), int(c.denominator))
        return out

    p, q = to_ring(num).cancel(to_ring(den))
    return from_ring(p), from_ring(q)


def _canonical(num: Poly, den: Poly):
    """Reduce ``num/den`` to lowest terms and normalise the unit ambiguity."""
    if not num:
        return {}, {ONE_MONO: Fraction(1)}
    if not den:
        raise ZeroDivisionError("division by the zero scalar")
    if _is_one(den):
        return num, den
    if len(den) != 1:
        num, den = _cancel_general(num, den)
    if len(den) == 1:
        ((xm, lm), c), = den.items()
        inv = 1 / c
        num = _pscale(num, inv, _lin_neg(lm))
        if xm:
            common = []
            for v, e in xm:
                g = min(dict(m[0]).get(v, 0) for m in num)
                g = min(g, e)
                if g:
                    common.append((v, g))
            if common:
                neg = tuple((v, -g) for v, g in common)
                num = {(_merge_x(m[0], neg), m[1]): c2 for m, c2 in num.items()}
                xm = _merge_x(xm, neg)
        return num, {(xm, ()): Fraction(1)}
    # multi-term denominator: make the leading term 1 * exp(0) * x^a
    xs, es = _pvars(den)
    xvars, evars = sorted(xs), sorted(es)
    lead = max(den, key=lambda m: _dense_key(m, xvars, evars))
    c = den[lead]
    lin = _lin_neg(lead[1])
    inv = 1 / c
    return _pscale(num, inv, lin), _pscale(den, inv, lin)


def _coerce(x) -> "Scalar":
    if isinstance(x, Scalar):
        return x
    if isinstance(x, (int, Fraction)):
        return Scalar.const(x)
    if isinstance(x, str):
        from .parse import parse_scalar

        return parse_scalar(x)
    return NotImplemented


class Scalar:
    """Immutable exact function built from coordinates, rationals and exp(linear form)."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Poly, den: Poly | None = None, _canon=False):
        if den is None:
            den = {ONE_MONO: Fraction(1)}
        if not _canon:
            num, den = _canonical(num, den)
        self.num = num
        self.den = den
        self._hash = None

    # constructors ---------------------------------------------------------
    @classmethod
    def const(cls, value) -> "Scalar":
        value = Fraction(value)
        if not value:
            return cls({}, None, _canon=True)
        return cls({ONE_MONO: value}, None, _canon=True)

    @classmethod
    def var(cls, name: str) -> "Scalar":
        return cls({(((name, 1),), ()): Fraction(1)}, None, _canon=True)

    @classmethod
    def exp(cls, linform: Mapping[str, Fraction]) -> "Scalar":
        lin = tuple(sorted((v, Fraction(c)) for v, c in linform.items() if c))
        return cls({((), lin): Fraction(1)}, None, _canon=True)

    # predicates -----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num

    def is_constant(self) -> bool:
        return not self.num or (len(self.num) == 1 and ONE_MONO in self.num and _is_one(self.den))

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not a rational constant")
        return self.num.get(ONE_MONO, Fraction(0))

    def is_polynomial(self) -> bool:
        return _is_one(self.den)

    def is_unit(self) -> bool:
        """Nonzero rational times a single exp-monomial: nowhere vanishing by construction."""
        if not _is_one(self.den) or len(self.num) != 1:
            return False
        (xm, _), = self.num
        return not xm

    def has_exp(self) -> bool:
        return any(m[1] for p in (self.num, self.den) for m in p)

    def variables(self) -> frozenset:
        xs1, es1 = _pvars(self.num)
        xs2, es2 = _pvars(self.den)
        return frozenset(xs1 | es1 | xs2 | es2)

    def linear_form(self) -> Dict[str, Fraction]:
        """Coefficients of a homogeneous linear polynomial; raises ValueError otherwise."""
        if not self.is_polynomial():
            raise ValueError("not a polynomial")
        out = {}
        for (xm, lm), c in self.num.items():
            if lm or len(xm) != 1 or xm[0][1] != 1:
                raise ValueError("not a homogeneous linear form")
            out[xm[0][0]] = c
        return out

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            if _is_one(self.den):
                return Scalar(_padd(self.num, other.num), self.den, _canon=True)
            return Scalar(_padd(self.num, other.num), self.den)
        num = _padd(_pmul(self.num, other.den), _pmul(other.num, self.den))
        return Scalar(num, _pmul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return Scalar({m: -c for m, c in self.num.items()}, self.den, _canon=True)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if not self.num or not other.num:
            return ZERO
        if _is_one(self.den) and _is_one(other.den):
            return Scalar(_pmul(self.num, other.num), self.den, _canon=True)
        return Scalar(_pmul(self.num, other.num), _pmul(self.den, other.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if not other.num:
            raise ZeroDivisionError("division by the zero scalar")
        return Scalar(_pmul(self.num, other.den), _pmul(self.den, other.num))

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("only integer powers are supported")
        if k < 0:
            return ONE / (self ** (-k))
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((frozenset(self.num.items()), frozenset(self.den.items())))
        return self._hash

    # calculus -------------------------------------------------------------
    def diff(self, var: str) -> "Scalar":
        dn = _pdiff(self.num, var)
        if _is_one(self.den):
            return Scalar(dn, self.den, _canon=True) if dn else ZERO
        dd = _pdiff(self.den, var)
        num = _padd(_pmul(dn, self.den), _pmul(self.num, dd), sign=-1)
        return Scalar(num, _pmul(self.den, self.den))

    def subs(self, mapping: Mapping[str, "Scalar"]) -> "Scalar":
        """Simultaneous substitution of variables by scalars.

        An exponential ``exp(l)`` survives only if ``l`` composed with the
        substitution is again a homogeneous linear form.
        """
        mapping = {k: _coerce(v) for k, v in mapping.items()}
        if not mapping:
            return self
        return _psubs(self.num, mapping) / _psubs(self.den, mapping)

    def evaluate(self, point: Mapping[str, Fraction]) -> Fraction:
        missing = self.variables() - set(point)
        if missing:
            raise EvaluationError(f"unassigned variables: {', '.join(sorted(missing))}")
        d = _peval(self.den, point)
        if d == 0:
            raise PoleError(f"denominator vanishes at {_fmt_point(point)}")
        return _peval(self.num, point) / d

    def specialize(self, point: Mapping[str, Fraction]) -> "Scalar":
        """Exact value at a rational point, exponentials kept as powers of e.

        The result only involves the reserved variable ``TRANSCENDENTAL``; it is
        zero iff the value is zero, because ``e`` is transcendental.
        """
        missing = self.variables() - set(point) - {TRANSCENDENTAL}
        if missing:
            raise EvaluationError(f"unassigned variables: {', '.join(sorted(missing))}")
        den = _pspecialize(self.den, point)
        if not den:
            raise PoleError(f"denominator vanishes at {_fmt_point(point)}")
        return Scalar(_pspecialize(self.num, point), den)

    # printing -------------------------------------------------------------
    def __str__(self):
        n = _pstr(self.num)
        if _is_one(self.den):
            return n
        d = _pstr(self.den)
        if len(self.num) > 1:
            n = f"({n})"
        if len(self.den) > 1 or self.den[next(iter(self.den))] != 1 or _mono_factor_count(self.den) > 1:
            d = f"({d})"
        return f"{n}/{d}"

    def __repr__(self):
        return f"Scalar({str(self)!r})"


def _mono_factor_count(p: Poly) -> int:
    (xm, lm), = p
    return sum(1 for _ in xm) + (1 if lm else 0)


def _pdiff(p: Poly, var: str) -> Poly:
    out: Poly = {}
    for (xm, lm), c in p.items():
        xd = dict(xm)
        e = xd.get(var, 0)
        if e:
            nx = dict(xd)
            if e == 1:
                del nx[var]
            else:
                nx[var] = e - 1
            m = (tuple(sorted(nx.items())), lm)
            w = out.get(m, 0) + c * e
            if w:
                out[m] = w
            else:
                out.pop(m, None)
        k = dict(lm).get(var, 0)
        if k:
            m = (xm, lm)
            w = out.get(m, 0) + c * k
            if w:
                out[m] = w
            else:
                out.pop(m, None)
    return out


def _psubs(p: Poly, mapping) -> Scalar:
    total = ZERO
    powers: dict = {}
    for (xm, lm), c in p.items():
        term = Scalar.const(c)
        rest_x = []
        for v, e in xm:
            if v in mapping:
                key = (v, e)
                if key not in powers:
                    powers[key] = mapping[v] ** e
                term = term * powers[key]
            else:
                rest_x.append((v, e))
        lin: Dict[str, Fraction] = {}
        for v, k in lm:
            if v in mapping:
                try:
                    sub = mapping[v].linear_form()
                except ValueError:
                    raise EvaluationError(
                        f"exp argument becomes non-linear after substituting {v} -> {mapping[v]}"
                    ) from None
                for w, kw in sub.items():
                    lin[w] = lin.get(w, 0) + k * kw
            else:
                lin[v] = lin.get(v, 0) + k
        lin = {v: k for v, k in lin.items() if k}
        mono = Scalar({(tuple(rest_x), tuple(sorted(lin.items()))): Fraction(1)}, None, _canon=True)
        total = total + term * mono
    return total


def _peval(p: Poly, point) -> Fraction:
    total = Fraction(0)
    for (xm, lm), c in p.items():
        arg = sum((k * Fraction(point[v]) for v, k in lm), Fraction(0))
        if arg:
            raise EvaluationError(f"exp({arg}) is not a rational number")
        val = c
        for v, e in xm:
            val *= Fraction(point[v]) ** e
        total += val
    return total


def _pspecialize(p: Poly, point) -> Poly:
    out: Poly = {}
    for (xm, lm), c in p.items():
        val = c
        for v, e in xm:
            val *= Fraction(point[v]) ** e
        if not val:
            continue
        arg = Fraction(0)
        for v, k in lm:
            arg += k if v == TRANSCENDENTAL else k * Fraction(point[v])
        m = ((), ((TRANSCENDENTAL, arg),) if arg else ())
        w = out.get(m, 0) + val
        if w:
            out[m] = w
        else:
            out.pop(m, None)
    return out


def _fmt_frac(c: Fraction) -> str:
    return str(c)


def _fmt_lin(lm: LinPart) -> str:
    if len(lm) == 1 and lm[0][0] == TRANSCENDENTAL:
        return str(lm[0][1])
    parts = []
    for i, (v, k) in enumerate(lm):
        sign = "-" if k < 0 else "+"
        a = abs(k)
        body = v if a == 1 else f"{a}*{v}"
        if i == 0:
            parts.append(body if sign == "+" else f"-{body}")
        else:
            parts.append(f" {sign} {body}")
    return "".join(parts)


def _mono_str(m: Mono) -> str:
    xm, lm = m
    factors = [v if e == 1 else f"{v}^{e}" for v, e in xm]
    if lm:
        factors.append(f"exp({_fmt_lin(lm)})")
    return "*".join(factors)


def _order_key(m: Mono):
    # graded by total x-degree, then reverse-lex over names; deterministic across runs
    xm, lm = m
    return (sum(e for _, e in xm), tuple((v, -e) for v, e in xm), tuple((v, -k) for v, k in lm))


def _pstr(p: Poly) -> str:
    if not p:
        return "0"
    terms = sorted(p.items(), key=lambda mc: _order_key(mc[0]), reverse=True)
    out = []
    for i, (m, c) in enumerate(terms):
        body = _mono_str(m)
        a = abs(c)
        if not body:
            txt = str(a)
        elif a == 1:
            txt = body
        else:
            txt = f"{a}*{body}"
        if i == 0:
            out.append(txt if c > 0 else f"-{txt}")
        else:
            out.append(f" {'+' if c > 0 else '-'} {txt}")
    return "".join(out)


def _fmt_point(point) -> str:
    return "{" + ", ".join(f"{k}: {point[k]}" for k in sorted(point)) + "}"


ZERO = Scalar({}, None, _canon=True)
ONE = Scalar({ONE_MONO: Fraction(1)}, None, _canon=True)


def var(name: str) -> Scalar:
    return Scalar.var(name)


def const(value) -> Scalar:
    return Scalar.const(value)


def exp(linform) -> Scalar:
    """``exp`` of a linear form given as a mapping or as a linear Scalar."""
    if isinstance(linform, Scalar):
        linform = linform.linear_form()
    return Scalar.exp(linform)


def as_scalar(x) -> Scalar:
    s = _coerce(x)
    if s is NotImplemented:
        raise TypeError(f"cannot interpret {x!r} as a Scalar")
    return s


def differentiate(s: Scalar, v: str) -> Scalar:
    return as_scalar(s).diff(v)


def is_zero(s) -> bool:
    return as_scalar(s).is_zero()


def evaluate(s, point: Mapping[str, Fraction]) -> Fraction:
    return as_scalar(s).evaluate(point)


def sum_scalars(items: Iterable[Scalar]) -> Scalar:
    total = ZERO
    for it in items:
        total = total + it
    return total
