"""Exact linear algebra over the fraction field of the scalar ring.

Vectors are dicts column-key -> Scalar.  A LinearSpan holds a reduced row
echelon basis over Frac (rational functions of the parameters) and answers
membership queries and canonical representatives modulo the span; pivots are
chosen in a caller-supplied column order so quotient bases are deterministic.

Polynomial gcd cancellation is performed for rational constants and for
polynomials in a single common parameter; other fractions are only
normalized by rational content, which is enough for the low-degree
parameter polynomials that arise here.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import Scalar


def _univar(s: Scalar):
    """(name, coeff list) when s is a polynomial in one parameter, else None."""
    names = s.parameters()
    if len(names) > 1:
        return None
    name = names.pop() if names else None
    deg = 0
    for m in s.terms:
        if m:
            deg = max(deg, m[0][1])
    coeffs = [Fraction(0)] * (deg + 1)
    for m, c in s.terms.items():
        coeffs[m[0][1] if m else 0] = c
    return name, coeffs


def _poly_mod(a, b):
    a = a[:]
    db, lb = len(b) - 1, b[-1]
    while len(a) - 1 >= db and any(a):
        while a and not a[-1]:
            a.pop()
        if len(a) - 1 < db:
            break
        q = a[-1] / lb
        shift = len(a) - 1 - db
        for i, bc in enumerate(b):
            a[i + shift] -= q * bc
        a.pop()
    while a and not a[-1]:
        a.pop()
    return a


def _poly_gcd(a, b):
    a, b = a[:], b[:]
    while b and any(b):
        a, b = b, _poly_mod(a, b)
    return a


def scalar_gcd(a: Scalar, b: Scalar) -> Scalar:
    """gcd up to rational multiples; exact for constants and for univariate
    polynomials over a shared parameter, 1 otherwise."""
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    ua, ub = _univar(a), _univar(b)
    if ua is None or ub is None:
        return Scalar.rational(1)
    na, ca = ua
    nb, cb = ub
    if na is not None and nb is not None and na != nb:
        return Scalar.rational(1)
    name = na or nb
    g = _poly_gcd(ca, cb)
    if not g:
        return Scalar.rational(1)
    lead = g[-1]
    out = Scalar()
    for i, c in enumerate(g):
        if c:
            mono = ((name, i),) if i else ()
            out = out + Scalar({mono: c / lead})
    return out


def exact_div(a: Scalar, b: Scalar) -> Scalar:
    """Exact quotient a / b in the polynomial ring; raises if not exact."""
    if b.is_zero():
        raise ZeroDivisionError("exact_div by zero")
    if b.is_constant():
        return a / b.constant_value()
    names = sorted(a.parameters() | b.parameters())

    def key(m):
        exps = dict(m)
        return (sum(exps.values()), tuple(exps.get(n, 0) for n in names))

    rem = a
    quo = Scalar()
    bl = max(b.terms, key=key)
    blc = b.terms[bl]
    bld = dict(bl)
    while not rem.is_zero():
        rl = max(rem.terms, key=key)
        rld = dict(rl)
        if any(rld.get(n, 0) < e for n, e in bld.items()):
            raise ArithmeticError("division is not exact")
        qm = tuple(
            sorted((n, e) for n, e in
                   ((n, rld.get(n, 0) - bld.get(n, 0)) for n in rld) if e)
        )
        qt = Scalar({qm: rem.terms[rl] / blc})
        quo = quo + qt
        rem = rem - qt * b
    return quo


class Frac:
    """Fraction num/den of Scalars with lightweight normalization."""

    __slots__ = ("num", "den")

    def __init__(self, num: Scalar, den: Scalar | None = None):
        num = Scalar.coerce(num)
        den = Scalar.rational(1) if den is None else Scalar.coerce(den)
        if den.is_zero():
            raise ZeroDivisionError("Frac with zero denominator")
        if num.is_zero():
            den = Scalar.rational(1)
        else:
            g = scalar_gcd(num, den)
            if not g.is_constant() or g.constant_value() != 1:
                try:
                    num, den = exact_div(num, g), exact_div(den, g)
                except ArithmeticError:
                    pass
            if den.is_constant():
                num = num / den.constant_value()
                den = Scalar.rational(1)
        self.num, self.den = num, den

    def is_zero(self):
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def __add__(self, other):
        other = other if isinstance(other, Frac) else Frac(other)
        if self.den == other.den:
            return Frac(self.num + other.num, self.den)
        return Frac(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other):
        other = other if isinstance(other, Frac) else Frac(other)
        return self + (-other)

    def __neg__(self):
        out = Frac.__new__(Frac)
        out.num, out.den = -self.num, self.den
        return out

    def __mul__(self, other):
        other = other if isinstance(other, Frac) else Frac(other)
        return Frac(self.num * other.num, self.den * other.den)

    def __truediv__(self, other):
        other = other if isinstance(other, Frac) else Frac(other)
        if other.is_zero():
            raise ZeroDivisionError
        return Frac(self.num * other.den, self.den * other.num)

    def __eq__(self, other):
        if not isinstance(other, Frac):
            other = Frac(Scalar.coerce(other))
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __str__(self):
        if self.den == Scalar.rational(1):
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"Frac({self})"


def as_frac_vec(vec: dict) -> dict:
    return {k: v if isinstance(v, Frac) else Frac(Scalar.coerce(v)) for k, v in vec.items()}


class LinearSpan:
    """Row space over Frac with reduced echelon rows and ordered pivots."""

    def __init__(self, column_order):
        self.column_order = list(column_order)
        self._colpos = {c: i for i, c in enumerate(self.column_order)}
        self.rows = []  # list of (pivot_col, {col: Frac}) with Frac 1 pivot

    @property
    def rank(self) -> int:
        return len(self.rows)

    def pivot_columns(self):
        return [p for p, _ in self.rows]

    def reduce(self, vec: dict) -> dict:
        """Canonical representative of vec modulo the span (exact)."""
        v = {k: c for k, c in as_frac_vec(vec).items() if c}
        for pivot, row in self.rows:
            c = v.get(pivot)
            if not c:
                continue
            for col, rc in row.items():
                cur = v.get(col, _FZERO) - c * rc
                if cur:
                    v[col] = cur
                elif col in v:
                    del v[col]
        return v

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)

    def add(self, vec: dict) -> bool:
        """Insert a vector; returns True when it enlarged the span."""
        v = self.reduce(vec)
        if not v:
            return False
        pivot = min(v, key=lambda c: self._colpos[c])
        inv = v[pivot]
        row = {col: c / inv for col, c in v.items()}
        # back-substitute into existing rows to keep the basis reduced;
        # row has no support on existing pivots, so their entries survive
        new_rows = []
        for p, r in self.rows:
            c = r.get(pivot)
            if c:
                r = {
                    col: val
                    for col, val in (
                        (col, r.get(col, _FZERO) - c * row.get(col, _FZERO))
                        for col in set(r) | set(row)
                    )
                    if val
                }
            new_rows.append((p, r))
        new_rows.append((pivot, row))
        new_rows.sort(key=lambda pr: self._colpos[pr[0]])
        self.rows = new_rows
        return True

    def extend(self, vectors) -> None:
        for vec in vectors:
            self.add(vec)


_FZERO = Frac(Scalar())
