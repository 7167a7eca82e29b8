"""Exact ground-ring arithmetic: polynomials over Q in named parameters.

A Scalar is a multivariate polynomial with Fraction coefficients in formal
parameters such as c or k.  These are the only scalars used anywhere in the
package; there is no floating point.  Parameters are polynomial
indeterminates only: dividing by anything that is not a nonzero rational
constant raises.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

# A monomial is a sorted tuple of (parameter name, exponent) pairs with
# positive exponents; the empty tuple is the constant monomial.
Monomial = tuple


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for name, e in m2:
        d[name] = d.get(name, 0) + e
    return tuple(sorted(d.items()))


def _mono_key(m: Monomial):
    # graded lexicographic: total degree first, then the exponent sequence
    return (sum(e for _, e in m), m)


class Scalar:
    """Immutable polynomial in Q[parameters], stored as monomial -> Fraction."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        t = {}
        if terms:
            for m, c in terms.items():
                if c:
                    t[m] = c if isinstance(c, Fraction) else Fraction(c)
        self.terms = t
        self._hash = None

    # -- constructors ------------------------------------------------------

    @staticmethod
    def rational(value) -> "Scalar":
        f = value if isinstance(value, Fraction) else Fraction(value)
        return Scalar({(): f} if f else {})

    @staticmethod
    def param(name: str) -> "Scalar":
        return Scalar({((name, 1),): Fraction(1)})

    @staticmethod
    def coerce(value) -> "Scalar":
        if isinstance(value, Scalar):
            return value
        return Scalar.rational(value)

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def constant_value(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_constant():
            raise ValueError(f"not a constant: {self}")
        return self.terms[()]

    def parameters(self) -> set:
        names = set()
        for m in self.terms:
            for name, _ in m:
                names.add(name)
        return names

    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e for _, e in m) for m in self.terms)

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        other = Scalar.coerce(other)
        if not self.terms:
            return other
        if not other.terms:
            return self
        t = dict(self.terms)
        for m, c in other.terms.items():
            s = t.get(m)
            if s is None:
                t[m] = c
            else:
                s = s + c
                if s:
                    t[m] = s
                else:
                    del t[m]
        out = Scalar.__new__(Scalar)
        out.terms = t
        out._hash = None
        return out

    __radd__ = __add__

    def __neg__(self):
        out = Scalar.__new__(Scalar)
        out.terms = {m: -c for m, c in self.terms.items()}
        out._hash = None
        return out

    def __sub__(self, other):
        return self + (-Scalar.coerce(other))

    def __rsub__(self, other):
        return Scalar.coerce(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return ZERO
            if other == 1:
                return self
            out = Scalar.__new__(Scalar)
            out.terms = {m: c * other for m, c in self.terms.items()}
            out._hash = None
            return out
        other = Scalar.coerce(other)
        if not self.terms or not other.terms:
            return ZERO
        t = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                s = t.get(m)
                t[m] = c1 * c2 if s is None else s + c1 * c2
        out = Scalar.__new__(Scalar)
        out.terms = {m: c for m, c in t.items() if c}
        out._hash = None
        return out

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers of scalars are not defined")
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __truediv__(self, other):
        """Division by a nonzero rational constant only."""
        if isinstance(other, Scalar):
            other = other.constant_value()
        f = Fraction(other)
        if not f:
            raise ZeroDivisionError("division of Scalar by zero")
        return self * (1 / f)

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == Scalar.rational(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # -- substitution ------------------------------------------------------

    def substitute(self, assignment: dict) -> "Scalar":
        """Replace parameters by Scalars (or rationals); others are kept."""
        out = ZERO
        for m, c in self.terms.items():
            term = Scalar.rational(c)
            for name, e in m:
                if name in assignment:
                    term = term * Scalar.coerce(assignment[name]) ** e
                else:
                    term = term * Scalar.param(name) ** e
            out = out + term
        return out

    # -- printing ----------------------------------------------------------

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: _mono_key(kv[0]))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            factors = []
            neg = m and c == -1
            if not m or (c != 1 and not neg):
                factors.append(str(c))
            for name, e in m:
                factors.append(name if e == 1 else f"{name}^{e}")
            parts.append(("-" if neg else "") + "*".join(factors))
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"Scalar({self})"


ZERO = Scalar()
ONE = Scalar.rational(1)


_binom_cache = {}


def binom(a, n: int):
    """Generalized binomial coefficient binom(a, n) for rational a, integer n.

    Defined as (1/n!) * prod_{i=0}^{n-1} (a - i) for n >= 0 and as 0 for
    n < 0.  Satisfies the Pascal rule binom(a+1,n) = binom(a,n-1) + binom(a,n)
    and the negation rule binom(a,n) = (-1)^n binom(n-a-1,n).  Integer
    arguments give int results (memoized); rational ones give Fractions.
    """
    if n < 0:
        return 0
    key = (a, n)
    hit = _binom_cache.get(key)
    if hit is not None:
        return hit
    if isinstance(a, int) or (isinstance(a, Fraction) and a.denominator == 1):
        a_int = int(a)
        if a_int >= 0:
            val = comb(a_int, n) if n <= a_int else 0
        else:
            # binom(a, n) = (-1)^n binom(n - a - 1, n)
            val = (-1) ** (n & 1) * comb(n - a_int - 1, n)
    else:
        a = a if isinstance(a, Fraction) else Fraction(a)
        num = Fraction(1)
        for i in range(n):
            num *= a - i
        val = num / factorial(n)
        if val.denominator == 1:
            val = int(val)
    _binom_cache[key] = val
    return val


def binom_scalar(a, n: int) -> Scalar:
    return Scalar.rational(binom(a, n))


def divided_power_factor(i: int, j: int) -> Fraction:
    """Coefficient in x^{(i)} * x^{(j)} = binom(i+j, i) x^{(i+j)}."""
    return binom(i + j, i)


@dataclass
class BinomialIdentityReport:
    """Outcome of exhaustively checking the two binomial-sum identities."""

    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def check_binomial_identities(n_max: int, m_max: int) -> BinomialIdentityReport:
    """Verify two classical alternating binomial sums exactly.

    (i)  sum_{i=0}^n (-1)^i binom(n,i)/(m+i) = n! / prod_{i=0}^n (m+i)
         for 0 <= n <= n_max, 1 <= m <= m_max.
    (ii) sum_{i=0}^n (-1)^i binom(m+i,i) binom(m+n+1,n-i) = 1
         for 0 <= n <= n_max, 0 <= m <= m_max.
    """
    report = BinomialIdentityReport()
    for n in range(n_max + 1):
        for m in range(1, m_max + 1):
            lhs = sum(
                Fraction((-1) ** i * binom(n, i), m + i) for i in range(n + 1)
            )
            rhs = Fraction(factorial(n))
            for i in range(n + 1):
                rhs /= m + i
            report.checked += 1
            if lhs != rhs:
                report.failures.append(("i", n, m, str(lhs), str(rhs)))
    for n in range(n_max + 1):
        for m in range(m_max + 1):
            lhs = sum(
                (-1) ** i * binom(m + i, i) * binom(m + n + 1, n - i)
                for i in range(n + 1)
            )
            report.checked += 1
            if lhs != 1:
                report.failures.append(("ii", n, m, str(lhs), "1"))
    return report
