"""Polynomials in the formal even variables l, m, n, k (lambda, mu, nu, kappa)
stored in the divided-power basis.

A DPoly maps exponent vectors over the fixed variable tuple (l, m, n, k) to
coefficients; the term with exponents (a, b, 0, 0) means
coeff * l^{(a)} * m^{(b)} where x^{(n)} := x^n / n!.  Multiplication therefore
follows x^{(a)} x^{(b)} = binom(a+b, a) x^{(a+b)}, which keeps every bracket
table of the package integral.

Coefficients are duck-typed: Scalar, Fraction, or RElem all work.  A
coefficient must support +, unary -, * by Scalar/Fraction and truthiness;
substitutions involving T additionally require a tshift_div(j) method (T
acting from the left as a divided power), which RElem provides.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import Scalar, binom

VARS = ("l", "m", "n", "k")
_VAR_INDEX = {v: i for i, v in enumerate(VARS)}
ZERO_EXPS = (0, 0, 0, 0)


class Bound:
    """Integration bound: 0, +-variable, or +-T."""

    __slots__ = ("kind", "var", "sign")

    def __init__(self, kind, var=None, sign=1):
        self.kind = kind  # "zero" | "var" | "T"
        self.var = var
        self.sign = sign

    @staticmethod
    def parse(text) -> "Bound":
        if isinstance(text, Bound):
            return text
        s = str(text).strip()
        sign = 1
        if s.startswith("-"):
            sign = -1
            s = s[1:]
        if s == "0":
            return Bound("zero")
        if s == "T":
            return Bound("T", sign=sign)
        if s in _VAR_INDEX:
            return Bound("var", var=s, sign=sign)
        raise ValueError(f"unsupported bound expression: {text!r}")

    def as_subst(self) -> "Subst":
        if self.kind == "zero":
            return Subst({})
        if self.kind == "var":
            return Subst({self.var: Fraction(self.sign)})
        return Subst({}, t=Fraction(self.sign))


class Subst:
    """Affine substitution target: sum of rational multiples of variables
    plus a rational multiple of T (acting on coefficients from the left)."""

    __slots__ = ("vars", "t")

    def __init__(self, vars: dict, t=Fraction(0)):
        self.vars = {v: Fraction(c) for v, c in vars.items() if c}
        self.t = Fraction(t)
        for v in self.vars:
            if v not in _VAR_INDEX:
                raise ValueError(f"unknown variable {v!r}")

    def parts(self):
        out = [("var", v, c) for v, c in sorted(self.vars.items())]
        if self.t:
            out.append(("T", None, self.t))
        return out


def _merge_exps(e1, e2):
    """Combine divided-power monomials; returns (exps, Fraction factor)."""
    factor = Fraction(1)
    out = []
    for a, b in zip(e1, e2):
        out.append(a + b)
        if a and b:
            factor *= binom(a + b, a)
    return tuple(out), factor


class DPoly:
    """Divided-power polynomial over a coefficient ring."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for exps, c in terms.items():
                if c:
                    self.terms[tuple(exps)] = c

    @staticmethod
    def constant(coeff) -> "DPoly":
        return DPoly({ZERO_EXPS: coeff})

    @staticmethod
    def variable(var: str, coeff, power: int = 1) -> "DPoly":
        exps = [0, 0, 0, 0]
        exps[_VAR_INDEX[var]] = power
        return DPoly({tuple(exps): coeff})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return isinstance(other, DPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset((e, hash(c)) for e, c in self.terms.items()))

    def __add__(self, other):
        t = dict(self.terms)
        for exps, c in other.terms.items():
            s = t.get(exps)
            if s is None:
                t[exps] = c
            else:
                s = s + c
                if s:
                    t[exps] = s
                else:
                    del t[exps]
        out = DPoly.__new__(DPoly)
        out.terms = t
        return out

    def __neg__(self):
        out = DPoly.__new__(DPoly)
        out.terms = {e: -c for e, c in self.terms.items()}
        return out

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "DPoly":
        if not s:
            return DPoly()
        out = DPoly.__new__(DPoly)
        out.terms = {e: c * s for e, c in self.terms.items()}
        return out

    def mul_monomial(self, var: str, power: int, s=1) -> "DPoly":
        """Multiply by s * var^{(power)}."""
        if power == 0:
            return self.scale(s) if s != 1 else self
        shift = [0, 0, 0, 0]
        shift[_VAR_INDEX[var]] = power
        shift = tuple(shift)
        t = {}
        for exps, c in self.terms.items():
            new, factor = _merge_exps(exps, shift)
            if s != 1:
                factor = factor * s
            c = c * factor
            if c:
                prev = t.get(new)
                t[new] = c if prev is None else prev + c
        out = DPoly.__new__(DPoly)
        out.terms = {e: c for e, c in t.items() if c}
        return out

    def __mul__(self, other: "DPoly") -> "DPoly":
        """Full product; requires coefficients that multiply together."""
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exps, factor = _merge_exps(e1, e2)
                c = (c1 * c2) * factor
                if c:
                    prev = t.get(exps)
                    if prev is None:
                        t[exps] = c
                    else:
                        prev = prev + c
                        if prev:
                            t[exps] = prev
                        else:
                            del t[exps]
        out = DPoly.__new__(DPoly)
        out.terms = t
        return out

    # -- structure ---------------------------------------------------------

    def degree_in(self, var: str) -> int:
        i = _VAR_INDEX[var]
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def coefficient(self, **var_powers):
        """Coefficient of the full monomial prod var^{(power)}; zero if absent.

        Variables not mentioned must have exponent 0 in the term.
        """
        exps = [0, 0, 0, 0]
        for v, p in var_powers.items():
            exps[_VAR_INDEX[v]] = p
        return self.terms.get(tuple(exps))

    def coefficients_in(self, var: str):
        """Split as a polynomial in var: yields (power, DPoly in other vars)."""
        i = _VAR_INDEX[var]
        buckets = {}
        for exps, c in self.terms.items():
            p = exps[i]
            rest = list(exps)
            rest[i] = 0
            buckets.setdefault(p, {})[tuple(rest)] = c
        for p in sorted(buckets):
            yield p, DPoly(buckets[p])

    def map_coefficients(self, fn) -> "DPoly":
        t = {}
        for exps, c in self.terms.items():
            c = fn(c)
            if c:
                t[exps] = c
        out = DPoly.__new__(DPoly)
        out.terms = t
        return out

    # -- substitution and integration ---------------------------------------

    def substitute(self, assignment: dict) -> "DPoly":
        """Substitute variables by affine combinations of variables and T.

        assignment maps variable names to Subst objects (or dicts var->coeff).
        Unmentioned variables stay fixed.  T parts act on coefficients from
        the left via tshift_div.
        """
        assignment = {
            v: (s if isinstance(s, Subst) else Subst(s)) for v, s in assignment.items()
        }
        result = DPoly()
        for exps, c in self.terms.items():
            # entries: (exps, tpow, Fraction factor)
            entries = [(ZERO_EXPS, 0, Fraction(1))]
            for i, e in enumerate(exps):
                if not e:
                    continue
                var = VARS[i]
                if var not in assignment:
                    shift = [0, 0, 0, 0]
                    shift[i] = e
                    expansion = [(tuple(shift), 0, Fraction(1))]
                else:
                    expansion = _expand_power(assignment[var], e)
                entries = _combine(entries, expansion)
            for exps2, tpow, factor in entries:
                if tpow:
                    try:
                        c2 = c.tshift_div(tpow)
                    except AttributeError:
                        raise TypeError(
                            "substitution involving T needs coefficients with "
                            "a T action (tshift_div)"
                        ) from None
                else:
                    c2 = c
                c2 = c2 * factor
                if c2:
                    result = result + DPoly({exps2: c2})
        return result

    def antiderivative(self, var: str) -> "DPoly":
        i = _VAR_INDEX[var]
        t = {}
        for exps, c in self.terms.items():
            new = list(exps)
            new[i] += 1
            t[tuple(new)] = c
        out = DPoly.__new__(DPoly)
        out.terms = t
        return out

    # -- printing ----------------------------------------------------------

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]))

    def render(self, coeff_str=str) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.sorted_terms():
            factors = []
            cs = coeff_str(c)
            if any(exps) and cs == "1":
                pass
            else:
                factors.append(f"({cs})" if (" + " in cs or " - " in cs) else cs)
            for i, e in enumerate(exps):
                if e == 1:
                    factors.append(VARS[i])
                elif e > 1:
                    factors.append(f"{VARS[i]}^({e})")
            parts.append("*".join(factors) if factors else cs)
        return " + ".join(parts)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"DPoly({self})"


def _expand_power(subst: Subst, e: int):
    """Divided power subst^{(e)} as entries (exps, tpow, factor).

    Uses (x + y)^{(e)} = sum x^{(i)} y^{(e-i)}: no multinomial coefficients
    appear in the divided-power basis.
    """
    entries = [(ZERO_EXPS, 0, Fraction(1))]
    remaining = subst.parts()
    # distribute e among the parts; last part takes the rest
    def rec(idx, left, exps, tpow, factor, out):
        if idx == len(remaining):
            if left == 0:
                out.append((exps, tpow, factor))
            return
        kind, var, coef = remaining[idx]
        for take in range(left + 1):
            f = factor * coef**take
            if kind == "var":
                shift = [0, 0, 0, 0]
                shift[_VAR_INDEX[var]] = take
                new_exps, merge = _merge_exps(exps, tuple(shift))
                rec(idx + 1, left - take, new_exps, tpow, f * merge, out)
            else:  # T part: divided powers of T also merge with binomials
                merge = binom(tpow + take, take) if (tpow and take) else Fraction(1)
                rec(idx + 1, left - take, exps, tpow + take, f * merge, out)

    out = []
    rec(0, e, ZERO_EXPS, 0, Fraction(1), out)
    if not remaining:
        # substitution by 0: only e == 0 survives, handled by caller loop
        return out
    return out


def _combine(entries1, entries2):
    out = []
    for e1, t1, f1 in entries1:
        for e2, t2, f2 in entries2:
            exps, merge = _merge_exps(e1, e2)
            tmerge = binom(t1 + t2, t1) if (t1 and t2) else Fraction(1)
            out.append((exps, t1 + t2, f1 * f2 * merge * tmerge))
    return out


def formal_integral(p: DPoly, var: str, lower, upper) -> DPoly:
    """Definite formal integral over var between the given bounds.

    Bounds are drawn from 0, +-(another variable), and +-T; the integrand is
    antidifferentiated in the divided-power basis and evaluated between the
    bounds, eliminating var.  T bounds leave T acting on the coefficients
    from the left.
    """
    lower = Bound.parse(lower)
    upper = Bound.parse(upper)
    anti = p.antiderivative(var)
    at_upper = anti.substitute({var: upper.as_subst()})
    at_lower = anti.substitute({var: lower.as_subst()})
    return at_upper - at_lower
