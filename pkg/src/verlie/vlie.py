"""Vertex Lie algebra presentations and the lambda-bracket engine.

A presentation consists of generators (each with a parity and a weight),
central symbols, and a bracket table giving [a_l b] for generator pairs as a
divided-power polynomial in l with RElem coefficients.  The engine extends
the table to the whole free K[T]-module R = E[T] (+) K using the two axioms

    [Ta _l b] = -l [a _l b]      and      [a _l Tb] = (T + l)[a _l b],

and verifies conformal skew-symmetry, the conformal Jacobi identity, and
morphism conditions as exact polynomial identities over the parameters.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

from .dpoly import DPoly, Subst
from .scalars import Scalar, binom

EVEN = 0
ODD = 1

_PARITY_NAMES = {"even": EVEN, "odd": ODD, EVEN: EVEN, ODD: ODD}


class VLieError(Exception):
    pass


class BracketUndefined(VLieError):
    """Raised when a generator pair is missing from the bracket table."""


class RElem:
    """Element of R = E[T] (+) K: generator terms (name, T-power) -> Scalar
    plus central terms name -> Scalar.  T-powers are stored plain (not as
    divided powers); T annihilates the central part."""

    __slots__ = ("gens", "centrals", "_hash")

    def __init__(self, gens=None, centrals=None):
        self.gens = {}
        self.centrals = {}
        if gens:
            for key, s in gens.items():
                s = Scalar.coerce(s)
                if s:
                    self.gens[key] = s
        if centrals:
            for name, s in centrals.items():
                s = Scalar.coerce(s)
                if s:
                    self.centrals[name] = s
        self._hash = None

    @staticmethod
    def gen(name: str, tpow: int = 0, coeff=1) -> "RElem":
        return RElem({(name, tpow): Scalar.coerce(coeff)})

    @staticmethod
    def central(name: str, coeff=1) -> "RElem":
        return RElem(centrals={name: Scalar.coerce(coeff)})

    @staticmethod
    def zero() -> "RElem":
        return RElem()

    def is_zero(self) -> bool:
        return not self.gens and not self.centrals

    def __bool__(self):
        return bool(self.gens) or bool(self.centrals)

    def __add__(self, other):
        g = dict(self.gens)
        for key, s in other.gens.items():
            prev = g.get(key)
            if prev is None:
                g[key] = s
            else:
                prev = prev + s
                if prev:
                    g[key] = prev
                else:
                    del g[key]
        z = dict(self.centrals)
        for name, s in other.centrals.items():
            prev = z.get(name)
            if prev is None:
                z[name] = s
            else:
                prev = prev + s
                if prev:
                    z[name] = prev
                else:
                    del z[name]
        out = RElem.__new__(RElem)
        out.gens, out.centrals, out._hash = g, z, None
        return out

    def __neg__(self):
        out = RElem.__new__(RElem)
        out.gens = {k: -s for k, s in self.gens.items()}
        out.centrals = {k: -s for k, s in self.centrals.items()}
        out._hash = None
        return out

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, s):
        """Scaling by a Scalar or rational."""
        s = Scalar.coerce(s)
        if not s:
            return RElem()
        out = RElem.__new__(RElem)
        out.gens = {k: v * s for k, v in self.gens.items()}
        out.centrals = {k: v * s for k, v in self.centrals.items()}
        out._hash = None
        return out

    __rmul__ = __mul__

    def tshift(self, j: int = 1) -> "RElem":
        """Apply plain T^j; kills centrals."""
        if j == 0:
            return self
        out = RElem.__new__(RElem)
        out.gens = {(g, k + j): s for (g, k), s in self.gens.items()}
        out.centrals = {}
        out._hash = None
        return out

    def tshift_div(self, j: int) -> "RElem":
        """Apply the divided power T^{(j)} = T^j / j!."""
        if j == 0:
            return self
        inv = Fraction(1, factorial(j))
        out = RElem.__new__(RElem)
        out.gens = {(g, k + j): s * inv for (g, k), s in self.gens.items()}
        out.centrals = {}
        out._hash = None
        return out

    def __eq__(self, other):
        return (
            isinstance(other, RElem)
            and self.gens == other.gens
            and self.centrals == other.centrals
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(
                (frozenset(self.gens.items()), frozenset(self.centrals.items()))
            )
        return self._hash

    def sorted_terms(self):
        gens = sorted(self.gens.items(), key=lambda kv: (kv[0][0], kv[0][1]))
        cents = sorted(self.centrals.items())
        return gens, cents

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        gens, cents = self.sorted_terms()
        for (g, k), s in gens:
            # display uses divided T-powers: s*T^k = (s*k!)*T^(k)
            disp = s * Fraction(factorial(k))
            factors = []
            ds = str(disp)
            neg = ds == "-1"
            if ds not in ("1", "-1"):
                factors.append(f"({ds})" if " " in ds else ds)
            if k == 1:
                factors.append("T")
            elif k > 1:
                factors.append(f"T^({k})")
            factors.append(g)
            parts.append(("-" if neg else "") + "*".join(factors))
        for name, s in cents:
            ds = str(s)
            if ds == "1":
                parts.append(name)
            elif ds == "-1":
                parts.append("-" + name)
            else:
                parts.append((f"({ds})" if " " in ds else ds) + "*" + name)
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"RElem({self})"


class GeneratorDecl:
    """Generator declaration: name, parity (even/odd), and weight."""

    __slots__ = ("name", "parity", "weight")

    def __init__(self, name: str, parity, weight):
        self.name = name
        self.parity = _PARITY_NAMES[parity]
        self.weight = Fraction(weight)

    def __repr__(self):
        p = "odd" if self.parity else "even"
        return f"GeneratorDecl({self.name}, {p}, {self.weight})"


def _opposite_of_poly(poly: DPoly, sign: int) -> DPoly:
    """Given P(l) = [a_l b], return -zeta^{ab} [a_{-l-T} b] scaled by sign
    convention: opposite table entry for the reversed pair."""
    flipped = poly.substitute({"l": Subst({"l": -1}, t=-1)})
    return flipped.scale(Fraction(-sign))


class VLiePresentation:
    """A vertex Lie algebra presented by generators, centrals, and a
    lambda-bracket table on generator pairs.

    Table values are DPoly in the variable l with RElem coefficients.  Only
    one orientation of a pair needs to be given; the other is synthesized
    via the opposite bracket and recorded in synthesized_pairs.
    """

    def __init__(self, name, generators, centrals, table, graded=True,
                 default_zero=False):
        self.name = name
        self.generators = list(generators)
        self.centrals = list(centrals)
        self.graded = graded
        self.default_zero = default_zero
        self._gen_index = {}
        for g in self.generators:
            if g.name in self._gen_index or g.name in centrals:
                raise VLieError(f"duplicate symbol {g.name!r}")
            self._gen_index[g.name] = g
        if len(set(centrals)) != len(centrals):
            raise VLieError("duplicate central symbol")
        self.table = {}
        self.synthesized_pairs = set()
        for (a, b), poly in table.items():
            self._require_gen(a)
            self._require_gen(b)
            self._validate_value(poly)
            self.table[(a, b)] = poly
        self._synthesize_missing()
        if graded:
            self._check_homogeneous()

    # -- bookkeeping ---------------------------------------------------------

    def _require_gen(self, name):
        if name not in self._gen_index:
            raise VLieError(f"unknown generator {name!r} in bracket table")

    def _validate_value(self, poly: DPoly):
        for exps, relem in poly.terms.items():
            if exps[1] or exps[2] or exps[3]:
                raise VLieError("bracket table values must be polynomials in l")
            if not isinstance(relem, RElem):
                raise VLieError("bracket table coefficients must be RElems")
            for (g, _k) in relem.gens:
                self._require_gen(g)
            for z in relem.centrals:
                if z not in self.centrals:
                    raise VLieError(f"unknown central {z!r} in bracket table")

    def parity(self, name: str) -> int:
        if name in self._gen_index:
            return self._gen_index[name].parity
        if name in self.centrals:
            return EVEN
        raise VLieError(f"unknown symbol {name!r}")

    def weight(self, name: str) -> Fraction:
        if name in self._gen_index:
            return self._gen_index[name].weight
        if name in self.centrals:
            return Fraction(0)
        raise VLieError(f"unknown symbol {name!r}")

    def gen(self, name: str, tpow: int = 0, coeff=1) -> RElem:
        self._require_gen(name)
        return RElem.gen(name, tpow, coeff)

    def central_elem(self, name: str, coeff=1) -> RElem:
        if name not in self.centrals:
            raise VLieError(f"unknown central {name!r}")
        return RElem.central(name, coeff)

    def symbols(self):
        return [g.name for g in self.generators] + list(self.centrals)

    def parity_of(self, x: RElem):
        """Parity of a homogeneous element; None for zero, error if mixed."""
        parities = {self.parity(g) for (g, _k) in x.gens}
        parities |= {EVEN for _ in x.centrals}
        if not parities:
            return None
        if len(parities) > 1:
            raise VLieError("element has mixed parity")
        return parities.pop()

    def weight_of(self, x: RElem):
        """Weight of a homogeneous element; None for zero, error if mixed."""
        if not self.graded:
            raise VLieError("presentation is not graded")
        weights = {self.weight(g) + k for (g, k) in x.gens}
        weights |= {Fraction(0) for _ in x.centrals}
        if not weights:
            return None
        if len(weights) > 1:
            raise VLieError(f"element has mixed weight: {x}")
        return weights.pop()

    def _synthesize_missing(self):
        for a in list(self._gen_index):
            for b in list(self._gen_index):
                if (a, b) in self.table:
                    continue
                if (b, a) in self.table:
                    sign = -1 if (self.parity(a) and self.parity(b)) else 1
                    self.table[(a, b)] = _opposite_of_poly(self.table[(b, a)], sign)
                    self.synthesized_pairs.add((a, b))
                elif self.default_zero:
                    self.table[(a, b)] = DPoly()
                    self.synthesized_pairs.add((a, b))

    def _check_homogeneous(self):
        for (a, b), poly in self.table.items():
            target = self.weight(a) + self.weight(b)
            for exps, relem in poly.terms.items():
                t = exps[0]
                w = self.weight_of(relem)
                if w is not None and w != target - t - 1:
                    raise VLieError(
                        f"bracket [{a} _l {b}]: l^({t}) coefficient has weight "
                        f"{w}, expected {target - t - 1}"
                    )

    # -- the bracket engine ---------------------------------------------------

    def bracket(self, x: RElem, y: RElem) -> DPoly:
        """[x _l y] for arbitrary RElems, as a DPoly in l over RElem."""
        out = DPoly()
        for (g1, j1), s1 in x.gens.items():
            for (g2, j2), s2 in y.gens.items():
                base = self.table.get((g1, g2))
                if base is None:
                    raise BracketUndefined(
                        f"bracket for pair ({g1}, {g2}) is not in the table"
                    )
                p = base
                if j1:
                    # [T^j a _l b] = (-l)^j [a _l b]; plain l^j = j! l^{(j)}
                    p = p.mul_monomial(
                        "l", j1, Fraction((-1) ** j1 * factorial(j1))
                    )
                for _ in range(j2):
                    # [a _l Tb] = (T + l)[a _l b]
                    p = p.map_coefficients(lambda c: c.tshift(1)) + p.mul_monomial(
                        "l", 1
                    )
                s = s1 * s2
                if s != 1:
                    p = p.scale(s)
                out = out + p
        # central terms of x or y contribute nothing
        return out

    def opposite_bracket(self, x: RElem, y: RElem) -> DPoly:
        """-(-1)^{|x||y|} [y_{-l-T} x], expanded through the T action."""
        px, py = self.parity_of(x), self.parity_of(y)
        sign = -1 if (px and py) else 1
        return _opposite_of_poly(self.bracket(y, x), sign)

    def tth_products(self, x: RElem, y: RElem):
        """The finitely many nonzero products x_t y as [(t, RElem), ...]."""
        poly = self.bracket(x, y)
        out = []
        for exps, relem in sorted(poly.terms.items()):
            out.append((exps[0], relem))
        return out

    def tth_product(self, x: RElem, y: RElem, t: int) -> RElem:
        coeff = self.bracket(x, y).coefficient(l=t)
        return coeff if coeff is not None else RElem.zero()

    def lie_bracket(self, x: RElem, y: RElem) -> RElem:
        """[x, y]_lie = integral over l from -T to 0 of [x _l y], which
        expands to sum_i (-1)^i T^{(i+1)}(x_i y)."""
        out = RElem.zero()
        for t, relem in self.tth_products(x, y):
            out = out + relem.tshift_div(t + 1) * Fraction((-1) ** t)
        return out

    def locality_order(self, x: RElem, y: RElem) -> int:
        d = self.bracket(x, y).degree_in("l")
        return d + 1

    # -- identity checks ------------------------------------------------------

    def bracket_in(self, x: RElem, y: RElem, var: str) -> DPoly:
        p = self.bracket(x, y)
        if var == "l":
            return p
        return p.substitute({"l": Subst({var: 1})})

    def jacobi_residual(self, a: RElem, b: RElem, c: RElem) -> DPoly:
        """[[a_l b]_m c] - [a_l [b_{m-l} c]] + zeta^{ab} [b_{m-l} [a_l c]];
        zero iff the conformal Jacobi identity holds for (a, b, c)."""
        pa, pb = self.parity_of(a), self.parity_of(b)
        zeta = Fraction(-1 if (pa and pb) else 1)

        lhs = DPoly()
        for t, x_t in self.tth_products(a, b):
            lhs = lhs + self.bracket_in(x_t, c, "m").mul_monomial("l", t)

        rhs1 = DPoly()
        inner_bc = self.bracket_in(b, c, "n").substitute(
            {"n": Subst({"m": 1, "l": -1})}
        )
        for exps, relem in inner_bc.terms.items():
            p = self.bracket(a, relem)
            p = p.mul_monomial("l", exps[0]).mul_monomial("m", exps[1])
            rhs1 = rhs1 + p

        rhs2 = DPoly()
        for t, w_t in self.tth_products(a, c):
            p = self.bracket_in(b, w_t, "n").substitute(
                {"n": Subst({"m": 1, "l": -1})}
            )
            rhs2 = rhs2 + p.mul_monomial("l", t)

        return lhs - rhs1 + rhs2.scale(zeta)

    def skew_residual(self, a: RElem, b: RElem) -> DPoly:
        return self.bracket(a, b) - self.opposite_bracket(a, b)

    def check_identities(self, exhaustive: bool = False) -> "IdentityReport":
        """Verify conformal skew-symmetry on generator pairs and the
        conformal Jacobi identity on generator triples, with the S3 oracle:
        every permutation of a triple must agree with the others."""
        report = IdentityReport(self.name)
        names = [g.name for g in self.generators]
        elems = {n: self.gen(n) for n in names}
        for i, a in enumerate(names):
            for b in names[i:]:
                res = self.skew_residual(elems[a], elems[b])
                report.add(f"skew:{a},{b}", res)
        triple_status = {}
        for a in names:
            for b in names:
                for c in names:
                    res = self.jacobi_residual(elems[a], elems[b], elems[c])
                    report.add(f"jacobi:{a},{b},{c}", res)
                    key = tuple(sorted((a, b, c)))
                    triple_status.setdefault(key, []).append(res.is_zero())
        for key, statuses in triple_status.items():
            if len(set(statuses)) > 1:
                report.s3_violations.append(key)
        if exhaustive:
            for a in names:
                for b in names:
                    res = self.skew_residual(
                        elems[a].tshift(1), elems[b] + elems[b].tshift(2)
                    )
                    report.add(f"skew[T-decorated]:{a},{b}", res)
            for a in names:
                for b in names:
                    for c in names:
                        res = self.jacobi_residual(
                            elems[a].tshift(1), elems[b], elems[c].tshift(1)
                        )
                        report.add(f"jacobi[T-decorated]:{a},{b},{c}", res)
        return report

    def check_morphism(self, target: "VLiePresentation", mapping: dict) -> "IdentityReport":
        """Verify that the symbol map extends to a vertex Lie algebra
        morphism: phi[x _l y] = [phi(x) _l phi(y)] on all symbol pairs,
        plus weight and parity compatibility."""
        report = IdentityReport(f"{self.name}->{target.name}")
        for s in self.symbols():
            if s not in mapping:
                raise VLieError(f"morphism map missing symbol {s!r}")
            img = mapping[s]
            if not isinstance(img, RElem):
                raise VLieError(f"morphism image of {s!r} must be an RElem")
            ip = target.parity_of(img)
            if ip is not None and ip != self.parity(s):
                report.mismatches.append(f"parity:{s}")
            if self.graded and target.graded:
                iw = target.weight_of(img)
                if iw is not None and iw != self.weight(s):
                    # weights may legitimately shift (twists); warn only
                    report.warnings.append(f"weight:{s}")

        def phi(x: RElem) -> RElem:
            out = RElem.zero()
            for (g, k), s in x.gens.items():
                out = out + mapping[g].tshift(k) * s
            for z, s in x.centrals.items():
                out = out + mapping[z] * s
            return out

        for a in self.symbols():
            for b in self.symbols():
                ea = self.gen(a) if a in self._gen_index else self.central_elem(a)
                eb = self.gen(b) if b in self._gen_index else self.central_elem(b)
                lhs = self.bracket(ea, eb).map_coefficients(phi)
                rhs = target.bracket(phi(ea), phi(eb))
                report.add(f"morphism:{a},{b}", lhs - rhs)
        return report


class IdentityReport:
    """Collection of named residuals; ok iff all residuals vanish."""

    def __init__(self, subject=""):
        self.subject = subject
        self.entries = []  # (name, passed, residual string or None)
        self.s3_violations = []
        self.mismatches = []
        self.warnings = []

    def add(self, name: str, residual):
        zero = residual.is_zero() if hasattr(residual, "is_zero") else not residual
        self.entries.append(
            (name, zero, None if zero else _render_residual(residual))
        )

    @property
    def ok(self) -> bool:
        return (
            all(passed for _, passed, _ in self.entries)
            and not self.s3_violations
            and not self.mismatches
        )

    def failures(self):
        return [(n, w) for n, passed, w in self.entries if not passed]

    def __str__(self):
        status = "pass" if self.ok else "FAIL"
        lines = [f"[{status}] {self.subject}: {len(self.entries)} checks"]
        for name, witness in self.failures():
            lines.append(f"  fail {name}: {witness}")
        for key in self.s3_violations:
            lines.append(f"  S3 inconsistency on triple {key}")
        for m in self.mismatches:
            lines.append(f"  mismatch {m}")
        return "\n".join(lines)


def _render_residual(residual) -> str:
    if isinstance(residual, DPoly):
        return residual.render()
    return str(residual)


def opposite_tth_products(pres: VLiePresentation, a: RElem, b: RElem):
    """Independent expansion of the opposite bracket coefficient by
    coefficient: r-th product = zeta sum_i (-1)^{r+1+i} T^{(i)}(b_{r+i} a).
    Used as a cross-check oracle against opposite_bracket."""
    pa, pb = pres.parity_of(a), pres.parity_of(b)
    zeta = Fraction(-1 if (pa and pb) else 1)
    products = dict(pres.tth_products(b, a))
    top = max(products, default=-1)
    out = []
    for r in range(top + 1):
        acc = RElem.zero()
        for i in range(top - r + 1):
            br = products.get(r + i)
            if br is not None:
                acc = acc + br.tshift_div(i) * Fraction((-1) ** (r + 1 + i))
        acc = acc * zeta
        if acc:
            out.append((r, acc))
    return out
