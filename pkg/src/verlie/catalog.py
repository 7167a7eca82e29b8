"""Builders for the named vertex Lie algebras and conformal-structure
analysis: Virasoro vectors, central charges, Griess algebra, coset
construction, and the current-shift construction L -> L + TJ."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .dpoly import DPoly
from .scalars import Scalar
from .vlie import EVEN, ODD, GeneratorDecl, RElem, VLieError, VLiePresentation


class CatalogError(VLieError):
    pass


def _lp(*terms) -> DPoly:
    """Assemble a bracket value from (l-power, RElem) pairs."""
    out = DPoly()
    for power, relem in terms:
        if not relem:
            continue
        if power:
            out = out + DPoly.variable("l", relem, power)
        else:
            out = out + DPoly.constant(relem)
    return out


def _sc(v) -> Scalar:
    return Scalar.coerce(v)


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------


def build_witt() -> VLiePresentation:
    L = RElem.gen("L")
    table = {("L", "L"): _lp((0, L.tshift(1)), (1, L * 2))}
    return VLiePresentation("witt", [GeneratorDecl("L", EVEN, 2)], [], table)


def build_virasoro(central: str = "c") -> VLiePresentation:
    L = RElem.gen("L")
    table = {
        ("L", "L"): _lp(
            (0, L.tshift(1)), (1, L * 2), (3, RElem.central(central, Fraction(1, 2)))
        )
    }
    return VLiePresentation(
        "virasoro", [GeneratorDecl("L", EVEN, 2)], [central], table
    )


def _check_symmetric(form: dict, basis) -> None:
    for a in basis:
        for b in basis:
            if form.get((a, b), Scalar()) != form.get((b, a), Scalar()):
                raise CatalogError(f"bilinear form not symmetric at ({a}, {b})")


def _form_lookup(form: dict) -> dict:
    out = {}
    for (a, b), v in form.items():
        out[(a, b)] = _sc(v)
    return out


def build_heisenberg(rank: int = 1, form: dict | None = None,
                     central: str = "k") -> VLiePresentation:
    """Even abelian currents of weight 1 with [a _l b] = (a,b) k l."""
    basis = [f"a{i}" if rank > 1 else "a" for i in range(1, rank + 1)]
    if form is None:
        form = {(x, x): 1 for x in basis}
    form = _form_lookup(form)
    _check_symmetric(form, basis)
    table = {}
    for x in basis:
        for y in basis:
            s = form.get((x, y), Scalar())
            table[(x, y)] = _lp((1, RElem.central(central, s))) if s else DPoly()
    gens = [GeneratorDecl(x, EVEN, 1) for x in basis]
    return VLiePresentation("heisenberg", gens, [central], table)


def build_clifford(rank: int = 1, form: dict | None = None,
                   central: str = "k") -> VLiePresentation:
    """Odd weight-1/2 generators with [a _l b] = (a,b) k."""
    basis = [f"p{i}" if rank > 1 else "p" for i in range(1, rank + 1)]
    if form is None:
        form = {(x, x): 1 for x in basis}
    form = _form_lookup(form)
    _check_symmetric(form, basis)
    table = {}
    for x in basis:
        for y in basis:
            s = form.get((x, y), Scalar())
            table[(x, y)] = _lp((0, RElem.central(central, s))) if s else DPoly()
    gens = [GeneratorDecl(x, ODD, Fraction(1, 2)) for x in basis]
    return VLiePresentation("clifford", gens, [central], table)


def _lie_bracket_elem(structure: dict, x: str, y: str) -> RElem:
    out = RElem.zero()
    for name, coeff in structure.get((x, y), {}).items():
        out = out + RElem.gen(name, 0, _sc(coeff))
    return out


def build_affine(basis, structure: dict, form: dict,
                 central: str = "k", name: str = "affine") -> VLiePresentation:
    """Currents over a Lie algebra with [a _l b] = [a,b] + (a,b) k l.

    structure maps ordered basis pairs to {basis name: coefficient};
    antisymmetry, the Jacobi identity, invariance of the form, and symmetry
    are all verified before the presentation is built.
    """
    basis = list(basis)
    form = _form_lookup(form)
    _check_symmetric(form, basis)

    def br(x, y):
        return _lie_bracket_elem(structure, x, y)

    def as_coords(e: RElem) -> dict:
        coords = {}
        for (g, k), s in e.gens.items():
            if k != 0 or g not in basis:
                raise CatalogError("structure constants leave the basis span")
            coords[g] = s
        return coords

    for x in basis:
        for y in basis:
            if br(x, y) + br(y, x):
                raise CatalogError(f"structure constants not antisymmetric at ({x},{y})")
    for x in basis:
        for y in basis:
            for z in basis:
                acc = RElem.zero()
                for p, q, r in ((x, y, z), (y, z, x), (z, x, y)):
                    for u, s in as_coords(br(p, q)).items():
                        acc = acc + br(u, r) * s
                if acc:
                    raise CatalogError(f"Jacobi fails for ({x},{y},{z})")
    for x in basis:
        for y in basis:
            for z in basis:
                lhs = Scalar()
                for u, s in as_coords(br(x, y)).items():
                    lhs = lhs + s * form.get((u, z), Scalar())
                rhs = Scalar()
                for u, s in as_coords(br(y, z)).items():
                    rhs = rhs + s * form.get((x, u), Scalar())
                if lhs != rhs:
                    raise CatalogError(f"form not invariant at ({x},{y},{z})")

    table = {}
    for x in basis:
        for y in basis:
            s = form.get((x, y), Scalar())
            table[(x, y)] = _lp((0, br(x, y)), (1, RElem.central(central, s)))
    gens = [GeneratorDecl(x, EVEN, 1) for x in basis]
    return VLiePresentation(name, gens, [central], table)


def sl2_data():
    """Basis, structure constants, and invariant form of sl2 with (e,f)=1."""
    basis = ["e", "h", "f"]
    structure = {
        ("e", "f"): {"h": 1},
        ("f", "e"): {"h": -1},
        ("h", "e"): {"e": 2},
        ("e", "h"): {"e": -2},
        ("h", "f"): {"f": -2},
        ("f", "h"): {"f": 2},
    }
    form = {("e", "f"): 1, ("f", "e"): 1, ("h", "h"): 2}
    return basis, structure, form


def build_neveu_schwarz(central: str = "c") -> VLiePresentation:
    """N=1 super Virasoro: conformal L and an odd primary G of weight 3/2
    with [G _l G] = 2L + (2c/3) l^(2)."""
    L, G = RElem.gen("L"), RElem.gen("G")
    c = lambda q: RElem.central(central, q)
    table = {
        ("L", "L"): _lp((0, L.tshift(1)), (1, L * 2), (3, c(Fraction(1, 2)))),
        ("L", "G"): _lp((0, G.tshift(1)), (1, G * Fraction(3, 2))),
        ("G", "G"): _lp((0, L * 2), (2, c(Fraction(2, 3)))),
    }
    gens = [GeneratorDecl("L", EVEN, 2), GeneratorDecl("G", ODD, Fraction(3, 2))]
    return VLiePresentation("neveu_schwarz", gens, [central], table)


def build_n2(central: str = "c") -> VLiePresentation:
    """N=2 super Virasoro: L, a U(1)-current J, and odd primaries Gp, Gm of
    weight 3/2 and charge +-1."""
    L, J = RElem.gen("L"), RElem.gen("J")
    Gp, Gm = RElem.gen("Gp"), RElem.gen("Gm")
    c = lambda q: RElem.central(central, q)
    table = {
        ("L", "L"): _lp((0, L.tshift(1)), (1, L * 2), (3, c(Fraction(1, 2)))),
        ("L", "J"): _lp((0, J.tshift(1)), (1, J)),
        ("L", "Gp"): _lp((0, Gp.tshift(1)), (1, Gp * Fraction(3, 2))),
        ("L", "Gm"): _lp((0, Gm.tshift(1)), (1, Gm * Fraction(3, 2))),
        ("J", "J"): _lp((1, c(Fraction(1, 3)))),
        ("J", "Gp"): _lp((0, Gp)),
        ("J", "Gm"): _lp((0, -Gm)),
        ("Gp", "Gm"): _lp((0, L * 2 + J.tshift(1)), (1, J * 2), (2, c(Fraction(2, 3)))),
        ("Gp", "Gp"): DPoly(),
        ("Gm", "Gm"): DPoly(),
    }
    gens = [
        GeneratorDecl("L", EVEN, 2),
        GeneratorDecl("J", EVEN, 1),
        GeneratorDecl("Gp", ODD, Fraction(3, 2)),
        GeneratorDecl("Gm", ODD, Fraction(3, 2)),
    ]
    return VLiePresentation("n2", gens, [central], table)


def build_topological(central: str = "d") -> VLiePresentation:
    """Topological Virasoro: the N=2 algebra twisted so that the conformal
    vector has central charge zero, with odd Q, G of weight 1, 2."""
    L, J = RElem.gen("L"), RElem.gen("J")
    Q, G = RElem.gen("Q"), RElem.gen("G")
    d = lambda q: RElem.central(central, q)
    table = {
        ("L", "L"): _lp((0, L.tshift(1)), (1, L * 2)),
        ("L", "J"): _lp((0, J.tshift(1)), (1, J), (2, d(-1))),
        ("L", "Q"): _lp((0, Q.tshift(1)), (1, Q)),
        ("L", "G"): _lp((0, G.tshift(1)), (1, G * 2)),
        ("J", "J"): _lp((1, d(1))),
        ("J", "Q"): _lp((0, Q)),
        ("J", "G"): _lp((0, -G)),
        ("Q", "G"): _lp((0, L), (1, J), (2, d(1))),
        ("Q", "Q"): DPoly(),
        ("G", "G"): DPoly(),
    }
    gens = [
        GeneratorDecl("L", EVEN, 2),
        GeneratorDecl("J", EVEN, 1),
        GeneratorDecl("Q", ODD, 1),
        GeneratorDecl("G", ODD, 2),
    ]
    return VLiePresentation("topological", gens, [central], table)


def build_witt_loop_semidirect(basis=("a",), structure: dict | None = None) -> VLiePresentation:
    """Semidirect product of the Witt algebra acting on loop currents of
    weight 1: [L _l a] = (T + l) a and [a _l b] = [a, b]."""
    structure = structure or {}
    basis = list(basis)
    L = RElem.gen("L")
    table = {("L", "L"): _lp((0, L.tshift(1)), (1, L * 2))}
    for x in basis:
        e = RElem.gen(x)
        table[("L", x)] = _lp((0, e.tshift(1)), (1, e))
        for y in basis:
            table[(x, y)] = _lp((0, _lie_bracket_elem(structure, x, y)))
    gens = [GeneratorDecl("L", EVEN, 2)] + [GeneratorDecl(x, EVEN, 1) for x in basis]
    return VLiePresentation("witt_loop_semidirect", gens, [], table)


def build_frobenius(basis=("u",), product: dict | None = None,
                    form: dict | None = None, central: str = "c") -> VLiePresentation:
    """Vertex Lie algebra of a commutative Frobenius algebra C:
    [a _l b] = (T + 2l)(ab) + (a,b) c l^(3) on a basis of C placed in
    weight 2.  Commutativity, associativity, and invariance of the input
    data are verified.

    The default (one basis element u with u*u = 2u and (u,u) = 1/2, i.e. the
    Frobenius algebra Q with identity u/2 and (1,1) = 1/2 rescaled to the
    basis) is isomorphic to the Virasoro algebra via 1 -> L.
    """
    basis = list(basis)
    if product is None and form is None and basis == ["u"]:
        # C = Q with basis {1}, (1,1) = 1/2, written on the basis element u=1
        product = {("u", "u"): {"u": 1}}
        form = {("u", "u"): Fraction(1, 2)}
    product = product or {}
    form = _form_lookup(form or {})
    _check_symmetric(form, basis)

    def mul(x, y) -> dict:
        return {g: _sc(s) for g, s in product.get((x, y), {}).items()}

    for x in basis:
        for y in basis:
            if mul(x, y) != mul(y, x):
                raise CatalogError(f"product not commutative at ({x},{y})")
    for x in basis:
        for y in basis:
            for z in basis:
                lhs = {}
                for u, s in mul(x, y).items():
                    for g, t in mul(u, z).items():
                        lhs[g] = lhs.get(g, Scalar()) + s * t
                rhs = {}
                for u, s in mul(y, z).items():
                    for g, t in mul(x, u).items():
                        rhs[g] = rhs.get(g, Scalar()) + s * t
                if {g: s for g, s in lhs.items() if s} != {g: s for g, s in rhs.items() if s}:
                    raise CatalogError(f"product not associative at ({x},{y},{z})")
                flhs = Scalar()
                for u, s in mul(x, y).items():
                    flhs = flhs + s * form.get((u, z), Scalar())
                frhs = Scalar()
                for u, s in mul(y, z).items():
                    frhs = frhs + s * form.get((x, u), Scalar())
                if flhs != frhs:
                    raise CatalogError(f"form not invariant at ({x},{y},{z})")

    table = {}
    for x in basis:
        for y in basis:
            ab = RElem.zero()
            for g, s in mul(x, y).items():
                ab = ab + RElem.gen(g, 0, s)
            table[(x, y)] = _lp(
                (0, ab.tshift(1)),
                (1, ab * 2),
                (3, RElem.central(central, form.get((x, y), Scalar()))),
            )
    gens = [GeneratorDecl(x, EVEN, 2) for x in basis]
    return VLiePresentation("frobenius", gens, [central], table)


def build_product(*presentations, names=None) -> VLiePresentation:
    """Finite product with zero cross brackets; generator and central names
    are suffixed _1, _2, ... to stay unique."""
    gens, centrals, table = [], [], {}
    for idx, pres in enumerate(presentations, start=1):
        tag = f"_{idx}" if names is None else f"_{names[idx - 1]}"
        ren = {s: s + tag for s in pres.symbols()}

        def rename(e: RElem, ren=ren) -> RElem:
            return RElem(
                {(ren[g], k): s for (g, k), s in e.gens.items()},
                {ren[z]: s for z, s in e.centrals.items()},
            )

        for g in pres.generators:
            gens.append(GeneratorDecl(ren[g.name], g.parity, g.weight))
        centrals.extend(ren[z] for z in pres.centrals)
        for (a, b), poly in pres.table.items():
            table[(ren[a], ren[b])] = poly.map_coefficients(rename)
    name = "x".join(p.name for p in presentations)
    out = VLiePresentation(name, gens, centrals, table, default_zero=True)
    return out


BUILDERS = {
    "witt": build_witt,
    "virasoro": build_virasoro,
    "heisenberg": build_heisenberg,
    "clifford": build_clifford,
    "affine": None,  # handled in build() to default to sl2
    "neveu_schwarz": build_neveu_schwarz,
    "n2": build_n2,
    "topological": build_topological,
    "witt_loop_semidirect": build_witt_loop_semidirect,
    "frobenius": build_frobenius,
}

CATALOG_NAMES = tuple(BUILDERS)


def build(name: str, **params) -> VLiePresentation:
    """Build a catalog algebra by name.

    affine defaults to sl2 with the form (e,f) = 1, (h,h) = 2; heisenberg
    and clifford accept rank and form; frobenius accepts basis, product,
    form; witt_loop_semidirect accepts basis and structure constants.
    """
    if name not in BUILDERS:
        raise CatalogError(f"unknown catalog algebra {name!r}")
    if name == "affine":
        if not params:
            basis, structure, form = sl2_data()
            return build_affine(basis, structure, form)
        return build_affine(**params)
    return BUILDERS[name](**params)


# ---------------------------------------------------------------------------
# conformal structure analysis
# ---------------------------------------------------------------------------

PRIMARY = "primary"
QUASI_PRIMARY = "quasi-primary"
NEITHER = "neither"


@dataclass
class ConformalReport:
    is_virasoro: bool
    central_charge: RElem | None
    is_conformal: bool
    primary_status: dict = field(default_factory=dict)
    problems: list = field(default_factory=list)


def virasoro_vector_check(pres: VLiePresentation, L: RElem):
    """Return (True, central charge as an RElem in ker T) when
    [L _l L] = (T + 2l) L + (c_L/2) l^(3) with c_L central, else (False, None)."""
    poly = pres.bracket(L, L)
    c0 = poly.coefficient(l=0) or RElem.zero()
    c1 = poly.coefficient(l=1) or RElem.zero()
    c2 = poly.coefficient(l=2) or RElem.zero()
    c3 = poly.coefficient(l=3) or RElem.zero()
    if poly.degree_in("l") > 3:
        return False, None
    if c0 != L.tshift(1) or c1 != L * 2 or c2:
        return False, None
    if c3.gens:  # charge must be killed by T, i.e. purely central
        return False, None
    return True, c3 * 2


def conformal_analysis(pres: VLiePresentation, L: RElem) -> ConformalReport:
    """Check whether L is a Virasoro vector, extract its central charge,
    decide whether it is a conformal vector (L_(0) = T and L_(1) = weight on
    every generator), and classify each generator as primary,
    quasi-primary, or neither."""
    if not pres.graded:
        raise VLieError("conformal analysis needs a graded presentation")
    is_vir, charge = virasoro_vector_check(pres, L)
    report = ConformalReport(is_vir, charge, False)
    if not is_vir:
        report.problems.append("bracket [L _l L] does not have Virasoro shape")

    conformal = is_vir
    for g in pres.generators:
        a = pres.gen(g.name)
        poly = pres.bracket(L, a)
        c0 = poly.coefficient(l=0) or RElem.zero()
        c1 = poly.coefficient(l=1) or RElem.zero()
        c2 = poly.coefficient(l=2) or RElem.zero()
        if c0 != a.tshift(1):
            conformal = False
            report.problems.append(f"L_(0) != T on {g.name}")
        if c1 != a * g.weight:
            conformal = False
            report.problems.append(f"L_(1) != weight on {g.name}")
        higher = [
            relem for exps, relem in poly.terms.items() if exps[0] >= 2 and relem
        ]
        if c0 == a.tshift(1) and c1 == a * g.weight and not higher:
            report.primary_status[g.name] = PRIMARY
        elif not c2:
            report.primary_status[g.name] = QUASI_PRIMARY
        else:
            report.primary_status[g.name] = NEITHER
    report.is_conformal = conformal
    return report


# ---------------------------------------------------------------------------
# Griess algebra
# ---------------------------------------------------------------------------


@dataclass
class GriessReport:
    basis: list
    product: dict  # (a, b) -> RElem, the weight-indexed product a_0 b
    form: dict  # (a, b) -> RElem supported on centrals, a_2 b
    idempotents: list  # RElems e with e.e = e
    virasoro_vectors: list  # (RElem 2e, central charge RElem)


def _cft_type(pres: VLiePresentation) -> bool:
    return pres.graded and all(g.weight > 0 for g in pres.generators)


def griess(pres: VLiePresentation) -> GriessReport:
    """Product a_0 b = a_(1) b and form a_2 b = a_(3) b on the weight-2
    generators; idempotents are searched on single generators and, when the
    product table is diagonal, on all subsets.  Each idempotent e yields the
    Virasoro vector 2e, cross-checked through virasoro_vector_check."""
    if not _cft_type(pres):
        raise VLieError("Griess algebra needs a CFT-type presentation")
    basis = [g.name for g in pres.generators if g.weight == 2]
    product, form = {}, {}
    for a in basis:
        for b in basis:
            poly = pres.bracket(pres.gen(a), pres.gen(b))
            product[(a, b)] = poly.coefficient(l=1) or RElem.zero()
            form[(a, b)] = poly.coefficient(l=3) or RElem.zero()

    def coords(e: RElem):
        out = {}
        for (g, k), s in e.gens.items():
            if k != 0 or g not in basis:
                return None
            out[g] = s
        return out if not e.centrals else None

    diagonal = True
    gamma = {}
    for a in basis:
        for b in basis:
            cs = coords(product[(a, b)])
            if a == b:
                if cs is None or set(cs) - {a}:
                    diagonal = False
                elif cs:
                    gamma[a] = cs.get(a, Scalar())
            elif product[(a, b)]:
                diagonal = False

    idempotents = []
    if diagonal:
        # e = sum over S of a/gamma_a solves e.e = e for every subset S
        choices = [a for a in basis if a in gamma and gamma[a].is_constant()
                   and gamma[a].constant_value()]
        for mask in range(1, 2 ** len(choices)):
            e = RElem.zero()
            for i, a in enumerate(choices):
                if mask >> i & 1:
                    e = e + pres.gen(a) * (1 / gamma[a].constant_value())
            idempotents.append(e)
    else:
        # fall back to single-generator scalings x*a with x*gamma = 1
        for a in basis:
            cs = coords(product[(a, a)])
            if cs and set(cs) == {a} and cs[a].is_constant() and cs[a].constant_value():
                idempotents.append(pres.gen(a) * (1 / cs[a].constant_value()))

    virs = []
    for e in idempotents:
        L = e * 2
        ok, charge = virasoro_vector_check(pres, L)
        if not ok:
            raise VLieError(f"idempotent {e} failed the Virasoro cross-check")
        virs.append((L, charge))
    return GriessReport(basis, product, form, idempotents, virs)


# ---------------------------------------------------------------------------
# coset and current-shift constructions
# ---------------------------------------------------------------------------


@dataclass
class CosetReport:
    coset_vector: RElem
    central_charge: RElem


def coset_conformal(pres: VLiePresentation, L: RElem, Lprime: RElem) -> CosetReport:
    """Complementary Virasoro vector L - L' of a quasi-primary Virasoro
    vector L' inside the conformal vector L; fails loudly when L' and
    L - L' do not commute."""
    main = conformal_analysis(pres, L)
    if not main.is_conformal:
        raise VLieError("L is not a conformal vector: " + "; ".join(main.problems))
    ok, c_prime = virasoro_vector_check(pres, Lprime)
    if not ok:
        raise VLieError("L' is not a Virasoro vector")
    one = pres.bracket(L, Lprime).coefficient(l=2) or RElem.zero()
    if one:
        raise VLieError("L' is not quasi-primary (L_1 L' != 0)")
    coset = L - Lprime
    if pres.bracket(Lprime, coset):
        raise VLieError("L' does not commute with L - L'")
    c = (main.central_charge or RElem.zero()) - (c_prime or RElem.zero())
    ok, measured = virasoro_vector_check(pres, coset)
    if coset and (not ok or measured != c):
        raise VLieError("coset vector failed the Virasoro cross-check")
    return CosetReport(coset, c)


@dataclass
class CurrentShiftReport:
    shifted_vector: RElem
    central_charge: RElem
    current_level: RElem


def chodos_thorn(pres: VLiePresentation, L: RElem, J: RElem) -> CurrentShiftReport:
    """Shift the conformal vector by a primary U(1)-current: L' = L + TJ is
    a Virasoro vector with c' = c_L - 12 k_J."""
    main = conformal_analysis(pres, L)
    if not main.is_conformal:
        raise VLieError("L is not a conformal vector: " + "; ".join(main.problems))
    jj = pres.bracket(J, J)
    k_J = jj.coefficient(l=1) or RElem.zero()
    if jj != _lp((1, k_J)):
        raise VLieError("J is not a U(1)-vector ([J _l J] != k_J l)")
    if k_J.gens:
        raise VLieError("k_J is not killed by T")
    if pres.bracket(L, J) != _lp((0, J.tshift(1)), (1, J)):
        raise VLieError("J is not primary of weight 1")
    shifted = L + J.tshift(1)
    ok, charge = virasoro_vector_check(pres, shifted)
    expected = (main.central_charge or RElem.zero()) - k_J * 12
    if not ok or charge != expected:
        raise VLieError("L + TJ failed the Virasoro cross-check")
    return CurrentShiftReport(shifted, charge, k_J)
