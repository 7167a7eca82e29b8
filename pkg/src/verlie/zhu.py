"""Zhu products, the subspace O(V) = V *_{-2} V, Zhu-algebra relations, and
the isomorphism U(g) -> A(V) for universal affine envelopes.

A(V) is never materialized: every statement about it is phrased as a
congruence in V modulo a bounded generating span of O(V).  Membership
certificates against that span are sound; non-membership is only relative
to the bound, which each report records.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import floor

from .envelope import (
    VACUUM,
    EnvContext,
    EnvElem,
    _add_into,
    _nprod_mono,
    _WORDS,
    basis_wids,
    intern_word,
    nth_product,
    translate,
)
from .linalg import LinearSpan
from .scalars import Scalar, binom
from .vlie import VLieError


class ZhuError(VLieError):
    pass


def zhu_product_n(ctx: EnvContext, a: EnvElem, n: int, b: EnvElem) -> EnvElem:
    """a *_n b = sum_{i=0}^{h_a} binom(h_a, i) a_(n+i) b, extended linearly
    over the homogeneous components of a; n = -1 is the Zhu product."""
    out = EnvElem()
    for h, part in a.homogeneous_parts(ctx).items():
        if h.denominator != 1 or h < 0:
            raise ZhuError("Zhu products need a nonnegative integer grading")
        for i in range(int(h) + 1):
            bc = binom(h, i)
            if bc:
                term = nth_product(ctx, part, n + i, b)
                if term:
                    out = out + term * ctx.coeff(bc)
    return out


def zhu_product(ctx: EnvContext, a: EnvElem, b: EnvElem) -> EnvElem:
    return zhu_product_n(ctx, a, -1, b)


class OSpan:
    """Bounded generating span of O(V): all u *_{-2} v with u, v basis
    states and h_u + h_v + 1 <= o_bound."""

    def __init__(self, ctx: EnvContext, o_bound):
        self.ctx = ctx
        self.o_bound = Fraction(o_bound)
        basis = basis_wids(ctx, self.o_bound)
        columns = [wid for _h, wids in sorted(basis.items()) for wid in wids]
        self.span = LinearSpan(columns)
        self._column_set = set(columns)
        states = [(h, wid) for h, wids in basis.items() for wid in wids]
        for hu, u in states:
            ue = EnvElem({u: ctx.one})
            for hv, v in states:
                if hu + hv + 1 > self.o_bound:
                    continue
                gen = zhu_product_n(ctx, ue, -2, EnvElem({v: ctx.one}))
                if gen:
                    self.span.add(dict(gen.terms))

    def reduce(self, x: EnvElem) -> dict:
        for wid in x.terms:
            if wid not in self._column_set:
                raise ZhuError(
                    "state exceeds the o_bound of the O(V) span"
                )
        return self.span.reduce(dict(x.terms))

    def contains(self, x: EnvElem) -> bool:
        return not self.reduce(x)


@dataclass
class ZhuReduction:
    representative: dict  # word tuple -> Frac
    status: str  # "reduced" when 0 (certified in O(V)), else "bound-limited"

    @property
    def in_span(self) -> bool:
        return not self.representative


def zhu_reduce(ctx: EnvContext, x: EnvElem, o_bound, ospan: OSpan | None = None) -> ZhuReduction:
    """Canonical representative of x modulo the bounded O(V) span.

    A zero representative certifies membership in O(V); a nonzero one only
    says x is outside the bounded span (membership might still hold with a
    larger bound), hence status bound-limited."""
    if ospan is None:
        ospan = OSpan(ctx, o_bound)
    rep = ospan.reduce(x)
    return ZhuReduction(
        {_WORDS[w]: c for w, c in rep.items()},
        "reduced" if not rep else "bound-limited",
    )


@dataclass
class ZhuReport:
    subject: str
    results: dict = field(default_factory=dict)  # name -> (checked, failures)

    def add(self, name, ok, witness=None):
        checked, failures = self.results.get(name, (0, []))
        checked += 1
        if not ok:
            failures.append(witness or name)
        self.results[name] = (checked, failures)

    @property
    def ok(self):
        return all(not f for _c, f in self.results.values())

    def __str__(self):
        lines = [f"Zhu relations on {self.subject}:"]
        for name, (checked, failures) in self.results.items():
            status = "pass" if not failures else "FAIL"
            lines.append(f"  [{status}] {name}: {checked} checks")
            for w in failures[:3]:
                lines.append(f"      {w}")
        return "\n".join(lines)


def check_zhu_relations(ctx: EnvContext, pool=None, max_weight=3, o_bound=None,
                        n_window=(-3, 0), assoc_window=(-2, 0),
                        conformal_gen=None) -> ZhuReport:
    """Verify the shift relation exactly in V, the Zhu commutator identity
    and (when a conformal generator is named) centrality of its class
    modulo the bounded O-span, and the associativity formula for the Zhu
    n-th products exactly in V."""
    if pool is None:
        pool = [
            EnvElem({wid: ctx.one})
            for _h, wids in basis_wids(ctx, max_weight).items()
            for wid in wids
        ]
    if o_bound is None:
        o_bound = 2 * Fraction(max_weight) + 1
    report = ZhuReport(ctx.name)
    ospan = OSpan(ctx, o_bound)

    for a in pool:
        ha = a.weight(ctx)
        if ha is None:
            continue
        ta = translate(ctx, a)
        for b in pool:
            for n in range(n_window[0], n_window[1] + 1):
                lhs = zhu_product_n(ctx, ta, n, b) + zhu_product_n(
                    ctx, a, n, b
                ) * ctx.coeff(ha + n + 1)
                rhs = zhu_product_n(ctx, a, n - 1, b) * ctx.coeff(-n)
                report.add(
                    "shift", lhs == rhs, f"shift n={n} a={a} b={b}"
                )

    for a in pool:
        ha = a.weight(ctx)
        for b in pool:
            zeta = -1 if (a.parity(ctx) and b.parity(ctx)) else 1
            comm = zhu_product(ctx, a, b) - zhu_product(ctx, b, a) * zeta
            acc = EnvElem()
            for i in range(0, floor(ha + b.weight(ctx)) + 1):
                bc = binom(ha - 1, i)
                if bc:
                    p = nth_product(ctx, a, i, b)
                    if p:
                        acc = acc + p * ctx.coeff(bc)
            report.add(
                "commutator",
                ospan.contains(comm - acc),
                f"commutator a={a} b={b}",
            )

    if conformal_gen is not None:
        L = EnvElem({intern_word(((-1, conformal_gen),)): ctx.one})
        for a in pool:
            diff = zhu_product(ctx, L, a) - zhu_product(ctx, a, L)
            report.add(
                "conformal_centrality", ospan.contains(diff), f"[L],[{a}]"
            )

    small = [e for e in pool if (e.weight(ctx) or 0) <= max(1, max_weight - 1)]
    for a in small:
        for b in small:
            zeta = -1 if (a.parity(ctx) and b.parity(ctx)) else 1
            for c in small:
                for r in range(assoc_window[0], assoc_window[1] + 1):
                    for s in range(assoc_window[0], assoc_window[1] + 1):
                        lhs = zhu_product_n(
                            ctx, zhu_product_n(ctx, a, r, b), s, c
                        )
                        rhs = _zhu_assoc_rhs(ctx, a, b, c, r, s, zeta)
                        report.add(
                            "n_product_associativity",
                            lhs == rhs,
                            f"zhu assoc r={r} s={s} a={a} b={b} c={c}",
                        )
    return report


def _zhu_assoc_rhs(ctx, a, b, c, r, s, zeta):
    """sum_{i,j} (-1)^i binom(-r-1, j) binom(r, i)
    (a *_{r-i} (b *_{s+i+j} c) - zeta (-1)^r b *_{s+r-i+j} (a *_i c)).

    Termination: x *_m y = 0 once m >= wt(x) + wt(y), binom(-r-1, j)
    vanishes past j = -r-1 for r < 0, and binom(r, i) past i = r for
    r >= 0; the remaining ranges are cut by the weight bounds."""
    wa = a.weight(ctx) or Fraction(0)
    wb = b.weight(ctx) or Fraction(0)
    wc = c.weight(ctx) or Fraction(0)
    out = EnvElem()
    sign_r = -1 if r & 1 else 1
    j_max = (-r - 1) if r < 0 else floor(wa + wb + wc) - s + 2
    i_cut = floor(max(wb + wc - s, wa + wc)) + 2
    for j in range(0, j_max + 1):
        bj = binom(-r - 1, j)
        if not bj:
            continue
        i_max = r if r >= 0 else i_cut
        for i in range(0, i_max + 1):
            bi = binom(r, i)
            if not bi:
                continue
            coeff = bj * bi * (-1) ** (i & 1)
            inner1 = zhu_product_n(ctx, b, s + i + j, c)
            if inner1:
                t1 = zhu_product_n(ctx, a, r - i, inner1)
                if t1:
                    out = out + t1 * ctx.coeff(coeff)
            inner2 = zhu_product_n(ctx, a, i, c)
            if inner2:
                t2 = zhu_product_n(ctx, b, s + r - i + j, inner2)
                if t2:
                    out = out - t2 * ctx.coeff(zeta * sign_r * coeff)
    return out


# ---------------------------------------------------------------------------
# U(g) and the affine Zhu isomorphism
# ---------------------------------------------------------------------------


class UnivEnveloping:
    """PBW arithmetic in U(g) for the weight-1 generators of an affine
    presentation: elements are dicts word-tuple -> Scalar with words
    nondecreasing in the fixed basis order."""

    def __init__(self, ctx: EnvContext):
        pres = ctx.pres
        self.basis = [g.name for g in pres.generators if g.weight == 1]
        self.index = {g: i for i, g in enumerate(self.basis)}
        self.brackets = {}
        for x in self.basis:
            for y in self.basis:
                prod = pres.tth_product(pres.gen(x), pres.gen(y), 0)
                coords = {}
                for (g, k), s in prod.gens.items():
                    if k != 0 or g not in self.index:
                        raise ZhuError("affine bracket leaves the current span")
                    coords[g] = ctx.coeff(s)
                self.brackets[(x, y)] = coords

    def normalize(self, word, coeff, out):
        """Accumulate coeff * (product of the generators in word) into out
        in PBW normal form."""
        for pos in range(len(word) - 1):
            if self.index[word[pos]] > self.index[word[pos + 1]]:
                x, y = word[pos], word[pos + 1]
                swapped = word[:pos] + (y, x) + word[pos + 2 :]
                self.normalize(swapped, coeff, out)
                for g, s in self.brackets[(x, y)].items():
                    self.normalize(
                        word[:pos] + (g,) + word[pos + 2 :], coeff * s, out
                    )
                return
        prev = out.get(word)
        total = coeff if prev is None else prev + coeff
        if total:
            out[word] = total
        elif word in out:
            del out[word]

    def product(self, u: dict, v: dict) -> dict:
        out = {}
        for wu, cu in u.items():
            for wv, cv in v.items():
                self.normalize(wu + wv, cu * cv, out)
        return out

    def words_up_to(self, degree: int):
        words = [()]
        frontier = [()]
        for _ in range(degree):
            nxt = []
            for w in frontier:
                start = self.index[w[-1]] if w else 0
                for g in self.basis[start:]:
                    nxt.append(w + (g,))
            words.extend(nxt)
            frontier = nxt
        return words


@dataclass
class AffineZhuReport:
    degree_max: int
    beta_alpha_identity: bool
    bracket_respected: bool
    images_distinct: bool
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return (
            self.beta_alpha_identity
            and self.bracket_respected
            and self.images_distinct
        )


def alpha_state(ctx: EnvContext, word) -> EnvElem:
    """alpha(a^1 ... a^r) = a^r_(-1) ... a^1_(-1) vacuum."""
    out = EnvElem.vacuum(ctx)
    for g in word:
        out = nth_product(
            ctx, EnvElem({intern_word(((-1, g),)): ctx.one}), -1, out
        )
    return out


def beta_element(ctx: EnvContext, ug: UnivEnveloping, x: EnvElem) -> dict:
    """beta(a^1_{n_1} ... a^r_{n_r} vac) = (-1)^{r + sum n_i} a^r ... a^1."""
    out = {}
    for wid, c in x.terms.items():
        word = _WORDS[wid]
        gens = tuple(g for _t, g in reversed(word))
        for _t, g in word:
            if g not in ug.index:
                raise ZhuError(f"state involves non-affine generator {g}")
        sign = (-1) ** ((len(word) + sum(t for t, _g in word)) & 1)
        ug.normalize(gens, ctx.coeff(c) * sign, out)
    return out


def affine_zhu_iso(ctx: EnvContext, degree_max: int = 2,
                   o_bound=None) -> AffineZhuReport:
    """Verify beta(alpha(w)) = w for all U(g) PBW words of degree <=
    degree_max, that alpha respects the bracket modulo the bounded O-span,
    and that distinct words have distinct reduced images."""
    ug = UnivEnveloping(ctx)
    if not ug.basis:
        raise ZhuError("context has no weight-1 generators")
    if o_bound is None:
        o_bound = degree_max + 2
    ospan = OSpan(ctx, o_bound)
    failures = []

    words = ug.words_up_to(degree_max)
    beta_alpha = True
    for w in words:
        img = alpha_state(ctx, w)
        back = beta_element(ctx, ug, img)
        want = {}
        ug.normalize(w, ctx.coeff(1), want)
        if back != want:
            beta_alpha = False
            failures.append(f"beta(alpha({w})) != {w}")

    bracket_ok = True
    for x in ug.basis:
        for y in ug.basis:
            lhs = alpha_state(ctx, (x, y)) - alpha_state(ctx, (y, x))
            rhs = EnvElem()
            for g, s in ug.brackets[(x, y)].items():
                rhs = rhs + alpha_state(ctx, (g,)) * s
            if not ospan.contains(lhs - rhs):
                bracket_ok = False
                failures.append(f"alpha([{x},{y}]) mismatch")

    reps = []
    distinct = True
    for w in words:
        rep = tuple(sorted(ospan.reduce(alpha_state(ctx, w)).items(),
                           key=lambda kv: kv[0]))
        reps.append(rep)
    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            if reps[i] == reps[j]:
                distinct = False
                failures.append(f"images of {words[i]} and {words[j]} collide")
    return AffineZhuReport(degree_max, beta_alpha, bracket_ok, distinct, failures)
