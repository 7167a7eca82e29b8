"""The enveloping vertex algebra of a presentation at bounded weight.

States are linear combinations of PBW words: sequences of negative modes
(t, generator) with t <= -1 acting on the vacuum, kept sorted ascending by
(t, name); repeated odd modes are rewritten through [x, x]/2.  Central
symbols are specialized to scalars on context construction, so the universal
quotient U(R)/(k - value) is what is actually modelled.

Words are interned into small integer ids (shared globally across contexts)
and every computation runs on dicts keyed by those ids; EnvElem is a thin
wrapper over such a dict.  Every product is exact: weight bounds only cut
off sums that vanish identically because the algebra is graded in
nonnegative weights.  When neither the bracket table nor the
specializations mention parameters, all coefficients are plain ints or
Fractions, otherwise Scalars.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial, floor, gcd

from .scalars import Scalar, binom
from .vlie import EVEN, ODD, RElem, VLieError, VLiePresentation

# global word registry: word tuples <-> small int ids; VACUUM is id 0
_WID = {(): 0}
_WORDS = [()]


def intern_word(word) -> int:
    wid = _WID.get(word)
    if wid is None:
        wid = len(_WORDS)
        _WID[word] = wid
        _WORDS.append(word)
    return wid


def word_of(wid: int):
    return _WORDS[wid]


VACUUM = 0


class EnvelopeError(VLieError):
    pass


class EnvContext:
    """Presentation + central specializations + mode caches.

    The PBW order on modes is (t ascending, generator name); a normalized
    word lists its modes in that order.  All caches are per-context and
    never invalidated: contexts are immutable after construction.
    """

    def __init__(self, pres: VLiePresentation, specialize: dict, name: str = ""):
        if not pres.graded:
            raise EnvelopeError("envelope needs a graded presentation")
        for g in pres.generators:
            if g.weight <= 0:
                raise EnvelopeError(
                    f"generator {g.name} has weight {g.weight}; the envelope "
                    "needs strictly positive generator weights"
                )
        missing = [z for z in pres.centrals if z not in specialize]
        if missing:
            raise EnvelopeError(f"centrals not specialized: {missing}")
        self.pres = pres
        self.name = name or pres.name
        self.weights = {g.name: g.weight for g in pres.generators}
        self.parities = {g.name: g.parity for g in pres.generators}
        self.specialize = {z: Scalar.coerce(v) for z, v in specialize.items()}

        self.products = {}
        names = list(self.weights)
        for a in names:
            for b in names:
                self.products[(a, b)] = tuple(
                    pres.tth_products(pres.gen(a), pres.gen(b))
                )

        numeric = all(v.is_constant() for v in self.specialize.values())
        if numeric:
            for prods in self.products.values():
                for _i, relem in prods:
                    if any(not s.is_constant() for s in relem.gens.values()):
                        numeric = False
                    if any(not s.is_constant() for s in relem.centrals.values()):
                        numeric = False
        self.numeric = numeric
        self.one = 1 if numeric else Scalar.rational(1)

        self._apply_cache = {}
        self._nprod_cache = {}
        self._bracket_cache = {}
        self._trans_cache = {}
        self._wt = {VACUUM: Fraction(0)}
        self._par = {VACUUM: 0}

    def coeff(self, value):
        """Coerce an external coefficient into the context's scalar type."""
        if self.numeric:
            if isinstance(value, Scalar):
                value = value.constant_value()
            value = Fraction(value)
            return int(value) if value.denominator == 1 else value
        return Scalar.coerce(value)

    def _num(self, s: Scalar):
        if not self.numeric:
            return s
        v = s.constant_value()
        return int(v) if v.denominator == 1 else v

    def mode_weight(self, mode) -> Fraction:
        t, g = mode
        return self.weights[g] - t - 1

    def wid_weight(self, wid: int) -> Fraction:
        w = self._wt.get(wid)
        if w is None:
            w = Fraction(0)
            for t, g in _WORDS[wid]:
                w += self.weights[g] - t - 1
            self._wt[wid] = w
        return w

    def wid_parity(self, wid: int) -> int:
        p = self._par.get(wid)
        if p is None:
            p = 0
            for _t, g in _WORDS[wid]:
                p ^= self.parities[g]
            self._par[wid] = p
        return p

    def word_weight(self, word) -> Fraction:
        return self.wid_weight(intern_word(tuple(word)))

    def word_parity(self, word) -> int:
        return self.wid_parity(intern_word(tuple(word)))

    def mode_bracket_spec(self, a: str, t: int, b: str, s: int):
        """[a_t, b_s] with centrals specialized: (modes, constant) where
        modes is a tuple of (gen, index, coeff) and constant multiplies the
        identity."""
        key = (a, t, b, s)
        hit = self._bracket_cache.get(key)
        if hit is not None:
            return hit
        mode_terms = {}
        const = None
        for i, relem in self.products[(a, b)]:
            bc = binom(t, i)
            if not bc:
                continue
            u = t + s - i
            for (g, k), sc in relem.gens.items():
                factor = (-1) ** (k & 1) * factorial(k) * binom(u, k)
                if not factor:
                    continue
                c = self._num(sc) * (bc * factor)
                mk = (g, u - k)
                prev = mode_terms.get(mk)
                mode_terms[mk] = c if prev is None else prev + c
            if u == -1 and relem.centrals:
                for z, sc in relem.centrals.items():
                    c = self._num(sc * self.specialize[z]) * bc
                    const = c if const is None else const + c
        result = (
            tuple((g, idx, c) for (g, idx), c in mode_terms.items() if c),
            const if const else None,
        )
        self._bracket_cache[key] = result
        return result


class EnvElem:
    """Linear combination of PBW words, keyed by interned word ids."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {w: c for w, c in (terms or {}).items() if c}

    @staticmethod
    def vacuum(ctx: EnvContext) -> "EnvElem":
        return EnvElem({VACUUM: ctx.one})

    @staticmethod
    def from_words(ctx: EnvContext, word_coeffs: dict) -> "EnvElem":
        """Element with given coefficients on already-normalized PBW words."""
        return EnvElem(
            {intern_word(tuple(w)): ctx.coeff(c) for w, c in word_coeffs.items()}
        )

    @staticmethod
    def state(ctx: EnvContext, modes) -> "EnvElem":
        """Normalized state for a raw mode sequence (applied left to right);
        modes are (generator, t) pairs."""
        seq = tuple((int(t), g) for g, t in modes)
        return EnvElem(_word_to_dict(ctx, seq))

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        t = dict(self.terms)
        _add_into(t, other.terms, None)
        return EnvElem(t)

    def __sub__(self, other):
        t = dict(self.terms)
        for w, c in other.terms.items():
            prev = t.get(w)
            t[w] = -c if prev is None else prev - c
        return EnvElem(t)

    def __neg__(self):
        return EnvElem({w: -c for w, c in self.terms.items()})

    def __mul__(self, s):
        if not s:
            return EnvElem()
        if s == 1:
            return self
        return EnvElem({w: c * s for w, c in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, EnvElem) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def words(self):
        """Terms as {word tuple: coeff}."""
        return {_WORDS[w]: c for w, c in self.terms.items()}

    def weight(self, ctx: EnvContext):
        """Weight when homogeneous, else raises."""
        ws = {ctx.wid_weight(w) for w in self.terms}
        if not ws:
            return None
        if len(ws) > 1:
            raise EnvelopeError("inhomogeneous state")
        return ws.pop()

    def homogeneous_parts(self, ctx: EnvContext):
        parts = {}
        for w, c in self.terms.items():
            parts.setdefault(ctx.wid_weight(w), {})[w] = c
        return {h: EnvElem(t) for h, t in sorted(parts.items())}

    def parity(self, ctx: EnvContext):
        ps = {ctx.wid_parity(w) for w in self.terms}
        if not ps:
            return None
        if len(ps) > 1:
            raise EnvelopeError("mixed-parity state")
        return ps.pop()

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for wid, c in sorted(
            self.terms.items(), key=lambda kv: _WORDS[kv[0]]
        ):
            cs = str(c)
            body = " ".join(f"{g}({t})" for t, g in _WORDS[wid])
            body = (body + " vac") if body else "vac"
            if cs == "1":
                parts.append(body)
            elif cs == "-1":
                parts.append("-" + body)
            else:
                head = f"({cs})" if " " in cs else cs
                parts.append(f"{head} {body}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"EnvElem({self})"


# ---------------------------------------------------------------------------
# dict-level primitives (hot paths); term dicts are keyed by word ids
# ---------------------------------------------------------------------------


def _add_into(dst: dict, src: dict, coeff):
    if not src:
        return
    get = dst.get
    if coeff is None or coeff == 1:
        if not dst:
            dst.update(src)
            return
        for w, c in src.items():
            prev = get(w)
            if prev is None:
                dst[w] = c
            else:
                prev = prev + c
                if prev:
                    dst[w] = prev
                else:
                    del dst[w]
    else:
        for w, c in src.items():
            c = c * coeff
            if not c:
                continue
            prev = get(w)
            if prev is None:
                dst[w] = c
            else:
                prev = prev + c
                if prev:
                    dst[w] = prev
                else:
                    del dst[w]


def _apply_mono(ctx: EnvContext, g: str, t: int, wid: int) -> dict:
    """Apply the mode g_(t) to a normalized word id; returns {wid: coeff}."""
    key = (g, t, wid)
    hit = ctx._apply_cache.get(key)
    if hit is not None:
        return hit

    word = _WORDS[wid]
    if not word:
        out = {} if t >= 0 else {intern_word(((t, g),)): ctx.one}
        ctx._apply_cache[key] = out
        return out

    head = word[0]
    mk = (t, g)
    ht, hg = head
    if mk < head:
        out = {intern_word((mk,) + word): ctx.one}
    elif mk == head:
        if ctx.parities[g] == ODD:
            # odd square: x x = [x, x]/2
            rest = intern_word(word[1:])
            modes, const = ctx.mode_bracket_spec(g, t, g, t)
            out = {}
            half = Fraction(1, 2)
            for g2, t2, c in modes:
                _add_into(out, _apply_mono(ctx, g2, t2, rest), c * half)
            if const is not None:
                _add_into(out, {rest: ctx.one}, const * half)
        else:
            out = {intern_word((mk,) + word): ctx.one}
    else:
        rest = intern_word(word[1:])
        sign = -1 if (ctx.parities[g] and ctx.parities[hg]) else 1
        inner = _apply_mono(ctx, g, t, rest)
        out = {}
        for w, c in inner.items():
            csign = c if sign == 1 else -c
            _add_into(out, _apply_mono(ctx, hg, ht, w), csign)
        modes, const = ctx.mode_bracket_spec(g, t, hg, ht)
        for g2, t2, c in modes:
            _add_into(out, _apply_mono(ctx, g2, t2, rest), c)
        if const is not None:
            _add_into(out, {rest: ctx.one}, const)

    ctx._apply_cache[key] = out
    return out


def _apply_dict(ctx, g, t, terms: dict) -> dict:
    out = {}
    for w, c in terms.items():
        _add_into(out, _apply_mono(ctx, g, t, w), c)
    return out


def _word_to_dict(ctx, modes) -> dict:
    """Normalize a raw (t, gen) sequence applied to the vacuum."""
    out = {VACUUM: ctx.one}
    for t, g in reversed(modes):
        out = _apply_dict(ctx, g, t, out)
    return out


def _nprod_mono(ctx: EnvContext, uid: int, n: int, vid: int) -> dict:
    """(state uid)_(n) (state vid) through the head-splitting recursion."""
    key = (uid, n, vid)
    hit = ctx._nprod_cache.get(key)
    if hit is not None:
        return hit

    wu = _WORDS[uid]
    if not wu:
        out = {vid: ctx.one} if n == -1 else {}
        ctx._nprod_cache[key] = out
        return out

    t, a = wu[0]
    wid_tail = intern_word(wu[1:])
    ha = ctx.weights[a]
    wt_w = ctx.wid_weight(wid_tail)
    wt_v = ctx.wid_weight(vid)
    zeta = -1 if (ctx.parities[a] and ctx.wid_parity(wid_tail)) else 1
    sign_t = -1 if t & 1 else 1

    out = {}
    # sum_i (-1)^i binom(t,i) a_(t-i) (w_(n+i) v)
    imax1 = floor(wt_w + wt_v - n - 1)
    if t >= 0:
        imax1 = min(imax1, t)
    for i in range(0, imax1 + 1):
        bc = binom(t, i)
        if not bc:
            continue
        inner = _nprod_mono(ctx, wid_tail, n + i, vid)
        if not inner:
            continue
        coeff = bc if not i & 1 else -bc
        _add_into(out, _apply_dict(ctx, a, t - i, inner), coeff)
    # - zeta (-1)^t sum_i (-1)^i binom(t,i) w_(n+t-i) (a_(i) v)
    imax2 = floor(ha + wt_v - 1)
    if t >= 0:
        imax2 = min(imax2, t)
    for i in range(0, imax2 + 1):
        bc = binom(t, i)
        if not bc:
            continue
        inner = _apply_mono(ctx, a, i, vid)
        if not inner:
            continue
        coeff = -zeta * sign_t * (bc if not i & 1 else -bc)
        acc = {}
        for w2, c2 in inner.items():
            _add_into(acc, _nprod_mono(ctx, wid_tail, n + t - i, w2), c2)
        _add_into(out, acc, coeff)

    ctx._nprod_cache[key] = out
    return out


def _nprod_dicts(ctx, du: dict, n: int, dv: dict) -> dict:
    out = {}
    for wu, cu in du.items():
        for wv, cv in dv.items():
            _add_into(out, _nprod_mono(ctx, wu, n, wv), cu * cv)
    return out


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def apply_mode(ctx: EnvContext, mode, v: EnvElem) -> EnvElem:
    """Action of a generator mode (name, t) on a state, exactly."""
    g, t = mode
    if g not in ctx.weights:
        raise EnvelopeError(f"unknown generator {g!r}")
    return EnvElem(_apply_dict(ctx, g, int(t), v.terms))


def generator_state(ctx: EnvContext, name: str) -> EnvElem:
    return EnvElem(_apply_mono(ctx, name, -1, VACUUM))


def _translate_mono(ctx: EnvContext, wid: int) -> dict:
    hit = ctx._trans_cache.get(wid)
    if hit is None:
        out = {}
        word = _WORDS[wid]
        for j, (t, g) in enumerate(word):
            bumped = word[:j] + ((t - 1, g),) + word[j + 1 :]
            _add_into(out, _word_to_dict(ctx, bumped), -t)
        ctx._trans_cache[wid] = hit = out
    return hit


def translate(ctx: EnvContext, v: EnvElem) -> EnvElem:
    """The translation operator T: derivation with g_(t) -> -t g_(t-1)."""
    out = {}
    for wid, c in v.terms.items():
        _add_into(out, _translate_mono(ctx, wid), c)
    return EnvElem(out)


def translate_div(ctx: EnvContext, v: EnvElem, j: int) -> EnvElem:
    """Divided power T^{(j)} v."""
    out = v
    for _ in range(j):
        out = translate(ctx, out)
    return out * Fraction(1, factorial(j)) if j else v


def nth_product(ctx: EnvContext, u: EnvElem, n: int, v: EnvElem) -> EnvElem:
    """u_(n) v via the associativity-formula recursion on the PBW word of u."""
    return EnvElem(_nprod_dicts(ctx, u.terms, int(n), v.terms))


def basis_wids(ctx: EnvContext, h_max) -> dict:
    """All PBW basis word ids of weight <= h_max, grouped by weight."""
    h_max = Fraction(h_max)
    modes = []
    for g, h in ctx.weights.items():
        t = -1
        while h - t - 1 <= h_max:
            modes.append((t, g))
            t -= 1
    modes.sort()
    by_weight = {}

    def rec(start, weight, word):
        by_weight.setdefault(weight, []).append(intern_word(tuple(word)))
        for idx in range(start, len(modes)):
            m = modes[idx]
            w = weight + ctx.mode_weight(m)
            if w > h_max:
                continue
            if word and m == word[-1] and ctx.parities[m[1]] == ODD:
                continue
            word.append(m)
            rec(idx, w, word)
            word.pop()

    rec(0, Fraction(0), [])
    return {
        h: sorted(ws, key=lambda wid: _WORDS[wid])
        for h, ws in sorted(by_weight.items())
    }


def basis_words(ctx: EnvContext, h_max) -> dict:
    """All PBW basis words (as tuples) of weight <= h_max, by weight."""
    return {
        h: [_WORDS[wid] for wid in ws] for h, ws in basis_wids(ctx, h_max).items()
    }


def _weight_grid(weights, h_max):
    denom = 1
    for w in weights:
        denom = denom * w.denominator // gcd(denom, w.denominator)
    h_max = Fraction(h_max)
    return [Fraction(i, denom) for i in range(int(h_max * denom) + 1)]


def graded_dimension(ctx: EnvContext, h_max) -> list:
    """[(weight, dim)] on the full weight grid up to h_max, by PBW
    enumeration."""
    counts = {h: len(ws) for h, ws in basis_wids(ctx, h_max).items()}
    grid = _weight_grid(list(ctx.weights.values()) or [Fraction(1)], h_max)
    return [(h, counts.get(h, 0)) for h in grid]


def sr_graded_dimension(pres: VLiePresentation, h_max) -> list:
    """Independent symmetric-algebra count: the generating function of
    S*(free K[T]-module on the generators), even symbols T^j a contributing
    1/(1 - q^(h_a + j)) and odd ones (1 + q^(h_a + j)).  Centrals are
    specialized away and do not count."""
    h_max = Fraction(h_max)
    grid = _weight_grid([g.weight for g in pres.generators] or [Fraction(1)], h_max)
    denom = grid[1].denominator if len(grid) > 1 else 1
    n_max = int(h_max * denom)
    series = [0] * (n_max + 1)
    series[0] = 1
    for g in pres.generators:
        j = 0
        while g.weight + j <= h_max:
            step = int((g.weight + j) * denom)
            if g.parity == ODD:
                new = series[:]
                for i in range(n_max - step + 1):
                    new[i + step] += series[i]
                series = new
            else:
                for i in range(step, n_max + 1):
                    series[i] += series[i - step]
            j += 1
    return [(Fraction(i, denom), series[i]) for i in range(n_max + 1)]


def locality_order_env(ctx: EnvContext, a: EnvElem, b: EnvElem) -> int:
    """Least n with a_(i) b = 0 for all i >= n, probed downward from the
    weight bound (finite for nonzero graded states)."""
    if a.is_zero() or b.is_zero():
        return 0
    top = floor(a.weight(ctx) + b.weight(ctx))
    low = -2 * (abs(top) + 2)
    for i in range(top, low, -1):
        if nth_product(ctx, a, i, b):
            return i + 1
    return low + 1


# ---------------------------------------------------------------------------
# C2 quotient
# ---------------------------------------------------------------------------


class C2Report:
    """Graded dimensions and Poisson structure of V / C2(V) up to a weight.

    C2(V)_h is spanned by (Tu)_(-1) v over basis states; the quotient
    carries the commutative product u_(-1) v and the bracket u_(0) v, both
    given on quotient-basis representatives modulo the span."""

    def __init__(self, dims, quotient_basis, product, bracket):
        self.dims = dims
        self.quotient_basis = quotient_basis
        self.product = product
        self.bracket = bracket

    @property
    def bracket_vanishes(self) -> bool:
        return all(not rep for rep in self.bracket.values())


def c2_quotient(ctx: EnvContext, h_max) -> C2Report:
    """Exact per-weight row reduction of C2(V) = span{(Tu)_(-1) v}."""
    from .linalg import LinearSpan

    h_max = Fraction(h_max)
    basis = basis_wids(ctx, h_max)
    spans = {h: LinearSpan(wids) for h, wids in basis.items()}
    all_states = [(h, wid) for h, wids in basis.items() for wid in wids]
    for hu, u in all_states:
        if u == VACUUM:
            continue
        tu = _translate_mono(ctx, u)
        for hv, v in all_states:
            h = hu + 1 + hv
            if h > h_max:
                continue
            vec = {}
            for w, c in tu.items():
                _add_into(vec, _nprod_mono(ctx, w, -1, v), c)
            if vec:
                spans[h].add(vec)

    grid = _weight_grid(list(ctx.weights.values()) or [Fraction(1)], h_max)
    dims = []
    quotient_basis = {}
    for h in grid:
        words = basis.get(h, [])
        span = spans.get(h)
        pivots = set(span.pivot_columns()) if span else set()
        qbasis = [wid for wid in words if wid not in pivots]
        quotient_basis[h] = qbasis
        dims.append((h, len(qbasis)))

    product = {}
    bracket = {}
    flat = [(h, wid) for h, wids in quotient_basis.items() for wid in wids]
    for hu, u in flat:
        for hv, v in flat:
            if hu + hv <= h_max:
                target = spans[hu + hv]
                rep = target.reduce(
                    {w: c for w, c in _nprod_mono(ctx, u, -1, v).items()}
                )
                product[(_WORDS[u], _WORDS[v])] = {
                    _WORDS[w]: c for w, c in rep.items()
                }
            hb = hu + hv - 1
            if 0 <= hb <= h_max and hb in spans:
                rep = spans[hb].reduce(
                    {w: c for w, c in _nprod_mono(ctx, u, 0, v).items()}
                )
                bracket[(_WORDS[u], _WORDS[v])] = {
                    _WORDS[w]: c for w, c in rep.items()
                }
    return C2Report(dims, {h: [_WORDS[w] for w in ws] for h, ws in quotient_basis.items()},
                    product, bracket)
