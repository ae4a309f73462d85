"""Numerical homotopy invariants: Toomer / LS-category bounds, Massey triple
products, the elliptic degree-sequence test, trichotomy evidence, TC cup
length, and loop-space homology via PBW counting.

Window honesty: every bound derived from cohomology carries a flag telling
whether H^{>N} = 0 was certified or merely observed in the window.
"""

import math

from .algebra import AlgElement, ONE, monomial_word_length
from .cdga import (FiniteCDGA, cohomology, cohomology_algebra, complex_of,
                   tensor_finite)
from .errors import DegreeError, RhtError, UnsupportedInputError
from .linalg import Echelon, RationalMatrix, solve_linear
from .minimal_model import MinimalModelResult, is_minimal


# ---------------------------------------------------------------------------
# Toomer invariant and LS category bounds
# ---------------------------------------------------------------------------

class WordTruncationComplex:
    """(Lambda V / Lambda^{>m} V, d-bar): monomials of word length <= m."""

    def __init__(self, pres, m, budget=None):
        self.pres = pres
        self.m = m
        self.cx = complex_of(pres)
        self._basis = {}
        self._index = {}

    def basis(self, k):
        if k not in self._basis:
            keep = [i for i, mono in enumerate(self.cx.basis(k))
                    if monomial_word_length(mono) <= self.m]
            self._basis[k] = keep
            self._index[k] = {amb: pos for pos, amb in enumerate(keep)}
        return self._basis[k]

    def dim(self, k):
        return len(self.basis(k))

    def project(self, k, amb_coords):
        self.basis(k)
        idx = self._index[k]
        return {idx[i]: c for i, c in amb_coords.items() if i in idx}

    def differential_column(self, k, i):
        amb = self.basis(k)[i]
        col = self.cx.differential_column(k, amb)
        return self.project(k + 1, col)

    def labels(self, k):
        lab = self.cx.labels(k)
        return [lab[i] for i in self.basis(k)]

    def multiply_coords(self, p, u, q, v):  # pragma: no cover - not used
        raise RhtError("truncated complexes are modules, not algebras")

    def unit_coords(self):
        return {0: ONE}

    def vanishes_above(self, n):
        return False


class ToomerReport:
    def __init__(self, value, word_bound, window, exact, failures):
        self.value = value            # least m with H(rho_m) injective, or None
        self.word_bound = word_bound
        self.window = window
        self.exact = exact            # True when H^{>window} = 0 was certified
        self.failures = failures      # m -> first degree where injectivity fails

    def __repr__(self):
        v = "e=%s" % self.value if self.value is not None else "e>%d" % self.word_bound
        return "ToomerReport(%s, window %d, %s)" % (
            v, self.window, "exact" if self.exact else "window-verified")


def toomer_invariant(p, word_bound=None, n=12, h_vanishes_above=None):
    """Least m such that H(Lambda V -> Lambda V/Lambda^{>m}V) is injective.

    Checked for every degree <= n; `h_vanishes_above` lets a caller certify
    H^{>bound} = 0 (e.g. from a finite quasi-isomorphic cdga), which makes
    the verdict exact once n covers that bound.
    """
    if not is_minimal(p):
        raise UnsupportedInputError("the Toomer invariant is computed on minimal models")
    rep = cohomology(p, 0, n)
    certified = rep.certified_above() or (h_vanishes_above is not None
                                          and h_vanishes_above <= n)
    if word_bound is None:
        if certified:
            top = max((k for k in range(0, n + 1) if rep.dim(k)), default=0)
            word_bound = max(top, 1)
        else:
            word_bound = 12
    failures = {}
    value = None
    for m in range(0, word_bound + 1):
        bad = _toomer_fails_at(p, rep, m, n)
        if bad is None:
            value = m
            break
        failures[m] = bad
    return ToomerReport(value, word_bound, n, certified, failures)


def _toomer_fails_at(p, rep, m, n):
    """First degree <= n where H(rho_m) is not injective, else None."""
    quot = WordTruncationComplex(p, m)
    for k in range(0, n + 1):
        h = rep.dim(k)
        if h == 0:
            continue
        qrep = _complex_cohomology(quot, k)
        cols = []
        for v in rep.representatives(k):
            cols.append(quot.project(k, v))
        # injective <=> no nonzero combination of projected reps is a boundary
        probe = Echelon()
        for b in qrep["boundaries"].rows:
            probe.add(dict(b[1]))
        rank = 0
        for c in cols:
            if probe.add(c):
                rank += 1
        if rank < h:
            return k
    return None


def _complex_cohomology(cxobj, k):
    """Kernel/boundary data of an adapter-like complex at one degree."""
    ncols = cxobj.dim(k)
    cols = [cxobj.differential_column(k, i) for i in range(ncols)]
    mat = RationalMatrix.from_columns(cxobj.dim(k + 1), cols)
    res = solve_linear(mat)
    bound = Echelon()
    for i in range(cxobj.dim(k - 1)):
        bound.add(cxobj.differential_column(k - 1, i))
    return {"cocycles": res.kernel, "boundaries": bound}


class CatReport:
    """Interval [e, upper] with a PD equality certificate when available."""

    def __init__(self, e, upper, certified, pd, cat_exact, window):
        self.e = e
        self.upper = upper
        self.certified = certified
        self.pd = pd
        self.cat_exact = cat_exact
        self.window = window

    def __repr__(self):
        s = "CatReport(e=%s, upper=%s%s" % (self.e, self.upper,
                                            "" if self.certified else " (window)")
        if self.cat_exact is not None:
            s += ", cat=%d by Poincare duality" % self.cat_exact
        return s + ")"


def is_poincare_duality(H, top=None):
    """Nondegenerate top pairing on a finite cdga with zero differential."""
    if H.diff:
        return False, None
    degs = [k for k in H.degrees() if H.dim(k)]
    m = top if top is not None else max(degs)
    if H.dim(m) != 1 or H.dim(0) != 1:
        return False, None
    for p in degs:
        q = m - p
        if H.dim(q) != H.dim(p):
            return False, None
        rows = []
        for i in range(H.dim(p)):
            row = {}
            for j in range(H.dim(q)):
                prod = H.product(p, i, q, j)
                if prod.get(0):
                    row[j] = prod[0]
            rows.append(row)
        ech = Echelon()
        rank = sum(1 for r in rows if ech.add(r))
        if rank != H.dim(p):
            return False, None
    return True, m


def cat_bounds(m, n=12, h_vanishes_above=None):
    """Toomer lower bound, H^{>top}=0 upper bound, PD-exact value when it applies.

    Accepts a MinimalModelResult (certification inherited from a finite
    target) or a bare minimal SullivanPresentation.
    """
    if isinstance(m, MinimalModelResult):
        model = m.model
        if isinstance(m.target, FiniteCDGA) and h_vanishes_above is None:
            h_vanishes_above = m.target.max_degree()
    else:
        model = m
    rep = cohomology(model, 0, n)
    certified = rep.certified_above() or (h_vanishes_above is not None
                                          and h_vanishes_above <= n)
    toomer = toomer_invariant(model, n=n, h_vanishes_above=h_vanishes_above)
    top = max((k for k in range(0, n + 1) if rep.dim(k)), default=0)
    H = cohomology_algebra(model, min(n, max(top, 0)))
    pd, pd_top = is_poincare_duality(H)
    cat_exact = None
    if pd and certified and toomer.value is not None:
        cat_exact = toomer.value
    return CatReport(toomer.value, top, certified, pd, cat_exact, n)


# ---------------------------------------------------------------------------
# Massey triple products
# ---------------------------------------------------------------------------

class MasseyResult:
    def __init__(self, defined, representative, rep_class, indeterminacy,
                 nontrivial, reason=None):
        self.defined = defined
        self.representative = representative    # element (AlgElement or coords)
        self.rep_class = rep_class              # class coordinates in H
        self.indeterminacy = indeterminacy      # list of class coordinate vectors
        self.nontrivial = nontrivial
        self.reason = reason

    def __repr__(self):
        if not self.defined:
            return "MasseyResult(undefined: %s)" % self.reason
        return "MasseyResult(%s, indeterminacy dim %d)" % (
            "nontrivial" if self.nontrivial else "trivial", len(self.indeterminacy))


def massey_triple(p, a, b, c, budget=None):
    """<a, b, c> with the convention  x c + (-1)^(deg a + 1) a y,  dx = ab, dy = bc.

    Inputs are cocycle AlgElements of a free presentation.  Returns a
    representative plus a basis of the indeterminacy [a] H + H [c]; the
    product is `nontrivial` iff the representative class falls outside the
    indeterminacy span.  Undefined (not an error) when [a][b] or [b][c] is
    nonzero in H.
    """
    cx = complex_of(p)
    for name, z in (("a", a), ("b", b), ("c", c)):
        if not z.is_zero() and not p.differential(z).is_zero():
            raise DegreeError("Massey input %s is not a cocycle" % name)
    da, db, dc = a.degree(), b.degree(), c.degree()
    if None in (da, db, dc):
        if a.is_zero() or b.is_zero() or c.is_zero():
            # A zero slot: the product is defined and trivially zero.
            zero = AlgElement.zero(p.ctx)
            return MasseyResult(True, zero, {}, [], False)
        raise DegreeError("Massey inputs must be homogeneous")
    ab = a * b
    bc = b * c
    x = _primitive(p, cx, ab, da + db)
    if x is None:
        return MasseyResult(False, None, None, None, None,
                            reason="[a][b] != 0 in cohomology")
    y = _primitive(p, cx, bc, db + dc)
    if y is None:
        return MasseyResult(False, None, None, None, None,
                            reason="[b][c] != 0 in cohomology")
    sign = (-1) ** (da + 1)
    rep_el = x * c + a.scale(sign) * y
    top = da + db + dc - 1
    hrep = cohomology(p, 0, top)
    rep_class = hrep.class_coordinates(top, cx.to_coords(rep_el, top)) if not rep_el.is_zero() else {}
    ind = Echelon()
    ind_classes = []
    for h in (hrep.representative_elements(db + dc - 1) if db + dc - 1 >= 0 else []):
        z = a * h
        if not z.is_zero():
            cls = hrep.class_coordinates(top, cx.to_coords(z, top))
            if cls and ind.add(dict(cls)):
                ind_classes.append(cls)
    for h in (hrep.representative_elements(da + db - 1) if da + db - 1 >= 0 else []):
        z = h * c
        if not z.is_zero():
            cls = hrep.class_coordinates(top, cx.to_coords(z, top))
            if cls and ind.add(dict(cls)):
                ind_classes.append(cls)
    nontrivial = bool(rep_class) and not ind.contains(rep_class)
    return MasseyResult(True, rep_el, rep_class, ind_classes, nontrivial)


def _primitive(p, cx, target, deg):
    """First-solution x with dx = target (degree deg cochain), or None."""
    if target.is_zero():
        return AlgElement.zero(p.ctx)
    cols = [cx.differential_column(deg - 1, i) for i in range(cx.dim(deg - 1))]
    mat = RationalMatrix.from_columns(cx.dim(deg), cols)
    sol = solve_linear(mat, targets=[cx.to_coords(target, deg)])
    if not sol.solvable[0]:
        return None
    return cx.from_coords(deg - 1, sol.solutions[0])


# ---------------------------------------------------------------------------
# Elliptic degree sequences
# ---------------------------------------------------------------------------

class DegreeSequence:
    """Even degrees 2a_i and odd degrees 2b_j - 1, stored by their halves."""

    def __init__(self, evens, odds):
        self.evens = sorted(int(a) for a in evens)
        self.odds = sorted(int(b) for b in odds)
        if any(a < 1 for a in self.evens) or any(b < 1 for b in self.odds):
            raise DegreeError("degree sequence entries must be >= 1")

    def degrees(self):
        return sorted([2 * a for a in self.evens] + [2 * b - 1 for b in self.odds])

    def __repr__(self):
        return "DegreeSequence(evens=%s, odds=%s)" % (self.evens, self.odds)


def _representable(b, values, min_coins=2, _memo=None):
    """b = sum k_l v_l with k_l >= 0 integers and sum k_l >= min_coins?"""
    values = tuple(sorted(set(values)))
    memo = _memo if _memo is not None else {}

    def rec(amount, idx, coins):
        if amount == 0:
            return coins >= min_coins
        if idx >= len(values):
            return False
        key = (amount, idx, min(coins, min_coins))
        if key in memo:
            return memo[key]
        v = values[idx]
        k = 0
        ok = False
        while k * v <= amount:
            if rec(amount - k * v, idx + 1, min(coins + k, min_coins)):
                ok = True
                break
            k += 1
        memo[key] = ok
        return ok

    return rec(b, 0, 0)


def elliptic_degrees_check(seq):
    """The degree-sequence realization condition for rationally elliptic spaces.

    For every nonempty subsequence S of the even halves, at least |S| of the
    odd halves b_i must be integral combinations b_i = sum k_l a_l over S
    with all k_l >= 0 and sum k_l >= 2.  Counting is per subsequence, each
    b_i counted once.  Returns (bool, failing subsequence or None).
    """
    evens = seq.evens
    odds = seq.odds
    n = len(evens)
    # Distinct sub-multisets only: realized as sorted tuples.
    seen = set()
    for mask in range(1, 1 << n):
        sub = tuple(sorted(evens[i] for i in range(n) if mask & (1 << i)))
        if sub in seen:
            continue
        seen.add(sub)
        memo = {}
        count = sum(1 for b in odds if _representable(b, sub, 2, memo))
        if count < len(sub):
            return False, list(sub)
    return True, None


# ---------------------------------------------------------------------------
# Trichotomy evidence
# ---------------------------------------------------------------------------

ELLIPTIC = "elliptic-evidence"
HYPERBOLIC = "hyperbolic-evidence"
INCONCLUSIVE = "inconclusive"


class TrichotomyReport:
    def __init__(self, ranks, chi_pi, alpha_estimate, refined_alpha, tag,
                 window, notes):
        self.ranks = ranks
        self.chi_pi = chi_pi
        self.alpha_estimate = alpha_estimate
        self.refined_alpha = refined_alpha    # (r, estimate): max over [n, n+r]
        self.tag = tag
        self.window = window
        self.notes = notes

    def __repr__(self):
        return ("TrichotomyReport(%s, chi_pi=%s, alpha~%.4f, window %d)"
                % (self.tag, self.chi_pi, self.alpha_estimate, self.window))


def trichotomy_report(result, n=None):
    """Rank table, homotopy Euler characteristic, growth estimate, evidence tag.

    Tags never claim a proof: elliptic-evidence needs a certified finite
    cohomology and no new generators in the last third of the window;
    hyperbolic-evidence needs the rank table to majorize a geometric
    sequence with ratio > 1 anchored at the start of the last half-window.
    """
    if n is None:
        n = result.certified_degree
    if n > result.certified_degree:
        raise DegreeError("window exceeds the certified degree")
    ranks = {k: result.ranks().get(k, 0) for k in range(2, n + 1)}
    chi_pi = sum(ranks[k] for k in ranks if k % 2 == 0) - \
        sum(ranks[k] for k in ranks if k % 2 == 1)
    alpha = 0.0
    for k, r in ranks.items():
        if r >= 1:
            alpha = max(alpha, math.log(r) / k)
    # Refined growth estimate: max over the sliding window [n0, n0 + r] with
    # r = window - 2 (the only full window in range starts at 2); an
    # estimate, never a certified limit.
    r_len = max(n - 2, 0)
    refined = 0.0
    for k in range(2, min(2 + r_len, n) + 1):
        if ranks.get(k, 0) >= 1:
            refined = max(refined, math.log(ranks[k]) / k)
    notes = ["growth/dichotomy theorems are cited as context, not certified "
             "from a finite window"]
    h_finite = isinstance(result.target, FiniteCDGA)
    if h_finite:
        notes.append("H certified finite dimensional (target is a finite cdga)")
    tail = max(1, -(-n // 3))        # ceil(n/3)
    quiet_tail = all(ranks.get(k, 0) == 0 for k in range(n - tail + 1, n + 1))
    tag = INCONCLUSIVE
    if quiet_tail and h_finite:
        tag = ELLIPTIC
    else:
        half = [k for k in range(n - n // 2 + 1, n + 1) if k >= 2]
        if half and all(ranks.get(k, 0) >= 1 for k in half):
            k0 = half[0]
            if all(ranks[k] > ranks[k0] for k in half[1:]):
                tag = HYPERBOLIC
                notes.append("ranks majorize a geometric sequence on [%d, %d]"
                             % (half[0], half[-1]))
    if tag == ELLIPTIC:
        notes.append("chi_pi computed over the full window; exact because no "
                     "generators appear in the last %d degrees" % tail)
    return TrichotomyReport(ranks, chi_pi, alpha, (r_len, refined), tag, n, notes)


# ---------------------------------------------------------------------------
# Topological complexity cup length
# ---------------------------------------------------------------------------

def tc_cup_length(H):
    """Cup length of ker(H (x) H -> H) for a finite cdga with zero differential."""
    if H.diff:
        raise UnsupportedInputError("TC cup length expects zero differential")
    if H.dim(0) != 1:
        raise UnsupportedInputError("TC cup length expects a connected algebra")
    T = tensor_finite(H, H)
    # Kernel of multiplication degree by degree.
    pair_of = {}
    for p in sorted(H.basis):
        for q in sorted(H.basis):
            for i in range(H.dim(p)):
                for j in range(H.dim(q)):
                    label = "%s(x)%s" % (H.label(p, i), H.label(q, j))
                    pair_of[(p + q, label)] = (p, i, q, j)
    kernel = {}        # degree -> list of T-coordinate vectors
    for k in sorted(T.basis):
        cols = []
        for t_idx, label in enumerate(T.basis[k]):
            p, i, q, j = pair_of[(k, label)]
            cols.append(H.product(p, i, q, j))
        mat = RationalMatrix.from_columns(H.dim(k), cols)
        ker = solve_linear(mat).kernel
        if ker:
            kernel[k] = ker
    if not kernel:
        return 0
    current = {k: list(vs) for k, vs in kernel.items()}
    length = 1
    top = max(T.basis)
    while True:
        nxt = {}
        for k1, vs in kernel.items():
            for k2, ws in current.items():
                k = k1 + k2
                if k > top:
                    continue
                for v in vs:
                    for w in ws:
                        prod = T.multiply_coords(k1, v, k2, w)
                        if prod:
                            nxt.setdefault(k, Echelon())
                            nxt[k].add(prod)
        nxt = {k: [dict(r[1]) for r in e.rows] for k, e in nxt.items() if e.dim}
        if not nxt:
            return length
        current = nxt
        length += 1


# ---------------------------------------------------------------------------
# Loop-space homology via PBW
# ---------------------------------------------------------------------------

def loop_homology_dims(lie_dims, n):
    """dim H_k(Omega X; Q) for k <= n from dim L_k (simply connected case).

    PBW: U L has the generating series
    prod_{odd k} (1 + t^k)^{dim L_k} * prod_{even k} (1 - t^k)^{-dim L_k}.
    Input: {k: dim L_k} for k >= 1, a LieTable, or a MinimalModelResult
    (then dim L_k = rk_{k+1}).
    """
    if isinstance(lie_dims, MinimalModelResult):
        ranks = lie_dims.ranks()
        dims = {k: ranks.get(k + 1, 0) for k in range(1, n + 1)}
    elif hasattr(lie_dims, "dims"):
        dims = {k: d for k, d in lie_dims.dims().items() if k >= 1}
    else:
        dims = {int(k): int(v) for k, v in lie_dims.items() if int(k) >= 1}
    series = [0] * (n + 1)
    series[0] = 1
    for k in sorted(dims):
        if k > n or dims[k] == 0:
            continue
        e = dims[k]
        factor = [0] * (n + 1)
        if k % 2 == 1:
            for m_ in range(0, n // k + 1):
                if m_ <= e:
                    factor[k * m_] = math.comb(e, m_)
        else:
            for m_ in range(0, n // k + 1):
                factor[k * m_] = math.comb(e + m_ - 1, m_)
        series = _poly_mul(series, factor, n)
    return {k: series[k] for k in range(0, n + 1)}


def _poly_mul(a, b, n):
    out = [0] * (n + 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj and i + j <= n:
                    out[i + j] += ai * bj
    return out
