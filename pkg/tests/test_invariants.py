import itertools
import random
from fractions import Fraction

import pytest

from rht.algebra import AlgElement, GeneratorContext
from rht.cdga import SullivanPresentation, cohomology, cohomology_algebra, validate
from rht.constructions import cp, sphere, tensor_presentations, torus
from rht.errors import UnsupportedInputError
from rht.invariants import (DegreeSequence, cat_bounds, elliptic_degrees_check,
                            loop_homology_dims, massey_triple, tc_cup_length,
                            toomer_invariant, trichotomy_report,
                            ELLIPTIC, HYPERBOLIC)
from rht.minimal_model import minimal_model

from conftest import nonformal_uvw, sphere2_model, wedge_two_s2_cohomology


# ---------------------------------------------------------------------------
# Toomer / cat
# ---------------------------------------------------------------------------

def test_toomer_spheres(s2):
    assert toomer_invariant(s2, n=8, h_vanishes_above=2).value == 1
    s3 = sphere(3)
    assert toomer_invariant(s3, n=8).value == 1


def test_toomer_cp_n():
    for n in (2, 3, 4):
        model = cp(n)
        rep = toomer_invariant(model, n=2 * n + 2, h_vanishes_above=2 * n)
        assert rep.value == n
        assert rep.exact
        # injectivity must fail at word bound n-1
        assert (n - 1) in rep.failures


def test_toomer_trivial_model():
    q = SullivanPresentation(GeneratorContext([]), {}, name="Q")
    assert toomer_invariant(q, n=4).value == 0


def test_cat_cp3_poincare_duality_exact():
    H = cohomology_algebra(cp(3), 6)
    mm = minimal_model(H, 9)
    rep = cat_bounds(mm, n=9)
    assert rep.e == 3
    assert rep.pd
    assert rep.cat_exact == 3
    assert rep.upper == 6


def test_cat_product_formula_via_toomer():
    # e is additive on tensor products of catalog models with PD cohomology.
    pairs = [
        (sphere(2), sphere(3), 1, 1),
        (sphere(3), sphere(5), 1, 1),
        (sphere(2), sphere(2), 1, 1),
        (cp(2), sphere(3), 2, 1),
        (sphere(3), sphere(3), 1, 1),
    ]
    for p1, p2, e1, e2 in pairs:
        t = tensor_presentations(p1, p2)
        top = {"S2": 2, "S3": 3, "S5": 5, "CP2": 4}
        bound = top[p1.name] + top[p2.name]
        rep = toomer_invariant(t, n=bound + 2, h_vanishes_above=bound)
        assert rep.value == e1 + e2, (p1.name, p2.name, rep.value)


def test_cat_s2_x_s3_is_two():
    t = tensor_presentations(sphere(2), sphere(3))
    rep = cat_bounds(t, n=7, h_vanishes_above=5)
    assert rep.e == 2
    assert rep.pd and rep.cat_exact == 2      # cat(S2) + cat(S3) = 1 + 1


def test_cat_interval_never_inverted(s2):
    rep = cat_bounds(s2, n=8, h_vanishes_above=2)
    assert rep.e <= rep.upper
    assert rep.cat_exact == 1


def test_cat_point():
    # (Lambda u, 0) for odd u: e = cat = 1
    rep = cat_bounds(sphere(3), n=7)
    assert rep.e == 1 and rep.upper == 3 and rep.cat_exact == 1


# ---------------------------------------------------------------------------
# Massey products
# ---------------------------------------------------------------------------

def test_massey_nonformal_example(uvw):
    u, v = uvw.ctx.generator("u"), uvw.ctx.generator("v")
    res = massey_triple(uvw, u, v, v)
    assert res.defined
    assert res.nontrivial
    assert not res.representative.is_zero()
    # representative is a cocycle
    assert uvw.differential(res.representative).is_zero()


def test_massey_formal_sphere_trivial(s2):
    # On (Lambda(a, b), db = a^2) every defined triple vanishes: the model is
    # formal.  <a, a, a> is defined (a^2 = db is exact) and its canonical
    # representative b a - a b is identically zero.
    a = s2.ctx.generator("a")
    res = massey_triple(s2, a, a, a)
    assert res.defined and not res.nontrivial
    assert res.rep_class == {}
    zero = AlgElement.zero(s2.ctx)
    res = massey_triple(s2, a, zero, a)
    assert res.defined and not res.nontrivial


def test_massey_simply_connected_nonformal():
    # Lambda(a3, b3, z5), dz = ab: <a, a, b> = [a z] != 0 with zero
    # indeterminacy (H^5 = 0), so the model is not formal.
    ctx = GeneratorContext([("a", 3), ("b", 3), ("z", 5)])
    a, b = ctx.generator("a"), ctx.generator("b")
    zero = AlgElement.zero(ctx)
    p = SullivanPresentation(ctx, {"a": zero, "b": zero, "z": a * b})
    res = massey_triple(p, a, a, b)
    assert res.defined and res.nontrivial
    assert res.indeterminacy == []


def test_massey_zero_slot_trivial(uvw):
    u = uvw.ctx.generator("u")
    zero = AlgElement.zero(uvw.ctx)
    res = massey_triple(uvw, u, zero, u)
    assert res.defined and not res.nontrivial and res.rep_class == {}


def test_massey_representative_moves_within_indeterminacy(uvw):
    # <u, v, u>: dw = uv gives primitives for both products; changing them
    # by degree-1 cocycles moves the class only inside the indeterminacy.
    from rht.cdga import complex_of
    from rht.linalg import Echelon
    u, v, w = (uvw.ctx.generator(g) for g in "uvw")
    res = massey_triple(uvw, u, v, u)
    assert res.defined
    rep0 = res.representative
    top = 2
    hrep = cohomology(uvw, 0, top)
    cx = complex_of(uvw)
    ech = Echelon()
    for vcl in res.indeterminacy:
        ech.add(dict(vcl))
    sign = (-1) ** (1 + 1)
    for zx in (u, v, u + v):
        for zy in (u, v, u - v):
            x_alt = w + zx          # still solves dx = uv
            y_alt = w + zy          # still solves dy = vu? d(w) = uv = -vu...
            # here b = v, c = u: dy must equal v*u = -uv, so y = -w + cocycle
            y_alt = -w + zy
            rep_alt = x_alt * u + u.scale(sign) * y_alt
            assert uvw.differential(rep_alt).is_zero()
            diff = rep_alt - rep0
            if diff.is_zero():
                continue
            cls = hrep.class_coordinates(top, cx.to_coords(diff, top))
            if cls:
                assert ech.contains(cls)


# ---------------------------------------------------------------------------
# Elliptic degree sequences
# ---------------------------------------------------------------------------

def test_elliptic_examples():
    assert elliptic_degrees_check(DegreeSequence([], [2, 3]))[0]       # S3 x S5
    assert elliptic_degrees_check(DegreeSequence([1], [3]))[0]        # CP2-like
    ok, witness = elliptic_degrees_check(DegreeSequence([1], []))
    assert not ok and witness == [1]


def test_elliptic_monotone_in_odds():
    rng = random.Random(23)
    for _ in range(40):
        evens = [rng.randint(1, 4) for _ in range(rng.randint(0, 3))]
        odds = [rng.randint(1, 6) for _ in range(rng.randint(0, 3))]
        ok, _ = elliptic_degrees_check(DegreeSequence(evens, odds))
        if ok:
            ok2, _ = elliptic_degrees_check(DegreeSequence(evens, odds + [rng.randint(1, 8)]))
            assert ok2


def brute_force_elliptic(evens, odds):
    """Oracle: direct enumeration of k-vectors per subsequence."""
    n = len(evens)
    for r in range(1, n + 1):
        for subset in itertools.combinations(range(n), r):
            vals = [evens[i] for i in subset]
            count = 0
            for b in odds:
                found = False
                # enumerate k-vectors with sum k_l * vals[l] = b
                def rec(idx, remaining, coins):
                    nonlocal found
                    if found:
                        return
                    if idx == len(vals):
                        if remaining == 0 and coins >= 2:
                            found = True
                        return
                    k = 0
                    while k * vals[idx] <= remaining:
                        rec(idx + 1, remaining - k * vals[idx], coins + k)
                        if found:
                            return
                        k += 1
                rec(0, b, 0)
                if found:
                    count += 1
            if count < r:
                return False
    return True


def test_elliptic_checker_agrees_with_brute_force_small():
    rng = random.Random(9)
    for _ in range(60):
        evens = [rng.randint(1, 5) for _ in range(rng.randint(0, 3))]
        odds = [rng.randint(1, 7) for _ in range(rng.randint(0, 3))]
        got, _ = elliptic_degrees_check(DegreeSequence(evens, odds))
        assert got == brute_force_elliptic(sorted(evens), sorted(odds))


# ---------------------------------------------------------------------------
# Trichotomy
# ---------------------------------------------------------------------------

def test_trichotomy_cp3_elliptic():
    H = cohomology_algebra(cp(3), 6)
    mm = minimal_model(H, 12)
    rep = trichotomy_report(mm, 12)
    assert rep.tag == ELLIPTIC
    assert rep.chi_pi == 0


def test_trichotomy_wedge_hyperbolic():
    mm = minimal_model(wedge_two_s2_cohomology(), 8)
    rep = trichotomy_report(mm, 8)
    assert rep.tag == HYPERBOLIC
    assert rep.alpha_estimate > 0


def test_trichotomy_point():
    q_alg = cohomology_algebra(SullivanPresentation(GeneratorContext([]), {},
                                                    name="pt"), 4)
    mm = minimal_model(q_alg, 9)
    rep = trichotomy_report(mm, 9)
    assert rep.tag == ELLIPTIC
    assert all(v == 0 for v in rep.ranks.values())


# ---------------------------------------------------------------------------
# TC cup length
# ---------------------------------------------------------------------------

def brute_force_tc(H):
    """Oracle: kernel-product length computed with its own H (x) H arithmetic.

    Elements are dicts ((p,i),(q,j)) -> Fraction multiplied by the direct
    Koszul rule (a (x) b)(a' (x) b') = (-1)^{|b||a'|} aa' (x) bb', completely
    bypassing the tensor_finite structure constants used by the
    implementation.
    """
    from rht.linalg import Echelon, RationalMatrix, solve_linear
    items = [(p, i) for p in sorted(H.basis) for i in range(H.dim(p))]

    def mul(t1, t2):
        out = {}
        for ((p1, i1), (q1, j1)), c1 in t1.items():
            for ((p2, i2), (q2, j2)), c2 in t2.items():
                sign = -1 if (q1 % 2) and (p2 % 2) else 1
                left = H.product(p1, i1, p2, i2)
                right = H.product(q1, j1, q2, j2)
                for la, ca in left.items():
                    for lb, cb in right.items():
                        key = ((p1 + p2, la), (q1 + q2, lb))
                        out[key] = out.get(key, Fraction(0)) + sign * c1 * c2 * ca * cb
        return {k: v for k, v in out.items() if v != 0}

    by_deg = {}
    for (p, i) in items:
        for (q, j) in items:
            by_deg.setdefault(p + q, []).append(((p, i), (q, j)))
    kernel = []
    for k, pairs in sorted(by_deg.items()):
        cols = [H.product(p, i, q, j) for ((p, i), (q, j)) in pairs]
        mat = RationalMatrix.from_columns(H.dim(k), cols)
        for vec in solve_linear(mat).kernel:
            kernel.append({pairs[c]: v for c, v in vec.items()})
    if not kernel:
        return 0
    pair_index = {}
    for (p, i) in items:
        for (q, j) in items:
            pair_index[((p, i), (q, j))] = len(pair_index)

    def flatten(elem):
        return {pair_index[k]: v for k, v in elem.items()}

    current = kernel
    length = 1
    while True:
        ech = Echelon()
        nxt = []
        for z in kernel:
            for w in current:
                prod = mul(z, w)
                if prod and ech.add(flatten(prod)):
                    nxt.append(prod)
        if not nxt:
            return length
        current = nxt
        length += 1
        if length > 4 * len(items) + 4:
            raise RuntimeError("runaway cup length")


def test_tc_cup_lengths_catalog(s2):
    assert tc_cup_length(cohomology_algebra(s2, 2)) == 2
    assert tc_cup_length(cohomology_algebra(sphere(3), 3)) == 1
    assert tc_cup_length(cohomology_algebra(sphere(4), 4)) == 2
    q = cohomology_algebra(SullivanPresentation(GeneratorContext([]), {}, name="pt"), 2)
    assert tc_cup_length(q) == 0


def test_tc_cup_length_cp2():
    assert tc_cup_length(cohomology_algebra(cp(2), 4)) == 4


def test_tc_cup_length_torus():
    assert tc_cup_length(cohomology_algebra(torus(2), 2)) == 2
    assert tc_cup_length(cohomology_algebra(torus(3), 3)) == 3


def test_tc_matches_brute_force_oracle(s2):
    candidates = [cohomology_algebra(s2, 2), cohomology_algebra(sphere(3), 3),
                  cohomology_algebra(cp(2), 4), cohomology_algebra(torus(2), 2)]
    for H in candidates:
        assert tc_cup_length(H) == brute_force_tc(H)


def test_tc_requires_zero_differential(s2):
    from rht.cdga import finite_truncation
    A = finite_truncation(s2, 4)
    with pytest.raises(UnsupportedInputError):
        tc_cup_length(A)


# ---------------------------------------------------------------------------
# Loop homology
# ---------------------------------------------------------------------------

def test_loop_dims_s3():
    dims = loop_homology_dims({2: 1}, 10)
    assert dims == {k: (1 if k % 2 == 0 else 0) for k in range(11)}


def test_loop_dims_s2():
    dims = loop_homology_dims({1: 1, 2: 1}, 12)
    assert all(dims[k] == 1 for k in range(13))


def brute_force_ul_monomials(degrees, n):
    """Oracle: count PBW monomials x1^{e1}...xr^{er}, odd-degree exponents <= 1."""
    counts = {k: 0 for k in range(n + 1)}

    def rec(idx, total):
        if total > n:
            return
        if idx == len(degrees):
            counts[total] += 1
            return
        d = degrees[idx]
        cap = 1 if d % 2 == 1 else n
        e = 0
        while e <= cap and total + e * d <= n:
            rec(idx + 1, total + e * d)
            e += 1

    rec(0, 0)
    return counts


def test_loop_dims_match_ul_monomial_count():
    # S2: L has basis in degrees 1 and 2
    assert loop_homology_dims({1: 1, 2: 1}, 12) == brute_force_ul_monomials([1, 2], 12)
    # a fatter Lie algebra: degrees 1,1,2,3,4
    dims = {1: 2, 2: 1, 3: 1, 4: 1}
    assert loop_homology_dims(dims, 10) == \
        brute_force_ul_monomials([1, 1, 2, 3, 4], 10)


def test_loop_dims_wedge_tensor_algebra():
    oracle = [2 ** k for k in range(9)]
    mm = minimal_model(wedge_two_s2_cohomology(), 9)
    dims = loop_homology_dims(mm, 8)
    assert [dims[k] for k in range(9)] == oracle


def test_loop_dims_nonnegative_and_connected(s2):
    dims = loop_homology_dims({1: 3, 2: 2, 5: 1}, 9)
    assert dims[0] == 1
    assert all(v >= 0 for v in dims.values())


def test_loop_dims_cp2():
    # Omega CP^2 ~ S^1 x Omega S^5 rationally: L in degrees 1 and 4.
    dims = loop_homology_dims({1: 1, 4: 1}, 10)
    assert [dims[k] for k in range(11)] == [1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0]


def test_trichotomy_reports_refined_alpha():
    mm = minimal_model(wedge_two_s2_cohomology(), 8)
    rep = trichotomy_report(mm, 8)
    r, est = rep.refined_alpha
    assert r == 6 and est > 0
    assert rep.alpha_estimate >= est
