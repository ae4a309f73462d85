import random
from fractions import Fraction

import pytest

from rht.algebra import AlgElement, GeneratorContext
from rht.cdga import SullivanPresentation, cohomology_algebra
from rht.constructions import sphere, wedge_cohomology
from rht.errors import UnsupportedInputError
from rht.homotopy_lie import (LieTable, bch_product, homotopy_ranks,
                              hurewicz_matrix, lcs_filtrations, lie_bracket,
                              lie_table, nilpotency_class, quadratic_part,
                              whitehead_product)
from rht.minimal_model import minimal_model

from conftest import nonformal_uvw, sphere2_model


def test_quadratic_part_examples(s2, uvw):
    assert quadratic_part(s2).presentation.d.image_of("b") == \
        s2.ctx.generator("a") ** 2
    assert quadratic_part(uvw).presentation.d.image_of("w") == \
        uvw.ctx.generator("u") * uvw.ctx.generator("v")
    # cubic and higher terms are dropped, quadratic ones kept
    ctx = GeneratorContext([("a", 2), ("c", 2), ("e", 4), ("b", 3), ("f", 7)])
    a, c, e = (ctx.generator(g) for g in ("a", "c", "e"))
    zero = AlgElement.zero(ctx)
    p = SullivanPresentation(ctx, {"a": zero, "c": zero, "e": zero,
                                   "b": a * a, "f": a ** 4 + a * c * e + e * e * 2})
    qp = quadratic_part(p)
    assert qp.presentation.d.image_of("f") == e * e * 2
    assert qp.presentation.d.image_of("b") == a * a


# Frozen pairing oracle (hand evaluation of <v, s[x,y]> = (-1)^{deg y+1}
# <d_1 v, sx, sy>): on the even-sphere model [x,x] = +2y for the dual basis
# orientation <a, sx> = <b, sy> = 1, and the Whitehead transport multiplies
# by (-1)^{deg x} = -1.
S2_BRACKET_XX = 2
S2_WHITEHEAD_XX = -2


def test_s2_bracket_sign_frozen(s2):
    t = lie_table(quadratic_part(s2), 4)
    deg, vec = lie_bracket(t, (1, {0: 1}), (1, {0: 1}))
    assert deg == 2 and vec == {0: Fraction(S2_BRACKET_XX)}


def test_s2_whitehead_sign_frozen(s2):
    t = lie_table(quadratic_part(s2), 4)
    deg, vec = whitehead_product(t, (2, {0: 1}), (2, {0: 1}))
    assert deg == 3 and vec == {0: Fraction(S2_WHITEHEAD_XX)}


def test_uvw_brackets(uvw):
    t = lie_table(quadratic_part(uvw), 0)
    # [x_u, x_v] = x_w (hand-evaluated), [x_u, x_w] = 0
    assert lie_bracket(t, (0, {0: 1}), (0, {1: 1}))[1] == {2: Fraction(1)}
    assert lie_bracket(t, (0, {0: 1}), (0, {2: 1}))[1] == {}


def test_abelian_model_brackets_vanish():
    ctx = GeneratorContext([("x", 3), ("y", 5)])
    zero = AlgElement.zero(ctx)
    p = SullivanPresentation(ctx, {"x": zero, "y": zero})
    t = lie_table(quadratic_part(p), 8)
    assert not t.brackets


def test_lie_table_validates_jacobi(uvw):
    t = lie_table(quadratic_part(uvw), 0)
    ok, why = t.validate()
    assert ok, why


def test_homotopy_ranks_spheres():
    for n in (2, 4):
        H = cohomology_algebra(sphere(n), n)
        mm = minimal_model(H, 4 * n)
        ranks = homotopy_ranks(mm, 4 * n)
        expect = {k: 0 for k in range(2, 4 * n + 1)}
        expect[n] = 1
        expect[2 * n - 1] = 1
        assert ranks == expect


def test_homotopy_ranks_cp2():
    from rht.constructions import cp
    H = cohomology_algebra(cp(2), 4)
    mm = minimal_model(H, 8)
    ranks = homotopy_ranks(mm, 8)
    assert ranks[2] == 1 and ranks[5] == 1
    assert all(v == 0 for k, v in ranks.items() if k not in (2, 5))


def test_whitehead_degree():
    t = lie_table(quadratic_part(sphere2_model()), 6)
    deg, _ = whitehead_product(t, (2, {0: 1}), (3, {0: 1}))
    assert deg == 4


def test_whitehead_pi1_is_group_commutator(uvw):
    t = lie_table(quadratic_part(uvw), 0)
    # alpha = exp(x_u), beta = exp(x_v): commutator = exp([x_u, x_v]) in the
    # Heisenberg group, i.e. the class-2 BCH commutator is exactly the bracket.
    deg, vec = whitehead_product(t, (1, {0: 1}), (1, {1: 1}))
    assert deg == 1 and vec == {2: Fraction(1)}


def test_whitehead_out_of_bound_raises():
    from rht.errors import DegreeError
    t = lie_table(quadratic_part(sphere2_model()), 2)
    with pytest.raises(DegreeError):
        whitehead_product(t, (3, {0: 1}), (3, {0: 1}))


def test_abelian_whitehead_vanishes():
    ctx = GeneratorContext([("x", 3), ("y", 3)])
    zero = AlgElement.zero(ctx)
    p = SullivanPresentation(ctx, {"x": zero, "y": zero})
    t = lie_table(quadratic_part(p), 6)
    assert whitehead_product(t, (3, {0: 1}), (3, {1: 1}))[1] == {}


# ---------------------------------------------------------------------------
# Filtrations / nilpotency
# ---------------------------------------------------------------------------

def test_lcs_v1_zero_gives_nil_one():
    p = sphere2_model()
    rep = lcs_filtrations(p, 2)
    assert rep.nil_v == 1 and rep.nil_l == 1


def test_lcs_heisenberg(uvw):
    rep = lcs_filtrations(uvw, 1)
    assert rep.nil_v == 2 and rep.nil_l == 2
    assert rep.v_dims == [2, 3]


def test_lcs_depth_three_example():
    ctx = GeneratorContext([("u", 1), ("v", 1), ("z", 1), ("w", 1)])
    u, v, z = (ctx.generator(g) for g in "uvz")
    zero = AlgElement.zero(ctx)
    p = SullivanPresentation(ctx, {"u": zero, "v": zero, "z": u * v, "w": u * z})
    rep = lcs_filtrations(p, 1)
    assert rep.nil_v == 3 and rep.nil_l == 3


def test_lcs_zero_space():
    p = sphere2_model()
    rep = lcs_filtrations(p, 5)   # V^5 = 0
    assert rep.nil_v == 0 and rep.nil_l == 0


def test_lcs_non_nilpotent_is_infinite_on_both_sides():
    # du = 0, dv = uv: [x_u, x_v] = +-x_v, so the LCS stabilizes at a
    # nonzero subspace and the V-filtration stabilizes below V^1.
    ctx = GeneratorContext([("u", 1), ("v", 1)])
    u = ctx.generator("u")
    p = SullivanPresentation(ctx, {"u": AlgElement.zero(ctx),
                                   "v": u * ctx.generator("v")})
    rep = lcs_filtrations(p, 1, depth=12)
    assert rep.nil_v == "inf" and rep.nil_l == "inf"


# ---------------------------------------------------------------------------
# Hurewicz
# ---------------------------------------------------------------------------

def test_hurewicz_s3_iso():
    from rht.constructions import sphere
    H = cohomology_algebra(sphere(3), 3)
    mm = minimal_model(H, 6)
    rep = hurewicz_matrix(mm, 3)
    assert rep.h_dim == 1 and rep.v_dim == 1 and rep.rank == 1


def test_hurewicz_wedge_iso_in_metastable_range():
    from conftest import wedge_two_s2_cohomology
    mm = minimal_model(wedge_two_s2_cohomology(), 4)
    rep = hurewicz_matrix(mm, 2)
    assert rep.h_dim == 2 and rep.v_dim == 2 and rep.rank == 2


def test_hurewicz_s2_k3_image_orthogonal_to_whitehead(s2):
    from rht.cdga import cohomology
    # H^3(S2 model) = 0, and the Whitehead product [x,x] spans L_2 = (V^3)^#;
    # the Hurewicz image must be the annihilator of the Whitehead span,
    # which is 0 here.
    rep = hurewicz_matrix(s2, 3)
    assert rep.h_dim == 0 and rep.v_dim == 1 and rep.rank == 0
    t = lie_table(quadratic_part(s2), 4)
    _, wh = lie_bracket(t, (1, {0: 1}), (1, {0: 1}))
    assert wh                      # the Whitehead span is everything
    # annihilator of a spanning set in a 1-dim space is 0 = image rank.


def test_hurewicz_s2_k4_zero_map(s2):
    rep = hurewicz_matrix(s2, 4)
    assert rep.h_dim == 0 and rep.rank == 0


# ---------------------------------------------------------------------------
# BCH
# ---------------------------------------------------------------------------

def free_nilpotent_class3():
    basis = {0: ["a", "b", "c", "d", "e"]}
    br = {}

    def setbr(i, j, vec):
        br[((0, i), (0, j))] = dict(vec)
        br[((0, j), (0, i))] = {k: -v for k, v in vec.items()}

    setbr(0, 1, {2: Fraction(1)})
    setbr(0, 2, {3: Fraction(1)})
    setbr(1, 2, {4: Fraction(1)})
    return LieTable(basis, br, 0, name="freenil3")


def free_nilpotent_class4():
    basis = {0: ["a", "b", "c", "d", "e", "f", "g", "h"]}
    br = {}

    def setbr(i, j, vec):
        br[((0, i), (0, j))] = dict(vec)
        br[((0, j), (0, i))] = {k: -v for k, v in vec.items()}

    # c=[a,b]; d=[a,c]; e=[b,c]; f=[a,d]; g=[b,d]=[a,e]; h=[b,e]
    setbr(0, 1, {2: Fraction(1)})
    setbr(0, 2, {3: Fraction(1)})
    setbr(1, 2, {4: Fraction(1)})
    setbr(0, 3, {5: Fraction(1)})
    setbr(1, 3, {6: Fraction(1)})
    setbr(0, 4, {6: Fraction(1)})
    setbr(1, 4, {7: Fraction(1)})
    return LieTable(basis, br, 0, name="freenil4")


def test_free_nilpotent_tables_are_lie_algebras():
    ok3, why3 = free_nilpotent_class3().validate()
    ok4, why4 = free_nilpotent_class4().validate()
    assert ok3, why3
    assert ok4, why4


def test_bch_abelian():
    ctx = GeneratorContext([("x", 1), ("y", 1)])
    zero = AlgElement.zero(ctx)
    p = SullivanPresentation(ctx, {"x": zero, "y": zero})
    t = lie_table(quadratic_part(p), 0)
    assert bch_product(t, {0: Fraction(1)}, {1: Fraction(3)}) == \
        {0: Fraction(1), 1: Fraction(3)}


def test_bch_heisenberg_class2(uvw):
    t = lie_table(quadratic_part(uvw), 0)
    assert nilpotency_class(t) == 2
    z = bch_product(t, {0: Fraction(1)}, {1: Fraction(1)})
    assert z == {0: Fraction(1), 1: Fraction(1), 2: Fraction(1, 2)}


def test_bch_class3_coefficients():
    t = free_nilpotent_class3()
    z = bch_product(t, {0: Fraction(1)}, {1: Fraction(1)})
    assert z == {0: Fraction(1), 1: Fraction(1), 2: Fraction(1, 2),
                 3: Fraction(1, 12), 4: Fraction(-1, 12)}


def test_bch_inverses():
    t = free_nilpotent_class4()
    rng = random.Random(5)
    for _ in range(10):
        a = {i: Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for i in range(2)}
        na = {i: -c for i, c in a.items()}
        assert bch_product(t, a, na) == {}


def test_bch_associativity_exact():
    rng = random.Random(17)
    for t in (free_nilpotent_class3(), free_nilpotent_class4()):
        c = nilpotency_class(t)
        for _ in range(20):
            a, b, cvec = ({i: Fraction(rng.randint(-2, 2), rng.randint(1, 2))
                           for i in range(len(t.basis[0]))} for _ in range(3))
            left = bch_product(t, bch_product(t, a, b, c), cvec, c)
            right = bch_product(t, a, bch_product(t, b, cvec, c), c)
            assert left == right


def test_bch_symmetry_identity():
    # z(a, b) = -z(-b, -a): classical consequence of inverting exp a exp b.
    rng = random.Random(31)
    t = free_nilpotent_class4()
    dim = len(t.basis[0])
    for _ in range(10):
        a = {i: Fraction(rng.randint(-2, 2), rng.randint(1, 2)) for i in range(dim)}
        b = {i: Fraction(rng.randint(-2, 2), rng.randint(1, 2)) for i in range(dim)}
        na = {i: -c for i, c in a.items()}
        nb = {i: -c for i, c in b.items()}
        lhs = bch_product(t, a, b)
        rhs = {i: -c for i, c in bch_product(t, nb, na).items()}
        assert lhs == rhs


def test_bch_rejects_non_nilpotent():
    # sl2-like table is not nilpotent: [h,e]=2e, [h,f]=-2f, [e,f]=h
    basis = {0: ["e", "f", "h"]}
    br = {}

    def setbr(i, j, vec):
        br[((0, i), (0, j))] = dict(vec)
        br[((0, j), (0, i))] = {k: -v for k, v in vec.items()}

    setbr(2, 0, {0: Fraction(2)})
    setbr(2, 1, {1: Fraction(-2)})
    setbr(0, 1, {2: Fraction(1)})
    t = LieTable(basis, br, 0, name="sl2")
    with pytest.raises(UnsupportedInputError):
        nilpotency_class(t)
