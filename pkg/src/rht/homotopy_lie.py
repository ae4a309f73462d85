"""Homotopy Lie algebra of a minimal Sullivan presentation.

The table of L_V is read off the quadratic part d_1 of the differential via
the pairing  <v, s[x,y]> = (-1)^(deg y + 1) <d_1 v, sx, sy>  with
<z ^ w, f, g> = <z,g><w,f> + (-1)^(deg z deg w) <z,f><w,g>.
L_k is the desuspended dual of V^{k+1}; pi_k elements are suspensions.
Whitehead products carry the transport sign (-1)^(deg x), and pi_1 of a
finite nilpotent table is the vector space L_0 under the exact
Baker-Campbell-Hausdorff product log(exp a . exp b).
"""

from fractions import Fraction

from .algebra import AlgElement, ONE, ZERO, apply_derivation
from .cdga import SullivanPresentation, cohomology, complex_of
from .errors import DegreeError, RhtError, UnsupportedInputError
from .linalg import Echelon, RationalMatrix, solve_linear, vec_add
from .minimal_model import is_minimal


class QuadraticPart:
    """(Lambda V, d_1): only the word-length-2 component of the differential."""

    def __init__(self, presentation):
        self.presentation = presentation

    @property
    def ctx(self):
        return self.presentation.ctx


def quadratic_part(p):
    """Extract (Lambda V, d_1) from a minimal presentation; d_1^2 = 0 verified."""
    if not is_minimal(p):
        raise UnsupportedInputError("quadratic part requires a minimal presentation")
    ctx = p.ctx
    images = {g: p.d.image_of(g).word_part(2) for g in ctx.names}
    q = SullivanPresentation(ctx, images, name="%s.d1" % p.name)
    # d^2 = 0 forces d_1^2 = 0 on the nose (the word-3 component of d^2 is
    # exactly d_1 d_1), so a failure here means the input was invalid.
    for g in ctx.names:
        if not apply_derivation(q.d, q.d.image_of(g)).is_zero():
            raise RhtError("d_1^2 != 0; input was not a valid minimal presentation")
    return QuadraticPart(q)


class LieTable:
    """Basis and exact structure constants of a graded Lie algebra.

    basis: {lie_degree: [labels]}; brackets stored for every ordered pair of
    basis elements with degree sum <= bound as {(deg, idx): coeff} maps.
    """

    def __init__(self, basis, brackets, bound, name="L"):
        self.basis = {k: list(v) for k, v in basis.items() if v}
        self.brackets = brackets
        self.bound = bound
        self.name = name

    def dim(self, k):
        return len(self.basis.get(k, ()))

    def dims(self):
        return {k: self.dim(k) for k in sorted(self.basis)}

    def bracket_of(self, k, i, l, j):
        """[e_{k,i}, e_{l,j}] as a sparse vector over the degree-(k+l) basis."""
        if k + l > self.bound:
            raise DegreeError("bracket lands beyond the table bound %d" % self.bound)
        return dict(self.brackets.get(((k, i), (l, j)), {}))

    def bracket(self, x, y):
        """Bilinear bracket of homogeneous elements (deg, vector)."""
        (k, u), (l, v) = x, y
        out = {}
        for i, ci in u.items():
            for j, cj in v.items():
                for m, c in self.bracket_of(k, i, l, j).items():
                    out[m] = out.get(m, ZERO) + ci * cj * c
        return (k + l, {m: c for m, c in out.items() if c != 0})

    def validate(self):
        """Antisymmetry and graded Jacobi on all basis pairs/triples in bound."""
        items = [(k, i) for k in sorted(self.basis) for i in range(self.dim(k))]
        for (k, i) in items:
            for (l, j) in items:
                if k + l > self.bound:
                    continue
                ab = self.bracket_of(k, i, l, j)
                ba = self.bracket_of(l, j, k, i)
                sign = -1 if (k % 2) and (l % 2) else 1
                # [x,y] + (-1)^{|x||y|}[y,x] = 0
                if vec_add(ab, ba, sign):
                    return False, "antisymmetry fails on (%d,%d),(%d,%d)" % (k, i, l, j)
        for (k, i) in items:
            for (l, j) in items:
                for (m, h) in items:
                    if k + l + m > self.bound:
                        continue
                    x = (k, {i: ONE})
                    y = (l, {j: ONE})
                    z = (m, {h: ONE})
                    lhs = self.bracket(x, self.bracket(y, z))[1]
                    r1 = self.bracket(self.bracket(x, y), z)[1]
                    r2 = self.bracket(y, self.bracket(x, z))[1]
                    sign = -1 if (k % 2) and (l % 2) else 1
                    rhs = vec_add(r1, r2, sign)
                    if lhs != rhs:
                        return False, "Jacobi fails on degrees (%d,%d,%d)" % (k, l, m)
        return True, None

    def __repr__(self):
        return "LieTable(%s; dims %s; bound %d)" % (
            self.name, ", ".join("%d:%d" % kv for kv in sorted(self.dims().items())), self.bound)


def lie_table(qp, bound, name=None):
    """Structure constants of L_V up to Lie degree `bound` from d_1."""
    pres = qp.presentation if isinstance(qp, QuadraticPart) else quadratic_part(qp).presentation
    ctx = pres.ctx
    gens_by_degree = {}
    for idx, (g, deg) in enumerate(ctx.gens):
        gens_by_degree.setdefault(deg - 1, []).append(idx)
    basis = {}
    for k, idxs in gens_by_degree.items():
        if 0 <= k <= bound:
            basis[k] = ["x_%s" % ctx.names[i] for i in idxs]
    brackets = {}
    for k in sorted(basis):
        for l in sorted(basis):
            if k + l > bound or (k + l) not in gens_by_degree:
                continue
            for i, pi in enumerate(gens_by_degree[k]):
                for j, qj in enumerate(gens_by_degree[l]):
                    vec = {}
                    for m, vi in enumerate(gens_by_degree[k + l]):
                        c = _pairing_coefficient(pres, vi, pi, qj, l)
                        if c != 0:
                            vec[m] = c
                    if vec:
                        brackets[((k, i), (l, j))] = vec
    t = LieTable(basis, brackets, bound, name=name or ("L(%s)" % pres.name))
    ok, why = t.validate()
    if not ok:
        raise RhtError("homotopy Lie table is inconsistent (%s); d_1^2 != 0?" % why)
    return t


def _pairing_coefficient(pres, v_idx, p_idx, q_idx, deg_y):
    """<v, s[x,y]> with x, y the duals of generators p, q (deg_y = Lie degree of y)."""
    ctx = pres.ctx
    d1v = pres.d.image_of(ctx.names[v_idx]).word_part(2)
    total = ZERO
    for mono, coeff in d1v.terms.items():
        factors = []
        for i, e in mono:
            factors.extend([i] * e)
        if len(factors) != 2:
            continue
        a, b = factors
        pair = ZERO
        if a == b:
            # <g ^ g, sx, sy> = 2 <g,sx><g,sy> for even g
            if a == p_idx and a == q_idx:
                pair = Fraction(2)
        else:
            # stored normal order a < b: <a ^ b, sx, sy>
            if a == q_idx and b == p_idx:
                pair += 1
            if a == p_idx and b == q_idx:
                da, db = ctx.degrees[a], ctx.degrees[b]
                pair += (-1) ** (da * db)
        total += coeff * pair
    sign = (-1) ** (deg_y + 1)
    return sign * total


def lie_bracket(t, x, y):
    """Bracket of homogeneous Lie elements (degree, sparse vector)."""
    return t.bracket(x, y)


def homotopy_ranks(result, n):
    """rk_k = dim V^k for 2 <= k <= n from a certified minimal model."""
    if n > result.certified_degree:
        raise DegreeError("ranks requested beyond the certified degree %d"
                          % result.certified_degree)
    ranks = result.ranks()
    return {k: ranks.get(k, 0) for k in range(2, n + 1)}


def whitehead_product(t, alpha, beta):
    """Whitehead product on pi_* = s L: [sx, sy]_W = (-1)^(deg x) s[x,y].

    Elements of pi_k are (k, vector) over the dual basis of V^k.  For
    k = l = 1 the product is the group commutator a b a^{-1} b^{-1} in the
    exponential group, computed by BCH (requires a nilpotent L_0).
    """
    (k, u), (l, v) = alpha, beta
    if k < 1 or l < 1:
        raise DegreeError("Whitehead products need pi_k, pi_l with k, l >= 1")
    if k == 1 and l == 1:
        inv_u = {i: -c for i, c in u.items()}
        inv_v = {i: -c for i, c in v.items()}
        w = bch_product(t, u, v)
        w = bch_product(t, w, inv_u)
        w = bch_product(t, w, inv_v)
        return (1, w)
    deg_x = k - 1
    _, vec = t.bracket((k - 1, u), (l - 1, v))
    sign = (-1) ** deg_x
    return (k + l - 1, {i: sign * c for i, c in vec.items()})


# ---------------------------------------------------------------------------
# Lower-central-series / nilpotency filtrations (Theorem: nil pi_k = nil
# L_{k-1} = nil V^k)
# ---------------------------------------------------------------------------

class FiltrationReport:
    """Dimensions of the V^k filtration and the LCS of L_{k-1}, with nil values.

    nil values are positive integers, 0 (zero space), the string ">=depth"
    when unresolved within the probe depth, or the string "inf" when the
    filtration provably stabilizes short of exhausting / above zero.
    """

    def __init__(self, k, v_dims, l_dims, nil_v, nil_l):
        self.k = k
        self.v_dims = v_dims
        self.l_dims = l_dims
        self.nil_v = nil_v
        self.nil_l = nil_l

    @property
    def resolved(self):
        return isinstance(self.nil_v, int) and isinstance(self.nil_l, int)

    def __repr__(self):
        return ("FiltrationReport(k=%d, V-filtration dims %s, LCS dims %s, "
                "nil V = %s, nil L = %s)" % (self.k, self.v_dims, self.l_dims,
                                             self.nil_v, self.nil_l))


def lcs_filtrations(p, k, depth=32, bound=None):
    """Filtration of V^k dual to the lower central series of L_{k-1}.

    For k = 1 the filtration is F_0 = ker d_1, F_{r+1} = d_1^{-1}(Lambda^2 F_r);
    for k >= 2 it is F_0 = ker delta, F_{r+1} = delta^{-1}(V^1 ^ F_r), delta
    the V^1 ^ V-component of d.  Both sides are computed independently and
    the Theorem equality nil V^k = nil L_{k-1} is asserted whenever both
    stabilize.
    """
    qp = quadratic_part(p)
    pres = qp.presentation
    ctx = pres.ctx
    cx = complex_of(pres)
    vk_idx = [i for i, d in enumerate(ctx.degrees) if d == k]
    if not vk_idx:
        return FiltrationReport(k, [0], [0], 0, 0)

    # --- V-side -----------------------------------------------------------
    v1_idx = [i for i, d in enumerate(ctx.degrees) if d == 1]
    basis_k1 = cx.basis(k + 1)
    pos = {m: c for c, m in enumerate(basis_k1)}

    def relevant(mono):
        factors = []
        for i, e in mono:
            factors.extend([i] * e)
        if len(factors) != 2:
            return False
        if k == 1:
            return ctx.degrees[factors[0]] == 1 and ctx.degrees[factors[1]] == 1
        return sorted(ctx.degrees[f] for f in factors) == [1, k]

    def delta_column(gen_idx):
        img = pres.d.image_of(ctx.names[gen_idx])
        out = {}
        for mono, c in img.terms.items():
            if relevant(mono):
                out[pos[mono]] = c
        return out

    delta_cols = {i: delta_column(i) for i in vk_idx}

    def preimage(span_ech):
        """{v in V^k : delta v in span} as vectors over vk_idx coordinates."""
        cols = []
        for i in vk_idx:
            cols.append(span_ech.residue(delta_cols[i]))
        mat = RationalMatrix.from_columns(len(basis_k1), cols)
        return solve_linear(mat).kernel

    def span_of_level(f_basis):
        """Echelon of Lambda^2 F (k=1) or V^1 ^ F (k>=2) inside degree k+1 monomials."""
        ech = Echelon()
        f_elems = []
        for vec in f_basis:
            el = AlgElement(ctx, {})
            for c_i, c in vec.items():
                el = el + ctx.generator(ctx.names[vk_idx[c_i]]).scale(c)
            f_elems.append(el)
        if k == 1:
            for a in range(len(f_elems)):
                for b in range(a, len(f_elems)):
                    prod = f_elems[a] * f_elems[b]
                    if not prod.is_zero():
                        ech.add({pos[m]: c for m, c in prod.terms.items()})
        else:
            for u in v1_idx:
                gu = ctx.generator(ctx.names[u])
                for f in f_elems:
                    prod = gu * f
                    if not prod.is_zero():
                        ech.add({pos[m]: c for m, c in prod.terms.items()})
        return ech

    v_dims = []
    level = preimage(Echelon())          # F_0 = ker delta
    v_dims.append(len(level))
    nil_v = None
    for _ in range(depth):
        if len(level) == len(vk_idx):
            nil_v = len(v_dims)          # 1-based step at which F = V^k
            break
        nxt = preimage(span_of_level(level))
        if len(nxt) == len(level):
            nil_v = "inf"                # stabilized strictly below V^k
            break
        level = nxt
        v_dims.append(len(level))
    if nil_v is None:
        nil_v = ">=%d" % depth

    # --- L-side -----------------------------------------------------------
    t = lie_table(qp, bound if bound is not None else k - 1)
    l_dims = []
    cur = Echelon()
    dimL = t.dim(k - 1)
    for i in range(dimL):
        cur.add({i: ONE})
    l_dims.append(cur.dim)
    nil_l = None
    step = 1
    while step <= depth:
        if cur.dim == 0:
            nil_l = step - 1
            break
        nxt = Echelon()
        for i0 in range(t.dim(0)):
            for _, row in cur.rows:
                _, br = t.bracket((0, {i0: ONE}), (k - 1, dict(row)))
                if br:
                    nxt.add(br)
        if nxt.dim == cur.dim:
            nil_l = "inf"
            break
        cur = nxt
        l_dims.append(cur.dim)
        step += 1
    if nil_l is None:
        nil_l = ">=%d" % depth
    if dimL == 0:
        nil_l = 0

    report = FiltrationReport(k, v_dims, l_dims, nil_v, nil_l)
    if isinstance(nil_v, int) and isinstance(nil_l, int) and nil_v != nil_l:
        raise RhtError("nil V^%d = %s but nil L_%d = %s; theorem violated "
                       "(implementation bug)" % (k, nil_v, k - 1, nil_l))
    return report


# ---------------------------------------------------------------------------
# Hurewicz
# ---------------------------------------------------------------------------

class HurewiczReport:
    def __init__(self, k, matrix, h_dim, v_dim, rank):
        self.k = k
        self.matrix = matrix      # columns: image of each H^k class in V^k coords
        self.h_dim = h_dim
        self.v_dim = v_dim
        self.rank = rank

    def image_echelon(self):
        ech = Echelon()
        for j in range(self.matrix.cols):
            ech.add(self.matrix.column(j))
        return ech

    def __repr__(self):
        return "HurewiczReport(k=%d, H-dim %d -> V-dim %d, rank %d)" % (
            self.k, self.h_dim, self.v_dim, self.rank)


def hurewicz_matrix(result, k, budget=None):
    """Matrix of H(zeta): H^k(Lambda V, d) -> V^k on representatives.

    zeta is the projection onto word length 1; it vanishes on boundaries of
    a minimal presentation, so the class map is well defined.
    """
    model = result.model if hasattr(result, "model") else result
    rep = cohomology(model, 0, k)
    ctx = model.ctx
    vk = [i for i, d in enumerate(ctx.degrees) if d == k]
    vk_pos = {g: c for c, g in enumerate(vk)}
    cols = []
    for el in rep.representative_elements(k):
        lin = el.linear_part()
        col = {}
        for mono, c in lin.terms.items():
            (i, _), = mono
            col[vk_pos[i]] = c
        cols.append(col)
    mat = RationalMatrix.from_columns(len(vk), cols)
    ech = Echelon()
    for c in cols:
        ech.add(c)
    return HurewiczReport(k, mat, len(cols), len(vk), ech.dim)


# ---------------------------------------------------------------------------
# Baker-Campbell-Hausdorff
# ---------------------------------------------------------------------------

def nilpotency_class(t, max_steps=64):
    """Nilpotency class of L_0 from the table, or raise if non-nilpotent."""
    n0 = t.dim(0)
    if n0 == 0:
        return 0
    cur = Echelon()
    for i in range(n0):
        cur.add({i: ONE})
    step = 1
    while step <= max_steps:
        nxt = Echelon()
        for i0 in range(n0):
            for _, row in cur.rows:
                _, br = t.bracket((0, {i0: ONE}), (0, dict(row)))
                if br:
                    nxt.add(br)
        if nxt.dim == 0:
            return step
        if nxt.dim == cur.dim:
            raise UnsupportedInputError("L_0 is not nilpotent; BCH does not terminate")
        cur = nxt
        step += 1
    raise UnsupportedInputError("nilpotency not resolved in %d steps" % max_steps)


def _free_mul(x, y, cap):
    out = {}
    for w1, c1 in x.items():
        for w2, c2 in y.items():
            if len(w1) + len(w2) > cap:
                continue
            w = w1 + w2
            out[w] = out.get(w, ZERO) + c1 * c2
    return {w: c for w, c in out.items() if c != 0}


def _free_exp(x, cap):
    out = {(): ONE}
    term = {(): ONE}
    fact = 1
    for m in range(1, cap + 1):
        term = _free_mul(term, x, cap)
        if not term:
            break
        fact *= m
        for w, c in term.items():
            out[w] = out.get(w, ZERO) + c / fact
    return {w: c for w, c in out.items() if c != 0}


def _free_log(x, cap):
    u = dict(x)
    u.pop((), None)
    out = {}
    term = {(): ONE}
    for m in range(1, cap + 1):
        term = _free_mul(term, u, cap)
        if not term:
            break
        sign = Fraction((-1) ** (m + 1), m)
        for w, c in term.items():
            out[w] = out.get(w, ZERO) + sign * c
    return {w: c for w, c in out.items() if c != 0}


def bch_product(t, a, b, nil_class=None):
    """log(exp a . exp b) in a nilpotent L_0, exactly.

    Computed as the universal BCH element in the free associative algebra on
    two symbols truncated at the nilpotency class, then evaluated in L_0 via
    the Dynkin left-normed bracketing (Dynkin-Specht-Wever: a homogeneous Lie
    element z of word length n satisfies [z]_left = n z).
    """
    c = nil_class if nil_class is not None else nilpotency_class(t)
    if c == 0:
        return {}
    z = _free_log(_free_mul(_free_exp({(0,): ONE}, c), _free_exp({(1,): ONE}, c), c), c)
    inputs = (dict(a), dict(b))
    out = {}
    for word, coeff in z.items():
        vec = inputs[word[0]]
        for s in word[1:]:
            _, vec = t.bracket((0, vec), (0, inputs[s]))
            if not vec:
                break
        if vec:
            out = vec_add(out, vec, coeff / len(word))
    return out
