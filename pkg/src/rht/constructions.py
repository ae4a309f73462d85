"""Named model builders: catalog spaces, homogeneous spaces and biquotients,
free loop spaces, holonomy representations, mapping-space derivation
complexes, Poincare-duality diagonals, configuration-space models F(A,k),
and the subset complex (D, d) of a subspace arrangement.

Every builder returns a presentation that passes `cdga.validate`; the
sign-sensitive constructions (loop-space suspension derivation, diagonal
class, arrangement differential) are pinned by regression tests computed by
hand or by independent brute force.
"""

from fractions import Fraction
from itertools import combinations

from .algebra import (AlgElement, Derivation, GeneratorContext, ONE, ZERO,
                      apply_derivation, rebase, substitute)
from .cdga import (FiniteCDGA, QuotientCDGA, SullivanPresentation,
                   cohomology, complex_of, direct_sum_cohomology, tensor_finite)
from .errors import BudgetExceededError, DegreeError, RhtError, UnsupportedInputError
from .linalg import Echelon, RationalMatrix, solve_linear, vec_add
from .minimal_model import LambdaExtension


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------

def point():
    return SullivanPresentation(GeneratorContext([]), {}, name="point")


def sphere(n):
    """Minimal model of S^n: (Lambda u, 0) for odd n, (Lambda(a,b), db=a^2) for even."""
    if n < 1:
        raise DegreeError("sphere dimension must be >= 1")
    if n % 2 == 1:
        ctx = GeneratorContext([("u", n)])
        return SullivanPresentation(ctx, {"u": AlgElement.zero(ctx)}, name="S%d" % n)
    ctx = GeneratorContext([("a", n), ("b", 2 * n - 1)])
    a = ctx.generator("a")
    return SullivanPresentation(ctx, {"a": AlgElement.zero(ctx), "b": a * a},
                                name="S%d" % n)


def cp(n):
    """Minimal model of CP^n: Lambda(x_2, y_{2n+1}), dy = x^{n+1}."""
    if n < 1:
        raise DegreeError("cp(n) needs n >= 1")
    ctx = GeneratorContext([("x", 2), ("y", 2 * n + 1)])
    x = ctx.generator("x")
    return SullivanPresentation(ctx, {"x": AlgElement.zero(ctx), "y": x ** (n + 1)},
                                name="CP%d" % n)


def k_z(n):
    """Minimal model of K(Z, n): a single cocycle generator."""
    if n < 1:
        raise DegreeError("k_z(n) needs n >= 1")
    ctx = GeneratorContext([("a", n)])
    return SullivanPresentation(ctx, {"a": AlgElement.zero(ctx)}, name="KZ%d" % n)


def torus(n):
    ctx = GeneratorContext([("t%d" % (i + 1), 1) for i in range(n)])
    return SullivanPresentation(ctx, {g: AlgElement.zero(ctx) for g in ctx.names},
                                name="T%d" % n)


def truncated_poly(degree, power, name=None):
    """Q[x]/(x^power) with deg x = `degree` (even), as a FiniteCDGA."""
    if degree % 2 or degree < 2:
        raise DegreeError("truncated polynomial generator degree must be even >= 2")
    if power < 2:
        raise DegreeError("truncation power must be >= 2")
    basis = {k * degree: ["x^%d" % k if k > 1 else ("x" if k == 1 else "1")]
             for k in range(power)}
    mul = {}
    for i in range(power):
        for j in range(power):
            if i + j < power:
                mul[((i * degree, 0), (j * degree, 0))] = {0: ONE}
    return FiniteCDGA(basis, {}, mul, name=name or "Q[x]/x^%d" % power)


def tensor_presentations(p1, p2, name=None):
    """Model of a product: the tensor cdga, generators suffixed _1 / _2."""
    gens = [("%s_1" % g, d) for g, d in p1.ctx.gens] + \
           [("%s_2" % g, d) for g, d in p2.ctx.gens]
    ctx = GeneratorContext(gens)
    a1 = {g: ctx.generator("%s_1" % g) for g in p1.ctx.names}
    a2 = {g: ctx.generator("%s_2" % g) for g in p2.ctx.names}
    images = {}
    for g in p1.ctx.names:
        images["%s_1" % g] = substitute(p1.d.image_of(g), a1, ctx)
    for g in p2.ctx.names:
        images["%s_2" % g] = substitute(p2.d.image_of(g), a2, ctx)
    return SullivanPresentation(ctx, images,
                                name=name or "%sx%s" % (p1.name, p2.name))


def product(p1, p2, name=None):
    return tensor_presentations(p1, p2, name=name)


def wedge_cohomology(H1, H2, name=None):
    """H1 (+)_Q H2 with zero products across the summands (wedge of spaces)."""
    return direct_sum_cohomology(H1, H2, name=name)


CATALOG = {
    "point": (point, 0),
    "sphere": (sphere, 1),
    "cp": (cp, 1),
    "k_z": (k_z, 1),
    "torus": (torus, 1),
}


def catalog(name, *params):
    """Catalog dispatch: sphere(n), cp(n), k_z(n), torus(n), point(),
    product(m1, m2), wedge_cohomology(H1, H2), truncated_poly(deg, power)."""
    if name == "product":
        return product(*params)
    if name == "wedge_cohomology":
        return wedge_cohomology(*params)
    if name == "truncated_poly":
        return truncated_poly(*params)
    if name not in CATALOG:
        raise UnsupportedInputError("unknown catalog entry %r" % name)
    fn, arity = CATALOG[name]
    if len(params) != arity:
        raise DegreeError("catalog %s expects %d parameter(s)" % (name, arity))
    return fn(*params)


# ---------------------------------------------------------------------------
# Homogeneous spaces and biquotients
# ---------------------------------------------------------------------------

def homogeneous_space_model(g_degrees, h_degrees, images, name="G/H"):
    """Model (Lambda s^{-1}V_H (x) Lambda V_G, d) of a homogeneous space G/H.

    g_degrees: odd degrees of V_G; h_degrees: odd degrees of V_H.  `images`
    receives the list of s^{-1}V_H generators (degrees h+1) and must return
    one polynomial per G-generator: the Sullivan representative of BH -> BG
    evaluated on s^{-1}V_G.  Then d vanishes on s^{-1}V_H and d(x_i) is the
    supplied polynomial.
    """
    if any(d % 2 == 0 for d in g_degrees) or any(d % 2 == 0 for d in h_degrees):
        raise DegreeError("V_G and V_H must be concentrated in odd degrees")
    gens = [("t%d" % (i + 1), d + 1) for i, d in enumerate(h_degrees)]
    gens += [("x%d" % (i + 1), d) for i, d in enumerate(g_degrees)]
    ctx = GeneratorContext(gens)
    t_gens = [ctx.generator("t%d" % (i + 1)) for i in range(len(h_degrees))]
    d_imgs = {"t%d" % (i + 1): AlgElement.zero(ctx) for i in range(len(h_degrees))}
    polys = images(t_gens) if callable(images) else list(images)
    if len(polys) != len(g_degrees):
        raise DegreeError("one image per V_G generator is required")
    for i, poly in enumerate(polys):
        want = g_degrees[i] + 1
        if not poly.is_zero() and poly.degree() != want:
            raise DegreeError("image of x%d must have degree %d" % (i + 1, want))
        d_imgs["x%d" % (i + 1)] = rebase(poly, ctx) if poly.ctx != ctx else poly
    return SullivanPresentation(ctx, d_imgs, name=name)


def biquotient_model(g_degrees, h_degrees, k_degrees, bf_images, bg_images,
                     name="K\\G/H"):
    """Model (Lambda s^{-1}V_K (x) Lambda s^{-1}V_H (x) Lambda V_G, d) with
    dx = H(Bf)(x) - H(Bg)(x) for x in V_G.

    bf_images(h_gens) and bg_images(k_gens) each return one polynomial per
    G-generator, in the s^{-1}V_H and s^{-1}V_K variables respectively.
    """
    for ds in (g_degrees, h_degrees, k_degrees):
        if any(d % 2 == 0 for d in ds):
            raise DegreeError("generator degree lists must be odd degrees")
    gens = [("s%d" % (i + 1), d + 1) for i, d in enumerate(k_degrees)]
    gens += [("t%d" % (i + 1), d + 1) for i, d in enumerate(h_degrees)]
    gens += [("x%d" % (i + 1), d) for i, d in enumerate(g_degrees)]
    ctx = GeneratorContext(gens)
    s_gens = [ctx.generator("s%d" % (i + 1)) for i in range(len(k_degrees))]
    t_gens = [ctx.generator("t%d" % (i + 1)) for i in range(len(h_degrees))]
    d_imgs = {g: AlgElement.zero(ctx) for g, _ in gens[:len(k_degrees) + len(h_degrees)]}
    f_polys = bf_images(t_gens) if callable(bf_images) else list(bf_images)
    g_polys = bg_images(s_gens) if callable(bg_images) else list(bg_images)
    if len(f_polys) != len(g_degrees) or len(g_polys) != len(g_degrees):
        raise DegreeError("one Bf and one Bg image per V_G generator is required")
    for i in range(len(g_degrees)):
        fi = rebase(f_polys[i], ctx) if f_polys[i].ctx != ctx else f_polys[i]
        gi = rebase(g_polys[i], ctx) if g_polys[i].ctx != ctx else g_polys[i]
        img = fi - gi
        want = g_degrees[i] + 1
        if not img.is_zero() and img.degree() != want:
            raise DegreeError("dx%d must have degree %d" % (i + 1, want))
        d_imgs["x%d" % (i + 1)] = img
    return SullivanPresentation(ctx, d_imgs, name=name)


# ---------------------------------------------------------------------------
# Free loop spaces
# ---------------------------------------------------------------------------

def free_loop_model(p, name=None):
    """(Lambda V (x) Lambda sV, D) with D(sv) = -s(dv), deg sv = deg v - 1.

    s is extended to the degree -1 derivation with s(v) = sv, s(sv) = 0, via
    s(xy) = (sx)y + (-1)^(deg x) x (sy).  Requires V = V^{>=2}.
    """
    if any(d < 2 for d in p.ctx.degrees):
        raise UnsupportedInputError("free loop model requires a simply connected model")
    gens = list(p.ctx.gens) + [("s_%s" % g, d - 1) for g, d in p.ctx.gens]
    ctx = GeneratorContext(gens)
    s_images = {}
    for g, d in p.ctx.gens:
        s_images[g] = ctx.generator("s_%s" % g)
        s_images["s_%s" % g] = AlgElement.zero(ctx)
    s_der = Derivation(ctx, -1, s_images)
    images = {}
    for g in p.ctx.names:
        dv = rebase(p.d.image_of(g), ctx)
        images[g] = dv
        images["s_%s" % g] = -apply_derivation(s_der, dv)
    total = SullivanPresentation(ctx, images, name=name or ("L%s" % p.name))
    for g in ctx.names:
        if not apply_derivation(total.d, total.d.image_of(g)).is_zero():
            raise RhtError("free loop differential does not square to zero")  # pragma: no cover
    return total


def free_loop_extension(p, name=None):
    """The loop model as a Lambda-extension over the original presentation."""
    total = free_loop_model(p, name=name)
    return LambdaExtension(total, list(p.ctx.names), name=total.name)


# ---------------------------------------------------------------------------
# Holonomy representations
# ---------------------------------------------------------------------------

class HolonomyReport:
    """Matrices theta_i of the base-W action on fiber cohomology.

    entry(i, k) is the list of columns of theta_i : H^k -> H^{k+1-deg(w_i)},
    one per H^k class (class coordinates of the fiber report).  For degree-1
    base generators these are degree-preserving and nilpotent.
    """

    def __init__(self, base_labels, base_degrees, fiber_report, matrices, window):
        self.base_labels = base_labels
        self.base_degrees = base_degrees
        self.fiber_report = fiber_report
        self.matrices = matrices
        self.window = window

    def matrix(self, i, k):
        return self.matrices.get((i, k), [])

    def is_nilpotent(self, i, max_power=None):
        """theta_i nilpotent on the computed window (degreewise composition)."""
        deg_shift = 1 - self.base_degrees[i]
        if deg_shift < 0:
            return True        # strictly degree-lowering, bounded below on the window
        for k in range(0, self.window + 1):
            dim = self.fiber_report.dim(k)
            if dim == 0:
                continue
            cols = self.matrix(i, k)
            mat = {(l, j): c for j in range(dim)
                   for l, c in (cols[j] if j < len(cols) else {}).items()}
            power = dict(mat)
            n = max_power or (dim + 1)
            for _ in range(n):
                if not power:
                    break
                power = _mat_mul(mat, power)
            if power:
                return False
        return True

    def __repr__(self):
        return "HolonomyReport(base %s, window %d)" % (",".join(self.base_labels),
                                                       self.window)


def _mat_mul(a, b):
    out = {}
    for (i, j), v in a.items():
        for (j2, k), w in b.items():
            if j == j2:
                out[(i, k)] = out.get((i, k), ZERO) + v * w
    return {k: v for k, v in out.items() if v != 0}


def holonomy_representation(ext, n):
    """theta_i read off the W-linear component of d on fiber representatives.

    d(1 (x) Phi) = sum_i w_i (x) theta_i(Phi) + higher W-length terms; the
    w_i-coefficients are fiber cocycles and their classes define theta_i on
    H(Lambda Z, d-bar).
    """
    total = ext.total
    ctx = total.ctx
    base_idx = [ctx.index[g] for g in ext.base_names]
    base_set = set(base_idx)
    fiber = ext.fiber_presentation()
    fib_cx = complex_of(fiber)
    frep = cohomology(fiber, 0, n + 1)
    tot_cx = complex_of(total)

    fiber_pos = {ctx.index[g]: fiber.ctx.index[g] for g in ext.fiber_names}

    def lift_monomial(mono):
        return tuple((ctx.index[fiber.ctx.names[i]], e) for i, e in mono)

    def split_w_linear(el):
        """Terms w_i * (fiber monomial): {i: AlgElement over fiber ctx}."""
        out = {}
        for mono, c in el.terms.items():
            base_part = [(i, e) for i, e in mono if i in base_set]
            if len(base_part) != 1 or base_part[0][1] != 1:
                continue
            w = base_part[0][0]
            fib_mono = tuple((fiber_pos[i], e) for i, e in mono if i not in base_set)
            out.setdefault(w, {})[fib_mono] = c
        return {w: AlgElement(fiber.ctx, terms) for w, terms in out.items()}

    matrices = {}
    for k in range(0, n + 1):
        for w_pos, w_idx in enumerate(base_idx):
            matrices[(w_pos, k)] = []
    for k in range(0, n + 1):
        for rep_vec in frep.representatives(k):
            lifted = AlgElement(ctx, {lift_monomial(fib_cx.basis(k)[i]): c
                                      for i, c in rep_vec.items()})
            image = apply_derivation(total.d, lifted)
            parts = split_w_linear(image)
            for w_pos, w_idx in enumerate(base_idx):
                psi = parts.get(w_idx)
                if psi is None or psi.is_zero():
                    matrices[(w_pos, k)].append({})
                    continue
                pdeg = psi.degree()
                coords = fib_cx.to_coords(psi, pdeg)
                if not frep.is_cocycle(pdeg, coords):
                    raise RhtError("holonomy coefficient is not a fiber cocycle")
                if pdeg > n + 1:
                    matrices[(w_pos, k)].append({})
                    continue
                matrices[(w_pos, k)].append(frep.class_coordinates(pdeg, coords))
    report = HolonomyReport([ctx.names[i] for i in base_idx],
                            [ctx.degrees[i] for i in base_idx], frep, matrices, n)
    for i in range(len(base_idx)):
        if not report.is_nilpotent(i):
            raise RhtError("holonomy action of %s is not nilpotent; extension invalid"
                           % ctx.names[base_idx[i]])
    return report


# ---------------------------------------------------------------------------
# Mapping spaces: homology of the phi-derivation complex
# ---------------------------------------------------------------------------

class MappingSpaceReport:
    def __init__(self, n, dim, contributing, complete):
        self.n = n
        self.dim = dim
        self.contributing = contributing      # [(generator degree, word degree)]
        self.complete = complete

    def __repr__(self):
        return "MappingSpaceReport(n=%d, dim=%d)" % (self.n, self.dim)


def mapping_space_pi(phi, n, budget=None):
    """dim H_n(Der_phi(Lambda V, Lambda W), D) with D t = d t - (-1)^n t d.

    A phi-derivation of degree n is determined by the generator images
    theta(v) in (Lambda W)^{deg v - n}; the extension to products follows
    theta(xy) = theta(x) phi(y) + (-1)^(deg x * n) phi(x) theta(y).
    """
    if n < 1:
        raise DegreeError("mapping-space homotopy is computed for n >= 1")
    V = phi.source
    W = phi.target
    if not isinstance(W, SullivanPresentation):
        raise UnsupportedInputError("derivation complexes need a free target")
    wcx = complex_of(W)

    def der_basis(m):
        out = []
        for g in V.ctx.names:
            dv = V.ctx.degree_of(g)
            wdeg = dv - m
            if wdeg < 0:
                continue
            for i in range(wcx.dim(wdeg)):
                out.append((g, wdeg, i))
        return out

    def theta_apply(assign, m, x):
        """Extend a generator assignment (dict g -> AlgElement in W) to x."""
        out = AlgElement.zero(W.ctx)
        for mono, coeff in x.terms.items():
            factors = []
            for gi, e in mono:
                factors.extend([gi] * e)
            # theta(f1 f2 ... fr) = sum_i (+-) phi(f1..f_{i-1}) theta(f_i) phi(f_{i+1}..fr)
            for pos in range(len(factors)):
                gname = V.ctx.names[factors[pos]]
                img = assign.get(gname)
                if img is None or img.is_zero():
                    continue
                prefix_deg = sum(V.ctx.degrees[f] for f in factors[:pos])
                sign = -1 if (m % 2) and (prefix_deg % 2) else 1
                term = AlgElement.unit(W.ctx, coeff * sign)
                for f in factors[:pos]:
                    term = term * phi.apply_element(V.ctx.generator(V.ctx.names[f]))
                    if term.is_zero():
                        break
                if term.is_zero():
                    continue
                term = term * img
                for f in factors[pos + 1:]:
                    if term.is_zero():
                        break
                    term = term * phi.apply_element(V.ctx.generator(V.ctx.names[f]))
                out = out + term
        return out

    def d_matrix(m):
        """D: Der_m -> Der_{m-1} in the bases der_basis(m) -> der_basis(m-1)."""
        src = der_basis(m)
        tgt = der_basis(m - 1)
        tgt_pos = {}
        for pos, (g, wdeg, i) in enumerate(tgt):
            tgt_pos[(g, i)] = pos
        cols = []
        for (g, wdeg, i) in src:
            base_img = wcx.from_coords(wdeg, {i: ONE})
            assign = {g: base_img}
            col = {}
            # (d theta)(v) = d_W(theta(v)): only v = g contributes directly.
            dpart = apply_derivation(W.d, base_img)
            for mono, c in dpart.terms.items():
                pos = tgt_pos.get((g, wcx.index(wdeg + 1)[mono]))
                if pos is not None:
                    col[pos] = col.get(pos, ZERO) + c
            # (theta d)(v) for every generator v.
            for v in V.ctx.names:
                dv = V.d.image_of(v)
                if dv.is_zero():
                    continue
                val = theta_apply(assign, m, dv)
                if val.is_zero():
                    continue
                vdeg = val.degree()
                sign = -1 if (m % 2) else 1
                for mono, c in val.terms.items():
                    pos = tgt_pos.get((v, wcx.index(vdeg)[mono]))
                    if pos is None:
                        raise RhtError("derivation image outside the complex")
                    col[pos] = col.get(pos, ZERO) - sign * c
            cols.append({p: c for p, c in col.items() if c != 0})
        return src, tgt, cols

    src_n, tgt_n, cols_n = d_matrix(n)
    mat_n = RationalMatrix.from_columns(len(tgt_n), cols_n)
    kernel = solve_linear(mat_n).kernel
    src_n1, _, cols_n1 = d_matrix(n + 1)
    bound = Echelon()
    for col in cols_n1:
        bound.add(col)
    probe = Echelon()
    for r in bound.rows:
        probe.add(dict(r[1]))
    dim = 0
    for vec in kernel:
        if probe.add(vec):
            dim += 1
    contributing = sorted({(V.ctx.degree_of(g), wdeg) for (g, wdeg, _) in src_n})
    return MappingSpaceReport(n, dim, contributing, complete=True)


# ---------------------------------------------------------------------------
# Poincare duality algebras and configuration spaces
# ---------------------------------------------------------------------------

class PDAlgebra:
    """FiniteCDGA with a verified nondegenerate top pairing.

    eps is the orientation functional on A^m given by coordinates; dual
    bases a_i' with a_i a_j' = delta_ij omega are computed blockwise.
    """

    def __init__(self, cdga, m, eps=None, name=None):
        self.cdga = cdga
        self.m = m
        self.name = name or ("PD(%s)" % cdga.name)
        if cdga.dim(0) != 1:
            raise UnsupportedInputError("PD algebras must be connected (A^0 = Q)")
        if cdga.dim(m) != 1:
            raise UnsupportedInputError("A^%d must be one dimensional" % m)
        if eps is None:
            eps = {0: ONE}
        self.eps = {i: Fraction(c) for i, c in eps.items() if c != 0}
        if list(self.eps) != [0]:
            raise UnsupportedInputError("orientation must be supported on A^m")
        self._duals = {}
        self._omega = {0: ONE / self.eps[0]}
        self._verify()

    def eps_of(self, coords):
        return sum(self.eps.get(i, ZERO) * c for i, c in coords.items())

    def _verify(self):
        A = self.cdga
        for p in A.degrees():
            q = self.m - p
            if A.dim(q) != A.dim(p):
                raise UnsupportedInputError(
                    "pairing cannot be nondegenerate: dim A^%d != dim A^%d" % (p, q))
            # P[i][j] = eps(a_i c_j); dual basis solves P X = I.
            npairs = A.dim(p)
            cols = []
            for i in range(npairs):
                col = {}
                for j in range(A.dim(q)):
                    val = self.eps_of(A.product(p, i, q, j))
                    if val:
                        col[j] = val
                cols.append(col)
            # Solve for each i the vector x with eps(a_i . sum_j x_j c_j) = delta_ik
            mat = RationalMatrix.from_columns(npairs, [
                {i: cols[i].get(j, ZERO) for i in range(npairs) if cols[i].get(j)}
                for j in range(A.dim(q))])
            duals = []
            for i in range(npairs):
                sol = solve_linear(mat, targets=[{i: ONE}])
                if not sol.solvable[0]:
                    raise UnsupportedInputError("top pairing is degenerate in degree %d" % p)
                duals.append(sol.solutions[0])
            self._duals[p] = duals

    def omega(self):
        """The fundamental class: eps(omega) = 1."""
        return dict(self._omega)

    def dual_basis(self, p):
        """a_i' in A^{m-p} with a_i a_j' = delta_ij omega."""
        return [dict(v) for v in self._duals.get(p, [])]


def diagonal_class(A):
    """D_A = sum_i (-1)^(deg a_i) a_i (x) a_i' in (A (x) A)^m, a cycle.

    The sign makes (x (x) 1) D_A = (1 (x) x) D_A hold, which is what ideal
    stability of the configuration model needs.  Returns (tensor cdga,
    coordinates of D_A in degree m, structured terms).
    """
    T = tensor_finite(A.cdga, A.cdga)
    pos = {}
    counter = {}
    for p in sorted(A.cdga.basis):
        for q in sorted(A.cdga.basis):
            k = p + q
            for i in range(A.cdga.dim(p)):
                for j in range(A.cdga.dim(q)):
                    counter.setdefault(k, 0)
                    pos[(p, i, q, j)] = (k, counter[k])
                    counter[k] += 1
    coords = {}
    terms = []
    for p in sorted(A.cdga.basis):
        q = A.m - p
        duals = A.dual_basis(p)
        for i in range(A.cdga.dim(p)):
            sign = -1 if p % 2 else 1
            for j, c in duals[i].items():
                k, idx = pos[(p, i, q, j)]
                coords[idx] = coords.get(idx, ZERO) + sign * c
                terms.append((sign * c, (p, i), (q, j)))
    coords = {i: c for i, c in coords.items() if c != 0}
    # Cycle check in (A (x) A, d).
    img = {}
    for i, c in coords.items():
        img = vec_add(img, T.d_of(A.m, i), c)
    if img:
        raise RhtError("diagonal class is not a cycle")  # pragma: no cover
    return T, coords, terms


class ConfigSpaceModel:
    """F(A, k) as a QuotientCDGA plus the bookkeeping used by tests."""

    def __init__(self, quotient, slot_gen, x_name, pd, k):
        self.quotient = quotient
        self.slot_gen = slot_gen      # (slot, p, i) -> generator name
        self.x_name = x_name          # (i, j) with i < j -> generator name
        self.pd = pd
        self.k = k


def config_space_model(A, k, name=None, max_k=3):
    """Lambrechts-Stanley model F(A,k) = (A^{(x)k} (x) Lambda(x_ij)/I, d).

    deg x_ij = m - 1, d x_ij = p_ij(D_A); I is generated by the slotwise
    multiplication relations of A, the symmetry x_ij = (-1)^m x_ji (used to
    eliminate x_ji), the squares x_ij^2, the gluing relations
    (p_i(a) - p_j(a)) x_ij, and the Arnold relations for each triple.  The
    basis grows like k! dim(A)^k, so k > max_k (default 3) is refused.
    """
    if k < 1:
        raise DegreeError("k must be >= 1")
    if k == 1:
        return A.cdga
    if k > max_k:
        raise BudgetExceededError("k = %d exceeds the configured bound %d" % (k, max_k))
    if A.m < 2:
        raise UnsupportedInputError("configuration models need formal dimension >= 2")
    Acd = A.cdga
    m = A.m
    pos_basis = [(p, i) for p in sorted(Acd.basis) if p > 0
                 for i in range(Acd.dim(p))]
    gens = []
    slot_gen = {}
    for slot in range(1, k + 1):
        for (p, i) in pos_basis:
            gname = "g%d_%s" % (slot, _safe(Acd.label(p, i)))
            slot_gen[(slot, p, i)] = gname
            gens.append((gname, p))
    x_name = {}
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            gname = "x%d%d" % (i, j)
            x_name[(i, j)] = gname
            gens.append((gname, m - 1))
    ctx = GeneratorContext(gens)

    def slot_vec(slot, p, coords):
        """A-coordinates at degree p > 0 -> ambient element in slot `slot`."""
        out = AlgElement.zero(ctx)
        for i, c in coords.items():
            out = out + ctx.generator(slot_gen[(slot, p, i)]).scale(c)
        return out

    # Differential: slot copies follow d_A; x_ij maps to p_ij(D_A).
    d_imgs = {}
    for slot in range(1, k + 1):
        for (p, i) in pos_basis:
            col = Acd.d_of(p, i)
            d_imgs[slot_gen[(slot, p, i)]] = slot_vec(slot, p + 1, col) if col \
                else AlgElement.zero(ctx)
    _, _, terms = diagonal_class(A)
    for (i, j), gname in x_name.items():
        img = AlgElement.zero(ctx)
        for c, (p, ai), (q, aj) in terms:
            left = AlgElement.unit(ctx, ONE) if p == 0 else slot_vec(i, p, {ai: ONE})
            right = AlgElement.unit(ctx, ONE) if q == 0 else slot_vec(j, q, {aj: ONE})
            img = img + (left * right).scale(c)
        d_imgs[gname] = img
    ambient = SullivanPresentation(ctx, d_imgs, name="%s-ambient" % (name or "F"))

    ideal = []
    # Slotwise multiplication relations of A.
    for slot in range(1, k + 1):
        for (p, i) in pos_basis:
            for (q, j) in pos_basis:
                prod = Acd.product(p, i, q, j)
                rel = slot_vec(slot, p, {i: ONE}) * slot_vec(slot, q, {j: ONE})
                if p + q <= A.m:
                    rel = rel - slot_vec(slot, p + q, prod) if prod else rel
                if not rel.is_zero():
                    ideal.append(rel)
    # x_ij^2 (only needed when deg x is even).
    if (m - 1) % 2 == 0:
        for gname in x_name.values():
            x = ctx.generator(gname)
            ideal.append(x * x)
    # (p_i(a) - p_j(a)) x_ij.
    for (i, j), gname in x_name.items():
        x = ctx.generator(gname)
        for (p, s) in pos_basis:
            rel = (slot_vec(i, p, {s: ONE}) - slot_vec(j, p, {s: ONE})) * x
            if not rel.is_zero():
                ideal.append(rel)
    # Arnold relations x_ij x_jk + x_jk x_ki + x_ki x_ij, with x_ki rewritten
    # as (-1)^m x_ik.  (The consecutive-index cyclic form is the one the
    # differential stabilizes; stability is re-validated on every build.)
    sign = (-1) ** m
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            for l in range(j + 1, k + 1):
                xij = ctx.generator(x_name[(i, j)])
                xik = ctx.generator(x_name[(i, l)])
                xjk = ctx.generator(x_name[(j, l)])
                rel = xij * xjk + (xjk * xik).scale(sign) + (xik * xij).scale(sign)
                if not rel.is_zero():
                    ideal.append(rel)
    quot = QuotientCDGA(ambient, ideal, name=name or ("F(%s,%d)" % (A.name, k)))
    return ConfigSpaceModel(quot, slot_gen, x_name, A, k)


def _safe(label):
    out = []
    for ch in label:
        out.append(ch if ch.isalnum() else "_")
    return "".join(out)


# ---------------------------------------------------------------------------
# Subspace arrangements and the subset complex (D, d)
# ---------------------------------------------------------------------------

class SubspaceArrangement:
    """Finite list of rational linear subspaces of Q^n (complexified grading).

    Subspaces are given by equation matrices (rows of linear forms); the
    intersection lattice caches codim(cap sigma) = rank of the stacked
    equations for every subset sigma.
    """

    def __init__(self, ambient_dim, subspaces, name="arrangement"):
        self.n = ambient_dim
        self.name = name
        self.subspaces = []
        for rows in subspaces:
            mat = [tuple(Fraction(x) for x in row) for row in rows]
            for row in mat:
                if len(row) != ambient_dim:
                    raise DegreeError("equation rows must have %d entries" % ambient_dim)
            self.subspaces.append(mat)
        self._codim = {}
        for idx, mat in enumerate(self.subspaces):
            c = self.codim(frozenset([idx]))
            if c == 0:
                raise DegreeError("subspace %d is the whole space" % idx)

    def __len__(self):
        return len(self.subspaces)

    def codim(self, sigma):
        sigma = frozenset(sigma)
        if sigma not in self._codim:
            ech = Echelon()
            for i in sorted(sigma):
                for row in self.subspaces[i]:
                    ech.add({c: v for c, v in enumerate(row) if v != 0})
            self._codim[sigma] = ech.dim
        return self._codim[sigma]

    def intersection_lattice(self):
        """Distinct intersections: list of (codim, minimal subsets mapping there)."""
        spaces = {}
        for r in range(len(self.subspaces) + 1):
            for sigma in combinations(range(len(self.subspaces)), r):
                ech = Echelon()
                for i in sigma:
                    for row in self.subspaces[i]:
                        ech.add({c: v for c, v in enumerate(row) if v != 0})
                key = tuple(sorted((pc, tuple(sorted(r_.items()))) for pc, r_ in ech.rows))
                spaces.setdefault(key, {"codim": ech.dim, "subsets": []})
                spaces[key]["subsets"].append(sigma)
        return sorted(((v["codim"], v["subsets"]) for v in spaces.values()),
                      key=lambda t: (t[0], t[1]))


def arrangement_complex(arr, name=None):
    """Feichner-Yuzvinsky complex (D, d) of a subspace arrangement.

    Basis: subsets sigma, graded by 2 codim(cap sigma) - |sigma|.  The
    differential removes the i-th element (position counted from 1) with
    sign (-1)^i whenever the intersection is unchanged; the product merges
    disjoint subsets with the shuffle sign when codimensions add, else 0.
    """
    n = len(arr)
    subsets = []
    for r in range(n + 1):
        subsets.extend(combinations(range(n), r))
    deg_of = {}
    for sigma in subsets:
        deg_of[sigma] = 2 * arr.codim(sigma) - len(sigma)
    basis = {}
    index = {}
    for sigma in sorted(subsets, key=lambda s: (len(s), s)):
        k = deg_of[sigma]
        basis.setdefault(k, [])
        index[sigma] = (k, len(basis[k]))
        basis[k].append("{%s}" % ",".join(str(i + 1) for i in sigma))
    if index[()] != (0, 0):
        # force the empty subset to be the unit at position (0, 0)
        raise RhtError("unit ordering failed")  # pragma: no cover

    diff = {}
    for sigma in subsets:
        if not sigma:
            continue
        k, idx = index[sigma]
        col = {}
        full = arr.codim(sigma)
        for pos, i in enumerate(sigma, start=1):
            tau = tuple(x for x in sigma if x != i)
            if arr.codim(tau) == full:
                kt, it = index[tau]
                if kt != k + 1:
                    raise RhtError("differential is not of degree +1")  # pragma: no cover
                col[it] = col.get(it, ZERO) + Fraction((-1) ** pos)
        col = {i: c for i, c in col.items() if c != 0}
        if col:
            diff[(k, idx)] = col

    mul = {}
    for s1 in subsets:
        for s2 in subsets:
            if set(s1) & set(s2):
                continue
            union = tuple(sorted(s1 + s2))
            if arr.codim(s1) + arr.codim(s2) != arr.codim(union):
                continue
            inv = sum(1 for a in s1 for b in s2 if a > b)
            k1, i1 = index[s1]
            k2, i2 = index[s2]
            ku, iu = index[union]
            mul[((k1, i1), (k2, i2))] = {iu: Fraction((-1) ** inv)}
    return FiniteCDGA(basis, diff, mul, name=name or arr.name,
                      h0_is_unit_span=False)
