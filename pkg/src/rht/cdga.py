"""Cdga presentations, morphisms, and exact cohomology over a degree window.

Three kinds of presentation are supported:

* `SullivanPresentation` -- free graded-commutative algebra Lambda(V) with a
  degree +1 differential given on generators;
* `FiniteCDGA` -- explicit per-degree basis with product structure constants
  and differential matrices (cohomology algebras, PD models, arrangement
  complexes live here);
* `QuotientCDGA` -- a free ambient modulo a differential-stable ideal,
  handled degree-wise by linear algebra (no Groebner bases).

All cohomology statements are windowed.  A report certifies `H^{>N} = 0`
only when the underlying cochain spaces provably vanish above N (finite
total dimension, an all-odd generator argument, or a full gap window in a
quotient); otherwise results are labelled as verified up to N.
"""

from fractions import Fraction

from .algebra import (AlgElement, Derivation, GeneratorContext, ZERO, ONE,
                      apply_derivation, degree_basis, monomial_degree,
                      DEFAULT_MONOMIAL_BUDGET)
from .errors import (DegreeError, RhtError, UnsupportedInputError,
                     ValidationError)
from .linalg import Echelon, RationalMatrix, solve_linear, vec_add


class ValidationReport:
    """Outcome of `validate`: ok flag plus a structured violation list."""

    def __init__(self, subject, violations):
        self.subject = subject
        self.violations = list(violations)

    @property
    def ok(self):
        return not self.violations

    def raise_if_invalid(self):
        if not self.ok:
            raise ValidationError(self.violations)
        return self

    def __repr__(self):
        if self.ok:
            return "ValidationReport(%s: valid)" % (self.subject,)
        return "ValidationReport(%s: %s)" % (self.subject, "; ".join(self.violations))


class SullivanPresentation:
    """Free cdga (Lambda(V), d) given by generators and their differentials.

    `d` maps generator names to AlgElements of degree deg+1; a missing image
    is an error at validation time, not construction time.
    """

    def __init__(self, ctx, d_images, name="cdga"):
        self.ctx = ctx
        self.name = name
        self.d = Derivation(ctx, +1, d_images)
        self._adapters = {}

    @staticmethod
    def build(generators, d_exprs, name="cdga"):
        """Convenience: generators [(name, deg)], d_exprs {name: AlgElement or 0}."""
        ctx = GeneratorContext(generators)
        images = {}
        for gname, _ in generators:
            img = d_exprs.get(gname, 0)
            if img == 0:
                img = AlgElement.zero(ctx)
            images[gname] = img
        return SullivanPresentation(ctx, images, name=name)

    def generator(self, name):
        return self.ctx.generator(name)

    def differential(self, x):
        return apply_derivation(self.d, x)

    def generator_degrees(self):
        return dict(zip(self.ctx.names, self.ctx.degrees))

    def is_finite_dimensional(self):
        """Lambda(V) has finite total dimension iff every generator is odd."""
        return all(d % 2 == 1 for d in self.ctx.degrees)

    def top_degree(self):
        return sum(self.ctx.degrees) if self.is_finite_dimensional() else None

    def __repr__(self):
        return "SullivanPresentation(%s; %s)" % (
            self.name, ", ".join("%s:%d" % g for g in self.ctx.gens))


class FiniteCDGA:
    """Cdga with an explicit finite basis in each degree.

    basis: {degree: [labels]}; diff: {(deg, i): {j: coeff}} into degree+1;
    mul: {((p, i), (q, j)): {k: coeff}} into degree p+q.  Unit is basis
    element 0 of degree 0.  `h0_is_unit_span` records whether degree 0 is
    required to be spanned by the unit (arrangement complexes set it False
    because their degree-0 slot holds more than the empty subset).
    """

    def __init__(self, basis, diff, mul, name="A", h0_is_unit_span=True):
        self.basis = {k: list(v) for k, v in basis.items() if v}
        self.diff = {k: dict(v) for k, v in diff.items() if v}
        self.mul = {k: dict(v) for k, v in mul.items() if v}
        self.name = name
        self.h0_is_unit_span = h0_is_unit_span
        if 0 not in self.basis or not self.basis[0]:
            raise DegreeError("FiniteCDGA must contain a unit in degree 0")

    def degrees(self):
        return sorted(self.basis)

    def dim(self, k):
        return len(self.basis.get(k, ()))

    def total_dim(self):
        return sum(len(v) for v in self.basis.values())

    def max_degree(self):
        return max(self.basis)

    def min_degree(self):
        return min(self.basis)

    def d_of(self, k, i):
        return dict(self.diff.get((k, i), {}))

    def product(self, p, i, q, j):
        return dict(self.mul.get(((p, i), (q, j)), {}))

    def multiply_coords(self, p, u, q, v):
        out = {}
        for i, ci in u.items():
            if ci == 0:
                continue
            for j, cj in v.items():
                if cj == 0:
                    continue
                for k, c in self.mul.get(((p, i), (q, j)), {}).items():
                    out[k] = out.get(k, ZERO) + ci * cj * c
        return {k: c for k, c in out.items() if c != 0}

    def label(self, k, i):
        return self.basis[k][i]

    def __repr__(self):
        dims = ", ".join("%d:%d" % (k, len(v)) for k, v in sorted(self.basis.items()))
        return "FiniteCDGA(%s; dims %s)" % (self.name, dims)


class QuotientCDGA:
    """Free ambient Lambda(V) modulo a differential-stable homogeneous ideal."""

    def __init__(self, ambient, ideal_generators, name="quotient"):
        self.ambient = ambient
        self.ideal = []
        for g in ideal_generators:
            if g.is_zero():
                continue
            if g.degree() is None:
                raise DegreeError("ideal generators must be homogeneous")
            self.ideal.append(g)
        self.name = name
        self._adapters = {}

    def __repr__(self):
        return "QuotientCDGA(%s; %d ideal generators)" % (self.name, len(self.ideal))


# ---------------------------------------------------------------------------
# Chain-algebra adapters: a uniform degree-sliced view used by cohomology,
# morphisms, and every consumer module.
# ---------------------------------------------------------------------------

class PresentationComplex:
    """Degree-sliced view of a SullivanPresentation."""

    def __init__(self, pres, budget=DEFAULT_MONOMIAL_BUDGET):
        self.pres = pres
        self.budget = budget
        self._basis = {}
        self._index = {}
        self._dcols = {}

    def basis(self, k):
        if k not in self._basis:
            b = degree_basis(self.pres.ctx, k, self.budget) if k >= 0 else []
            self._basis[k] = b
            self._index[k] = {m: i for i, m in enumerate(b)}
        return self._basis[k]

    def index(self, k):
        self.basis(k)
        return self._index[k]

    def dim(self, k):
        return len(self.basis(k))

    def labels(self, k):
        from .algebra import monomial_str
        return [monomial_str(self.pres.ctx, m) for m in self.basis(k)]

    def to_coords(self, x, k=None):
        if x.is_zero():
            return {}
        deg = x.degree() if k is None else k
        idx = self.index(deg)
        out = {}
        for m, c in x.terms.items():
            out[idx[m]] = c
        return out

    def from_coords(self, k, coords):
        b = self.basis(k)
        return AlgElement(self.pres.ctx, {b[i]: c for i, c in coords.items() if c != 0})

    def differential_column(self, k, i):
        key = (k, i)
        if key not in self._dcols:
            img = apply_derivation(self.pres.d, AlgElement(self.pres.ctx, {self.basis(k)[i]: ONE}))
            self._dcols[key] = self.to_coords(img, k + 1) if not img.is_zero() else {}
        return self._dcols[key]

    def multiply_coords(self, p, u, q, v):
        x = self.from_coords(p, u) * self.from_coords(q, v)
        return self.to_coords(x, p + q) if not x.is_zero() else {}

    def unit_coords(self):
        return {0: ONE}

    def vanishes_above(self, n):
        top = self.pres.top_degree()
        return top is not None and top <= n


class FiniteComplex:
    """Degree-sliced view of a FiniteCDGA (mostly pass-through)."""

    def __init__(self, cdga):
        self.cdga = cdga

    def basis(self, k):
        return self.cdga.basis.get(k, [])

    def dim(self, k):
        return self.cdga.dim(k)

    def labels(self, k):
        return list(self.cdga.basis.get(k, []))

    def differential_column(self, k, i):
        return self.cdga.d_of(k, i)

    def multiply_coords(self, p, u, q, v):
        return self.cdga.multiply_coords(p, u, q, v)

    def unit_coords(self):
        return {0: ONE}

    def vanishes_above(self, n):
        return self.cdga.max_degree() <= n


class QuotientComplex:
    """Degree-sliced view of a QuotientCDGA.

    Quotient coordinates at degree k are the ambient monomials whose indices
    are *not* pivot columns of the ideal-span echelon at degree k, in
    ambient order.  Reduction modulo the span is the projection.
    """

    def __init__(self, quot, budget=DEFAULT_MONOMIAL_BUDGET):
        self.quot = quot
        self.amb = PresentationComplex(quot.ambient, budget)
        self._span = {}
        self._free = {}

    def _ideal_span(self, k):
        if k not in self._span:
            ech = Echelon()
            for g in self.quot.ideal:
                dg = g.degree()
                if dg > k:
                    continue
                for m in self.amb.basis(k - dg):
                    prod = AlgElement(self.quot.ambient.ctx, {m: ONE}) * g
                    if not prod.is_zero():
                        ech.add(self.amb.to_coords(prod, k))
            pivots = set(ech.pivot_columns())
            self._span[k] = ech
            self._free[k] = [i for i in range(self.amb.dim(k)) if i not in pivots]
        return self._span[k]

    def free_monomials(self, k):
        self._ideal_span(k)
        return self._free[k]

    def basis(self, k):
        return self.free_monomials(k)

    def dim(self, k):
        return len(self.free_monomials(k))

    def labels(self, k):
        alab = self.amb.labels(k)
        return [alab[i] for i in self.free_monomials(k)]

    def project(self, k, amb_coords):
        """Ambient coordinates -> quotient coordinates at degree k."""
        res = self._ideal_span(k).residue(amb_coords)
        free = self.free_monomials(k)
        pos = {m: i for i, m in enumerate(free)}
        return {pos[c]: v for c, v in res.items()}

    def lift(self, k, coords):
        free = self.free_monomials(k)
        return {free[i]: v for i, v in coords.items()}

    def differential_column(self, k, i):
        amb_i = self.free_monomials(k)[i]
        mono = self.amb.basis(k)[amb_i]
        img = apply_derivation(self.quot.ambient.d,
                               AlgElement(self.quot.ambient.ctx, {mono: ONE}))
        if img.is_zero():
            return {}
        return self.project(k + 1, self.amb.to_coords(img, k + 1))

    def multiply_coords(self, p, u, q, v):
        x = self.amb.from_coords(p, self.lift(p, u)) * self.amb.from_coords(q, self.lift(q, v))
        if x.is_zero():
            return {}
        return self.project(p + q, self.amb.to_coords(x, p + q))

    def unit_coords(self):
        free0 = self.free_monomials(0)
        if 0 not in free0:
            raise RhtError("unit of the ambient algebra lies in the ideal")
        return {free0.index(0): ONE}

    def vanishes_above(self, n, checked_dims=None):
        """Sound vanishing certificate for Q^{>n}.

        Either the ambient is finite dimensional with top <= n, or the
        quotient dims vanish on a full window [t, 2t-1] below n with t
        larger than every generator degree (then every longer monomial
        factors through the gap).
        """
        if self.amb.vanishes_above(n):
            return True
        if checked_dims is None:
            return False
        maxgen = max(self.quot.ambient.ctx.degrees, default=0)
        for t in range(maxgen + 1, n + 1):
            if 2 * t - 1 > n:
                break
            if all(checked_dims.get(j, None) == 0 for j in range(t, 2 * t)):
                return True
        return False


def complex_of(obj, budget=DEFAULT_MONOMIAL_BUDGET):
    """The degree-sliced adapter for any presentation kind (cached)."""
    if isinstance(obj, SullivanPresentation):
        if budget not in obj._adapters:
            obj._adapters[budget] = PresentationComplex(obj, budget)
        return obj._adapters[budget]
    if isinstance(obj, FiniteCDGA):
        return FiniteComplex(obj)
    if isinstance(obj, QuotientCDGA):
        if budget not in obj._adapters:
            obj._adapters[budget] = QuotientComplex(obj, budget)
        return obj._adapters[budget]
    raise RhtError("not a presentation: %r" % (obj,))


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def validate(p, window=None):
    """Check the cdga axioms appropriate to the presentation kind.

    Returns a ValidationReport; never raises on mathematical violations.
    """
    violations = []
    if isinstance(p, SullivanPresentation):
        ctx = p.ctx
        for name in ctx.names:
            if name not in p.d.images:
                violations.append("generator %s has no differential" % name)
                continue
            img = p.d.images[name]
            if () in img.terms:
                violations.append("d(%s) has a constant term" % name)
            if not img.is_zero():
                want = ctx.degree_of(name) + 1
                if img.degree() != want:
                    violations.append("d(%s) is not homogeneous of degree %d" % (name, want))
        if not violations:
            for name in ctx.names:
                dd = apply_derivation(p.d, p.d.images[name])
                if not dd.is_zero():
                    violations.append("d^2(%s) = %s != 0" % (name, dd))
        return ValidationReport(p.name, violations)

    if isinstance(p, FiniteCDGA):
        return _validate_finite(p)

    if isinstance(p, QuotientCDGA):
        amb = validate(p.ambient)
        violations.extend(amb.violations)
        cx = complex_of(p)
        for g in p.ideal:
            dg = apply_derivation(p.ambient.d, g)
            if dg.is_zero():
                continue
            k = dg.degree()
            span = cx._ideal_span(k)
            if not span.contains(cx.amb.to_coords(dg, k)):
                violations.append("ideal is not differential-stable: d(%s) escapes" % g)
        return ValidationReport(p.name, violations)

    raise RhtError("validate: unsupported object %r" % (p,))


def _validate_finite(A):
    violations = []
    items = [(k, i) for k in sorted(A.basis) for i in range(A.dim(k))]
    unit = (0, 0)
    if A.h0_is_unit_span and A.dim(0) != 1:
        violations.append("degree 0 is not spanned by the unit")
    # d^2 = 0 and degree sanity.
    for (k, i) in items:
        col = A.d_of(k, i)
        for j in col:
            if j >= A.dim(k + 1):
                violations.append("d(%s) hits a missing basis index" % A.label(k, i))
        dd = {}
        for j, c in col.items():
            for l, c2 in A.d_of(k + 1, j).items():
                dd[l] = dd.get(l, ZERO) + c * c2
        if any(v != 0 for v in dd.values()):
            violations.append("d^2(%s) != 0" % A.label(k, i))
    # Unit is a two-sided identity and a cocycle.
    if A.d_of(0, 0):
        violations.append("d(1) != 0")
    for (k, i) in items:
        u = A.multiply_coords(0, {0: ONE}, k, {i: ONE})
        if u != {i: ONE}:
            violations.append("1 * %s != %s" % (A.label(k, i), A.label(k, i)))
    # Graded commutativity and Leibniz on basis pairs.
    for (p_, i) in items:
        for (q_, j) in items:
            ab = A.product(p_, i, q_, j)
            ba = A.product(q_, j, p_, i)
            sign = -1 if (p_ % 2) and (q_ % 2) else 1
            if {k: sign * v for k, v in ba.items()} != ab:
                violations.append("commutativity fails on (%s, %s)"
                                  % (A.label(p_, i), A.label(q_, j)))
            # d(ab) = (da)b + (-1)^p a(db)
            left = {}
            for k_, c in ab.items():
                for l, c2 in A.d_of(p_ + q_, k_).items():
                    left[l] = left.get(l, ZERO) + c * c2
            right = {}
            for j2, c in A.d_of(p_, i).items():
                for l, c2 in A.product(p_ + 1, j2, q_, j).items():
                    right[l] = right.get(l, ZERO) + c * c2
            sgn = -1 if p_ % 2 else 1
            for j2, c in A.d_of(q_, j).items():
                for l, c2 in A.product(p_, i, q_ + 1, j2).items():
                    right[l] = right.get(l, ZERO) + sgn * c * c2
            if {k: v for k, v in left.items() if v != 0} != \
               {k: v for k, v in right.items() if v != 0}:
                violations.append("Leibniz fails on (%s, %s)"
                                  % (A.label(p_, i), A.label(q_, j)))
    # Associativity on basis triples.
    for (p_, i) in items:
        for (q_, j) in items:
            for (r_, l) in items:
                lhs = A.multiply_coords(p_ + q_, A.product(p_, i, q_, j), r_, {l: ONE})
                rhs = A.multiply_coords(p_, {i: ONE}, q_ + r_, A.product(q_, j, r_, l))
                if lhs != rhs:
                    violations.append("associativity fails on (%s, %s, %s)"
                                      % (A.label(p_, i), A.label(q_, j), A.label(r_, l)))
    _ = unit
    return ValidationReport(A.name, violations)


# ---------------------------------------------------------------------------
# Cohomology
# ---------------------------------------------------------------------------

class CohomologyReport:
    """Per-degree Betti numbers with representative cocycles, reusable."""

    def __init__(self, pres, cx, lo, hi):
        self.pres = pres
        self.cx = cx
        self.lo = lo
        self.hi = hi
        self._reps = {}        # k -> list of coordinate vectors
        self._bound = {}       # k -> Echelon of boundaries
        self._cocycles = {}    # k -> list of kernel vectors
        for k in range(lo, hi + 1):
            self._compute(k)

    def _compute(self, k):
        n = self.cx.dim(k)
        cols = [self.cx.differential_column(k, i) for i in range(n)]
        mat = RationalMatrix.from_columns(self.cx.dim(k + 1), cols)
        res = solve_linear(mat)
        bound = Echelon()
        for i in range(self.cx.dim(k - 1)):
            bound.add(self.cx.differential_column(k - 1, i))
        reps = []
        probe = Echelon()
        for r in bound.rows:
            probe.add(dict(r[1]))
        for vec in res.kernel:
            if probe.add(dict(vec)):
                reps.append(vec)
        self._cocycles[k] = res.kernel
        self._bound[k] = bound
        self._reps[k] = reps

    def dim(self, k):
        if k < self.lo or k > self.hi:
            raise DegreeError("degree %d outside computed window [%d, %d]" % (k, self.lo, self.hi))
        return len(self._reps[k])

    def dims(self):
        return {k: len(self._reps[k]) for k in range(self.lo, self.hi + 1)}

    def representatives(self, k):
        return [dict(v) for v in self._reps[k]]

    def representative_elements(self, k):
        """Representatives as AlgElements (free presentations only)."""
        if not isinstance(self.cx, PresentationComplex):
            raise RhtError("representative_elements requires a free presentation")
        return [self.cx.from_coords(k, v) for v in self._reps[k]]

    def boundaries(self, k):
        return self._bound[k]

    def class_coordinates(self, k, cocycle_coords):
        """Coordinates of a cocycle's class in the representative basis.

        Solves cocycle = sum c_i rep_i + boundary; returns {i: c_i} or raises
        if the input is not a cocycle of the complex.
        """
        ech = Echelon(track=True)
        for i in range(self.cx.dim(k - 1)):
            ech.add(self.cx.differential_column(k - 1, i))
        n_b = ech.count
        for rep in self._reps[k]:
            ech.add(dict(rep))
        combo = ech.coordinates(cocycle_coords)
        if combo is None:
            raise RhtError("vector is not a cocycle modulo the computed boundaries")
        return {i - n_b: c for i, c in combo.items() if i >= n_b}

    def is_cocycle(self, k, coords):
        img = {}
        for i, c in coords.items():
            img = vec_add(img, self.cx.differential_column(k, i), c)
        return not img

    def certified_above(self):
        """True when H^{>hi} = 0 is certified, not merely unobserved."""
        if isinstance(self.cx, QuotientComplex):
            dims = {k: self.cx.dim(k) for k in range(self.lo, self.hi + 1)}
            return self.cx.vanishes_above(self.hi, dims)
        return self.cx.vanishes_above(self.hi)


def cohomology(p, lo=0, hi=None, budget=DEFAULT_MONOMIAL_BUDGET):
    """Exact Betti numbers and representatives in the window [lo, hi]."""
    if hi is None:
        raise DegreeError("cohomology requires an explicit upper degree")
    cx = complex_of(p, budget)
    if isinstance(p, FiniteCDGA):
        lo = min(lo, p.min_degree())
    return CohomologyReport(p, cx, lo, hi)


def euler_characteristic(p, n, budget=DEFAULT_MONOMIAL_BUDGET):
    """Window-truncated Euler characteristic of H; `exact` when certified."""
    rep = cohomology(p, 0, n, budget)
    lo = rep.lo
    chi = sum((-1) ** (k % 2) * rep.dim(k) for k in range(lo, n + 1))
    return chi, rep.certified_above()


# ---------------------------------------------------------------------------
# Morphisms
# ---------------------------------------------------------------------------

class CdgaMorphism:
    """Degree-0 multiplicative chain map out of a free presentation.

    Images of generators are AlgElements when the target is free, otherwise
    coordinate dicts {basis_index: coeff} at the generator's degree (labels
    may be used instead of indices for FiniteCDGA targets).
    """

    def __init__(self, source, target, images, name="phi", budget=DEFAULT_MONOMIAL_BUDGET):
        self.source = source
        self.target = target
        self.name = name
        self.budget = budget
        self.tcx = complex_of(target, budget)
        self.images = {}
        for gname in source.ctx.names:
            if gname not in images:
                raise DegreeError("morphism lacks an image for generator %s" % gname)
            raw = images[gname]
            deg = source.ctx.degree_of(gname)
            if isinstance(raw, AlgElement):
                if raw.is_zero():
                    coords = {}
                else:
                    if raw.degree() != deg:
                        raise DegreeError("image of %s must have degree %d" % (gname, deg))
                    coords = self.tcx.to_coords(raw, deg)
            else:
                coords = {}
                for key, c in dict(raw).items():
                    c = Fraction(c)
                    if c == 0:
                        continue
                    if isinstance(key, str):
                        labels = self.tcx.labels(deg)
                        if key not in labels:
                            raise DegreeError("no basis element %r in degree %d" % (key, deg))
                        key = labels.index(key)
                    coords[key] = c
            self.images[gname] = coords
        self._mono_cache = {}

    def apply_monomial(self, mono):
        """Image coordinates of a source monomial, with degree."""
        if mono in self._mono_cache:
            return self._mono_cache[mono]
        ctx = self.source.ctx
        deg = 0
        coords = self.tcx.unit_coords()
        for i, e in mono:
            g = ctx.names[i]
            gdeg = ctx.degrees[i]
            for _ in range(e):
                coords = self.tcx.multiply_coords(deg, coords, gdeg, self.images[g])
                deg += gdeg
                if not coords:
                    break
            if not coords:
                deg = monomial_degree(ctx, mono)
                break
        result = (monomial_degree(ctx, mono), coords if coords else {})
        self._mono_cache[mono] = result
        return result

    def apply(self, x):
        """Image coordinates of a homogeneous AlgElement: (degree, coords)."""
        if x.is_zero():
            return None, {}
        deg = x.degree()
        if deg is None:
            raise DegreeError("morphisms apply to homogeneous elements degree-wise")
        out = {}
        for mono, c in x.terms.items():
            _, coords = self.apply_monomial(mono)
            out = vec_add(out, coords, c)
        return deg, out

    def apply_coords(self, k, coords):
        scx = complex_of(self.source, self.budget)
        out = {}
        for i, c in coords.items():
            _, img = self.apply_monomial(scx.basis(k)[i])
            out = vec_add(out, img, c)
        return out

    def apply_element(self, x):
        """Image as an AlgElement (free targets only)."""
        deg, coords = self.apply(x)
        if not coords:
            return AlgElement.zero(self.target.ctx)
        return self.tcx.from_coords(deg, coords)

    def is_chain_map(self):
        """phi(dv) = d(phi(v)) on every generator."""
        for gname in self.source.ctx.names:
            deg = self.source.ctx.degree_of(gname)
            _, lhs = self.apply(self.source.d.image_of(gname))
            rhs = {}
            for i, c in self.images[gname].items():
                rhs = vec_add(rhs, self.tcx.differential_column(deg, i), c)
            if lhs != rhs:
                return False, gname
        return True, None

    def validate(self):
        violations = []
        ok, gname = self.is_chain_map()
        if not ok:
            violations.append("not a chain map on generator %s" % gname)
        return ValidationReport(self.name, violations)


class FiniteMorphism:
    """Chain map between FiniteCDGAs given by per-degree matrices.

    matrices: {degree: [column vectors]} with one column per source basis
    element.  Validation checks the chain-map identity and multiplicativity
    on basis pairs.
    """

    def __init__(self, source, target, matrices, name="phi"):
        self.source = source
        self.target = target
        self.matrices = {k: [dict(col) for col in cols] for k, cols in matrices.items()}
        self.name = name
        self.tcx = complex_of(target)

    def apply_coords(self, k, coords):
        cols = self.matrices.get(k, [])
        out = {}
        for i, c in coords.items():
            if i < len(cols):
                out = vec_add(out, cols[i], c)
        return out

    def validate(self):
        violations = []
        if self.apply_coords(0, {0: ONE}) != {0: ONE}:
            violations.append("unit is not preserved")
        for k in sorted(self.source.basis):
            for i in range(self.source.dim(k)):
                lhs = self.apply_coords(k + 1, self.source.d_of(k, i))
                rhs = {}
                for j, c in self.apply_coords(k, {i: ONE}).items():
                    rhs = vec_add(rhs, self.target.d_of(k, j), c)
                if lhs != rhs:
                    violations.append("not a chain map on %s" % self.source.label(k, i))
        items = [(k, i) for k in sorted(self.source.basis) for i in range(self.source.dim(k))]
        for (p, i) in items:
            for (q, j) in items:
                lhs = self.apply_coords(p + q, self.source.product(p, i, q, j))
                rhs = self.target.multiply_coords(
                    p, self.apply_coords(p, {i: ONE}), q, self.apply_coords(q, {j: ONE}))
                if lhs != rhs:
                    violations.append("not multiplicative on (%s, %s)"
                                      % (self.source.label(p, i), self.source.label(q, j)))
        return ValidationReport(self.name, violations)


def h_matrix(phi, k, src_report, tgt_report):
    """Matrix of H^k(phi) in the representative bases of the two reports."""
    cols = []
    for rep in src_report.representatives(k):
        img = phi.apply_coords(k, rep)
        cols.append(tgt_report.class_coordinates(k, img))
    return cols


def is_quasi_iso(phi, n, budget=DEFAULT_MONOMIAL_BUDGET):
    """True iff H^k(phi) is bijective for all k <= n; with per-degree witness.

    Returns (bool, {k: (dim source H, dim target H, rank of H(phi))}).
    """
    src = cohomology(phi.source, 0, n, budget)
    tgt = cohomology(phi.target, 0, n, budget)
    witness = {}
    ok = True
    lo = min(src.lo, tgt.lo)
    for k in range(lo, n + 1):
        ds = src.dim(k) if k >= src.lo else 0
        dt = tgt.dim(k) if k >= tgt.lo else 0
        if k >= src.lo:
            cols = []
            for rep in src.representatives(k):
                img = phi.apply_coords(k, rep)
                cols.append(tgt.class_coordinates(k, img) if k >= tgt.lo else
                            ({} if not img else None))
            ech = Echelon()
            rank = 0
            for col in cols:
                if col is None:
                    continue
                if ech.add(col):
                    rank += 1
        else:
            rank = 0
        witness[k] = (ds, dt, rank)
        if not (ds == dt == rank):
            ok = False
    return ok, witness


# ---------------------------------------------------------------------------
# Derived finite cdgas
# ---------------------------------------------------------------------------

def cohomology_algebra(p, n, budget=DEFAULT_MONOMIAL_BUDGET, name=None):
    """(H(p), 0) as a FiniteCDGA on the window [0, n], with products.

    Products landing above the window are dropped; the result is the honest
    cohomology algebra exactly when the report certifies H^{>n} = 0.
    """
    rep = cohomology(p, 0, n, budget)
    cx = rep.cx
    basis = {}
    for k in range(rep.lo, n + 1):
        d = rep.dim(k)
        if d:
            basis[k] = ["h%d_%d" % (k, i) for i in range(d)]
    if 0 not in basis:
        basis[0] = ["h0_0"]
    mul = {}
    degs = sorted(basis)
    for p_ in degs:
        for q_ in degs:
            if p_ + q_ > n or (p_ + q_) not in basis:
                continue
            for i in range(len(basis[p_])):
                for j in range(len(basis[q_])):
                    u = rep.representatives(p_)[i]
                    v = rep.representatives(q_)[j]
                    prod = cx.multiply_coords(p_, u, q_, v)
                    if prod:
                        cls = rep.class_coordinates(p_ + q_, prod)
                        if cls:
                            mul[((p_, i), (q_, j))] = cls
    # The degree-0 class is the unit; pin its products to the identity so the
    # result is independent of representative scaling.
    if len(basis[0]) == 1:
        for k in degs:
            for i in range(len(basis[k])):
                mul[((0, 0), (k, i))] = {i: ONE}
                mul[((k, i), (0, 0))] = {i: ONE}
    A = FiniteCDGA(basis, {}, mul, name=name or ("H(%s)" % getattr(p, "name", "A")))
    A.window_certified = rep.certified_above()
    return A


def finite_truncation(p, n, budget=DEFAULT_MONOMIAL_BUDGET, name=None):
    """FiniteCDGA copy of the cochain algebra of p in degrees <= n.

    Products landing above n are dropped, so cohomology agrees with p only
    in degrees <= n-1 in general; the caller owns the window bookkeeping.
    """
    cx = complex_of(p, budget)
    basis = {}
    for k in range(0, n + 1):
        if cx.dim(k):
            basis[k] = list(cx.labels(k))
    diff = {}
    for k in range(0, n):
        for i in range(cx.dim(k)):
            col = cx.differential_column(k, i)
            if col:
                diff[(k, i)] = col
    mul = {}
    for p_ in range(0, n + 1):
        for q_ in range(0, n + 1 - p_):
            for i in range(cx.dim(p_)):
                for j in range(cx.dim(q_)):
                    prod = cx.multiply_coords(p_, {i: ONE}, q_, {j: ONE})
                    if prod:
                        mul[((p_, i), (q_, j))] = prod
    return FiniteCDGA(basis, diff, mul, name=name or ("%s|<=%d" % (getattr(p, "name", "A"), n)))


def tensor_finite(A, B, name=None):
    """Graded tensor product of two FiniteCDGAs (Koszul signs)."""
    basis = {}
    pairs = {}
    for p in sorted(A.basis):
        for q in sorted(B.basis):
            k = p + q
            for i in range(A.dim(p)):
                for j in range(B.dim(q)):
                    basis.setdefault(k, [])
                    idx = len(basis[k])
                    basis[k].append("%s(x)%s" % (A.label(p, i), B.label(q, j)))
                    pairs[(p, i, q, j)] = (k, idx)
    # Ensure the unit pair sits at index 0 of degree 0.
    if pairs[(0, 0, 0, 0)] != (0, 0):
        raise RhtError("tensor basis ordering broke the unit convention")

    def emb(p, u, q, v, sign=1):
        out = {}
        for i, ci in u.items():
            for j, cj in v.items():
                k, idx = pairs[(p, i, q, j)]
                out[idx] = out.get(idx, ZERO) + sign * ci * cj
        return {i: c for i, c in out.items() if c != 0}

    diff = {}
    mul = {}
    for (p, i, q, j), (k, idx) in pairs.items():
        col = emb(p + 1, A.d_of(p, i), q, {j: ONE})
        sgn = -1 if p % 2 else 1
        col2 = emb(p, {i: ONE}, q + 1, B.d_of(q, j), sgn)
        tot = vec_add(col, col2)
        if tot:
            diff[(k, idx)] = tot
    for (p1, i1, q1, j1), (k1, idx1) in pairs.items():
        for (p2, i2, q2, j2), (k2, idx2) in pairs.items():
            # (a (x) b)(a' (x) b') = (-1)^{|b||a'|} aa' (x) bb'
            sign = -1 if (q1 % 2) and (p2 % 2) else 1
            aa = A.product(p1, i1, p2, i2)
            bb = B.product(q1, j1, q2, j2)
            if aa and bb:
                out = emb(p1 + p2, aa, q1 + q2, bb, sign)
                if out:
                    mul[((k1, idx1), (k2, idx2))] = out
    return FiniteCDGA(basis, diff, mul, name=name or ("%s(x)%s" % (A.name, B.name)),
                      h0_is_unit_span=A.h0_is_unit_span and B.h0_is_unit_span)


def direct_sum_cohomology(A, B, name=None):
    """H1 (+)_Q H2: unit glued, positive parts orthogonal (wedge cohomology)."""
    for X in (A, B):
        if X.diff:
            raise UnsupportedInputError("wedge sum expects zero differentials")
    basis = {0: ["1"]}
    amap = {}
    bmap = {}
    for k in sorted(A.basis):
        if k == 0:
            continue
        for i in range(A.dim(k)):
            basis.setdefault(k, [])
            amap[(k, i)] = len(basis[k])
            basis[k].append("L.%s" % A.label(k, i))
    for k in sorted(B.basis):
        if k == 0:
            continue
        for j in range(B.dim(k)):
            basis.setdefault(k, [])
            bmap[(k, j)] = len(basis[k])
            basis[k].append("R.%s" % B.label(k, j))
    mul = {}
    for (k, i), idx in amap.items():
        mul[((0, 0), (k, idx))] = {idx: ONE}
        mul[((k, idx), (0, 0))] = {idx: ONE}
    for (k, j), idx in bmap.items():
        mul[((0, 0), (k, idx))] = {idx: ONE}
        mul[((k, idx), (0, 0))] = {idx: ONE}
    mul[((0, 0), (0, 0))] = {0: ONE}
    for (p, i), idx1 in amap.items():
        for (q, j), idx2 in amap.items():
            prod = A.product(p, i, q, j)
            out = {}
            for l, c in prod.items():
                if p + q == 0:
                    continue
                out[amap[(p + q, l)]] = c
            if out:
                mul[((p, idx1), (q, idx2))] = out
    for (p, i), idx1 in bmap.items():
        for (q, j), idx2 in bmap.items():
            prod = B.product(p, i, q, j)
            out = {}
            for l, c in prod.items():
                if p + q == 0:
                    continue
                out[bmap[(p + q, l)]] = c
            if out:
                mul[((p, idx1), (q, idx2))] = out
    return FiniteCDGA(basis, {}, mul, name=name or ("%s v %s" % (A.name, B.name)))
