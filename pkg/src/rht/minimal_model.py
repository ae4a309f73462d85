"""Minimal Sullivan models, Lambda-extensions, and acyclic closures.

The model of a cdga A with H^0(A) = Q and H^1(A) = 0 is built degree by
degree.  At stage n the partial morphism phi: (Lambda V^{<=n-1}, d) -> A has
H^{<=n-1}(phi) iso and H^n(phi) injective; the stage adjoins cocycle
generators spanning coker H^n(phi), then degree-n generators whose
differentials kill ker H^{n+1}(phi).  Representatives follow the
first-solution policy of the exact solver under the fixed monomial order, so
the output is deterministic; different pivot policies may change
coefficients but never the generator counts.
"""

from .algebra import (AlgElement, GeneratorContext, ONE, rebase, substitute,
                      DEFAULT_MONOMIAL_BUDGET)
from .cdga import (CdgaMorphism, SullivanPresentation, cohomology, complex_of,
                   validate)
from .errors import DegreeError, RhtError, UnsupportedInputError
from .linalg import Echelon, RationalMatrix, solve_linear, vec_add, PIVOT_MIN_BITS


def is_minimal(p):
    """True iff d(V) lies in Lambda^{>=2} V (no generator image has a linear term)."""
    for name in p.ctx.names:
        img = p.d.image_of(name)
        if not img.linear_part().is_zero() or () in img.terms:
            return False
    return True


class SullivanCertificate:
    """Greedy filtration V(0) subset V(1) subset ... exhibiting the Sullivan condition."""

    def __init__(self, stages, stuck):
        self.stages = stages    # list of lists of generator names
        self.stuck = stuck      # generator names that could not be filtered

    @property
    def ok(self):
        return not self.stuck

    def stage_of(self, name):
        for r, names in enumerate(self.stages):
            if name in names:
                return r
        return None

    def __repr__(self):
        if self.ok:
            return "SullivanCertificate(%s)" % "; ".join(
                "V(%d)=%s" % (r, ",".join(s)) for r, s in enumerate(self.stages))
        return "SullivanCertificate(stuck on %s)" % ",".join(sorted(self.stuck))


def is_sullivan(p):
    """Greedy construction of the generation filtration; exact on failure."""
    ctx = p.ctx
    known = set()
    stages = []
    remaining = set(range(len(ctx)))
    while remaining:
        stage = []
        for i in sorted(remaining):
            img = p.d.image_of(ctx.names[i])
            if all(j in known for mono in img.terms for j, _ in mono):
                stage.append(i)
        if not stage:
            break
        for i in stage:
            known.add(i)
            remaining.discard(i)
        stages.append([ctx.names[i] for i in stage])
    return SullivanCertificate(stages, [ctx.names[i] for i in sorted(remaining)])


class MinimalModelResult:
    """Minimal model with its quasi-isomorphism and provenance bookkeeping."""

    def __init__(self, model, phi, certified_degree, provenance, target):
        self.model = model
        self.phi = phi
        self.certified_degree = certified_degree
        self.provenance = provenance    # name -> ("cocycle" | "kernel", stage)
        self.target = target

    def ranks(self):
        """dim V^k for 2 <= k <= certified_degree (Theorem: = rk_k of the space)."""
        out = {k: 0 for k in range(2, self.certified_degree + 1)}
        for name, deg in zip(self.model.ctx.names, self.model.ctx.degrees):
            if deg in out:
                out[deg] += 1
        return out

    def __repr__(self):
        return "MinimalModelResult(%s, certified to %d)" % (self.model, self.certified_degree)


def _target_h0_h1(A, budget):
    rep = cohomology(A, 0, 1, budget)
    if rep.dim(0) != 1:
        raise UnsupportedInputError("minimal models require H^0 = Q, got dim %d" % rep.dim(0))
    if rep.dim(1) != 0:
        raise UnsupportedInputError(
            "minimal models of presentations with H^1 != 0 are not supported "
            "(supply a finite V^1 model directly for pi_1 features)")


def minimal_model(A, n=16, budget=DEFAULT_MONOMIAL_BUDGET, pivot_policy=PIVOT_MIN_BITS,
                  name=None):
    """Minimal Sullivan model of A with H(phi) iso up to n, injective at n+1."""
    validate(A).raise_if_invalid()
    _target_h0_h1(A, budget)
    tgt_rep = cohomology(A, 0, n + 2, budget)
    tcx = tgt_rep.cx

    gens = []            # [(name, degree)]
    d_imgs = {}          # name -> AlgElement in the current context
    phi_imgs = {}        # name -> target coordinate dict
    provenance = {}

    def build():
        ctx = GeneratorContext(gens)
        images = {g: rebase(img, ctx) for g, img in d_imgs.items()}
        model = SullivanPresentation(ctx, images,
                                     name=name or ("M(%s)" % getattr(A, "name", "A")))
        phi = CdgaMorphism(model, A, dict(phi_imgs), name="phi", budget=budget)
        return model, phi

    model, phi = build()

    for stage in range(2, n + 1):
        # --- cocycle generators: span coker H^stage(phi) -------------------
        src_rep = cohomology(model, 0, stage, budget)
        image = Echelon()
        for rep_vec in src_rep.representatives(stage):
            img = phi.apply_coords(stage, rep_vec)
            cls = tgt_rep.class_coordinates(stage, img)
            image.add(cls)
        new_count = 0
        for i, t_rep in enumerate(tgt_rep.representatives(stage)):
            if not image.add({i: ONE}):
                continue
            gname = "v%d_%d" % (stage, new_count)
            new_count += 1
            gens.append((gname, stage))
            d_imgs[gname] = AlgElement.zero(GeneratorContext(gens))
            phi_imgs[gname] = t_rep
            provenance[gname] = ("cocycle", stage)
        if new_count:
            d_imgs = {g: rebase(v, GeneratorContext(gens)) for g, v in d_imgs.items()}
            model, phi = build()

        # --- kernel-killing generators: ker H^{stage+1}(phi) ---------------
        src_rep = cohomology(model, 0, stage + 1, budget)
        reps = src_rep.representatives(stage + 1)
        cols = []
        for rep_vec in reps:
            img = phi.apply_coords(stage + 1, rep_vec)
            cols.append(tgt_rep.class_coordinates(stage + 1, img))
        hdim_tgt = tgt_rep.dim(stage + 1)
        mat = RationalMatrix.from_columns(hdim_tgt, cols)
        ker = solve_linear(mat, pivot_policy=pivot_policy).kernel
        scx = complex_of(model, budget)
        d_cols = [tcx.differential_column(stage, i) for i in range(tcx.dim(stage))]
        d_mat = RationalMatrix.from_columns(tcx.dim(stage + 1), d_cols)
        new_count = 0
        for kvec in ker:
            z_coords = {}
            for i, c in kvec.items():
                z_coords = vec_add(z_coords, reps[i], c)
            z = scx.from_coords(stage + 1, z_coords)
            img = phi.apply_coords(stage + 1, z_coords)
            sol = solve_linear(d_mat, targets=[img], pivot_policy=pivot_policy)
            if not sol.solvable[0]:
                raise RhtError("kernel class is not exact in the target")  # pragma: no cover
            gname = "w%d_%d" % (stage, new_count)
            new_count += 1
            gens.append((gname, stage))
            new_ctx = GeneratorContext(gens)
            d_imgs = {g: rebase(v, new_ctx) for g, v in d_imgs.items()}
            d_imgs[gname] = rebase(z, new_ctx)
            phi_imgs[gname] = sol.solutions[0]
            provenance[gname] = ("kernel", stage)
            model, phi = build()

    return MinimalModelResult(model, phi, n, provenance, A)


# ---------------------------------------------------------------------------
# Lambda-extensions
# ---------------------------------------------------------------------------

class LambdaExtension:
    """Relative Sullivan algebra (Lambda W (x) Lambda Z, d) with filtered Z.

    `total` is a presentation whose context starts with the base generators
    (names in `base_names`) followed by the fiber generators.  Validation
    checks that the base is a sub-cdga and constructs the nilpotence
    filtration Z(0) subset Z(1) subset ... greedily; failure to exhaust Z is
    a violation.
    """

    def __init__(self, total, base_names, name="extension"):
        self.total = total
        self.base_names = list(base_names)
        self.name = name
        base_set = set(self.base_names)
        for i, gname in enumerate(total.ctx.names):
            if gname in base_set and i >= len(self.base_names):
                raise DegreeError("base generators must come first in the total context")
        self.fiber_names = [g for g in total.ctx.names if g not in base_set]
        self.filtration = self._filter()

    def _filter(self):
        ctx = self.total.ctx
        base_idx = {ctx.index[g] for g in self.base_names}
        fiber_idx = [ctx.index[g] for g in self.fiber_names]
        known = set(base_idx)
        levels = {}
        level = 0
        remaining = set(fiber_idx)
        while remaining:
            stage = []
            for i in sorted(remaining):
                img = self.total.d.image_of(ctx.names[i])
                if all(j in known for mono in img.terms for j, _ in mono):
                    stage.append(i)
            if not stage:
                return None
            level += 1
            for i in stage:
                known.add(i)
                remaining.discard(i)
                levels[ctx.names[i]] = level
        return levels

    def validate(self):
        violations = list(validate(self.total).violations)
        ctx = self.total.ctx
        base_idx = {ctx.index[g] for g in self.base_names}
        for g in self.base_names:
            img = self.total.d.image_of(g)
            if any(j not in base_idx for mono in img.terms for j, _ in mono):
                violations.append("d(%s) leaves the base algebra" % g)
        if self.filtration is None:
            violations.append("fiber generators admit no nilpotence filtration")
        from .cdga import ValidationReport
        return ValidationReport(self.name, violations)

    def base_presentation(self):
        sub = GeneratorContext([(g, self.total.ctx.degree_of(g)) for g in self.base_names])
        assign = {g: sub.generator(g) for g in self.base_names}
        images = {}
        for g in self.base_names:
            src = self.total.d.image_of(g)
            for mono in src.terms:
                for j, _ in mono:
                    if self.total.ctx.names[j] not in sub.index:
                        raise DegreeError("d(%s) leaves the base algebra" % g)
            images[g] = substitute(src, assign, sub)
        return SullivanPresentation(sub, images, name="%s|base" % self.name)

    def fiber_presentation(self):
        """(Lambda Z, d-bar): the total differential with base terms deleted."""
        ctx = self.total.ctx
        sub = GeneratorContext([(g, ctx.degree_of(g)) for g in self.fiber_names])
        kill = {}
        for g in ctx.names:
            kill[g] = sub.generator(g) if g in sub.index else AlgElement.zero(sub)
        images = {}
        for g in self.fiber_names:
            images[g] = substitute(self.total.d.image_of(g), kill, sub)
        return SullivanPresentation(sub, images, name="%s|fiber" % self.name)

    def __repr__(self):
        return "LambdaExtension(%s; base %s; fiber %s)" % (
            self.name, ",".join(self.base_names), ",".join(self.fiber_names))


def fiber_model(ext):
    """The fiber (Lambda Z, d-bar) of a Lambda-extension."""
    return ext.fiber_presentation()


def pushout_extension(phi, ext, name=None):
    """Pull a Lambda-extension back along a Sullivan representative.

    phi: base(ext) -> (Lambda V, d) a morphism of free presentations; the new
    total is (Lambda V (x) Lambda Z, d') with d'(z) = (phi (x) id)(dz) and the
    fiber unchanged.
    """
    base = ext.base_presentation()
    if set(phi.source.ctx.names) != set(ext.base_names):
        raise DegreeError("morphism source must be the extension base")
    new_base = phi.target
    fiber_gens = [(g, ext.total.ctx.degree_of(g)) for g in ext.fiber_names]
    for g, _ in fiber_gens:
        if g in new_base.ctx.index:
            raise DegreeError("fiber generator %s collides with the new base" % g)
    ctx = GeneratorContext(list(new_base.ctx.gens) + fiber_gens)
    images = {}
    for g in new_base.ctx.names:
        images[g] = rebase(new_base.d.image_of(g), ctx)
    assign = {}
    for g in ext.total.ctx.names:
        if g in ext.base_names:
            assign[g] = rebase(phi.apply_element(phi.source.ctx.generator(g)), ctx)
        else:
            assign[g] = ctx.generator(g)
    for g in ext.fiber_names:
        images[g] = substitute(ext.total.d.image_of(g), assign, ctx)
    total = SullivanPresentation(ctx, images, name=name or ("%s^*%s" % (phi.name, ext.name)))
    out = LambdaExtension(total, list(new_base.ctx.names), name=total.name)
    if out.filtration is None:
        raise RhtError("pullback destroyed the nilpotence filtration")  # pragma: no cover
    return out


# ---------------------------------------------------------------------------
# Acyclic closures
# ---------------------------------------------------------------------------

class AcyclicClosure:
    """(Lambda V (x) Lambda U, d) with H^+ = 0 and pairing alpha: U -> V."""

    def __init__(self, extension, pairing, verified_degree):
        self.extension = extension
        self.total = extension.total
        self.pairing = pairing            # u name -> v name, deg v = deg u + 1
        self.verified_degree = verified_degree

    def fiber(self):
        return self.extension.fiber_presentation()

    def __repr__(self):
        return "AcyclicClosure(%s; verified to %d)" % (self.total.name, self.verified_degree)


def acyclic_closure(p, n, budget=DEFAULT_MONOMIAL_BUDGET):
    """Acyclic closure of a minimal Sullivan presentation with V = V^{>=2}.

    For each generator v a fiber generator u with deg u = deg v - 1 is
    adjoined, d(u) = v - s where s solves d(s) = d(v) inside the ideal
    generated by V (word length >= 2, at least one V factor).  The quotient
    differential on Lambda U vanishes by construction; H^{1..n} of the total
    algebra is verified to be zero.
    """
    if not is_minimal(p):
        raise UnsupportedInputError("acyclic closure requires a minimal presentation")
    if any(d < 2 for d in p.ctx.degrees):
        raise UnsupportedInputError("acyclic closure requires V = V^{>=2} "
                                    "(V^1 would force U^0 != 0)")
    v_names = sorted(p.ctx.names, key=lambda g: (p.ctx.degree_of(g), p.ctx.index[g]))
    gens = list(p.ctx.gens)
    d_imgs = {g: p.d.image_of(g) for g in p.ctx.names}
    pairing = {}
    for vname in v_names:
        vdeg = p.ctx.degree_of(vname)
        uname = vname + "_bar"
        if uname in [g for g, _ in gens]:
            raise DegreeError("generator name %s collides with the closure naming" % uname)
        ctx = GeneratorContext(gens)  # context before adjoining u
        cur = SullivanPresentation(ctx, {g: rebase(img, ctx) for g, img in d_imgs.items()})
        dv = rebase(p.d.image_of(vname), ctx)
        if dv.is_zero():
            s = AlgElement.zero(ctx)
        else:
            s = _primitive_in_v_ideal(cur, set(p.ctx.names), dv, budget)
        gens.append((uname, vdeg - 1))
        new_ctx = GeneratorContext(gens)
        d_imgs = {g: rebase(img, new_ctx) for g, img in d_imgs.items()}
        d_imgs[uname] = rebase(ctx.generator(vname), new_ctx) - rebase(s, new_ctx)
        pairing[uname] = vname
    ctx = GeneratorContext(gens)
    total = SullivanPresentation(ctx, {g: rebase(img, ctx) for g, img in d_imgs.items()},
                                 name="%s-closure" % p.name)
    ext = LambdaExtension(total, list(p.ctx.names), name=total.name)
    rep = cohomology(total, 0, n, budget)
    for k in range(1, n + 1):
        if rep.dim(k) != 0:
            raise RhtError("acyclic closure failed: H^%d != 0" % k)  # pragma: no cover
    fib = ext.fiber_presentation()
    for g in fib.ctx.names:
        if not fib.d.image_of(g).is_zero():
            raise RhtError("quotient differential on Lambda U is nonzero")  # pragma: no cover
    return AcyclicClosure(ext, pairing, n)


def _primitive_in_v_ideal(pres, v_names, target, budget):
    """Solve d(s) = target with s in V ^ Lambda^+(V + U), first-solution policy."""
    cx = complex_of(pres, budget)
    deg = target.degree() - 1
    ctx = pres.ctx
    v_idx = {ctx.index[g] for g in v_names if g in ctx.index}
    candidates = []
    for pos, mono in enumerate(cx.basis(deg)):
        wl = sum(e for _, e in mono)
        if wl >= 2 and any(i in v_idx for i, _ in mono):
            candidates.append(pos)
    cols = [cx.differential_column(deg, i) for i in candidates]
    mat = RationalMatrix.from_columns(cx.dim(deg + 1), cols)
    sol = solve_linear(mat, targets=[cx.to_coords(target, deg + 1)])
    if not sol.solvable[0]:
        raise RhtError("no primitive in the V-ideal; closure construction failed")
    coords = {candidates[i]: c for i, c in sol.solutions[0].items()}
    return cx.from_coords(deg, coords)
