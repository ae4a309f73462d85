"""Free graded-commutative algebras over Q with exact rational coefficients.

Generators live in a fixed ordered `GeneratorContext`; monomials are kept in
normal order (context order), odd generators square to zero, and every sign
is computed by counting transpositions of odd factors.  Elements are sparse
maps monomial -> Fraction in canonical form, so equality is literal equality.

Coefficients are `fractions.Fraction` throughout: exact, arbitrary precision,
canonical (gcd 1, positive denominator).  There is no floating-point mode.
"""

from fractions import Fraction

from .errors import ContextMismatchError, DegreeError, DerivationError, BudgetExceededError

Q = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)

DEFAULT_MONOMIAL_BUDGET = 200_000


def as_q(value):
    """Coerce ints / strings like '2/3' to Fraction; reject floats."""
    if isinstance(value, float):
        raise TypeError("floating-point coefficients are not allowed: %r" % value)
    return Fraction(value)


class GeneratorContext:
    """Ordered list of (name, degree) generators of a free algebra Lambda(V).

    The order is fixed forever: it determines monomial normal order and hence
    every Koszul sign.  Degrees must be >= 1 (degree-0 generators belong to
    the finite-dimensional cdga layer, not to free presentations).
    """

    def __init__(self, generators):
        gens = []
        for name, degree in generators:
            if not isinstance(degree, int) or degree < 1:
                raise DegreeError("generator %r must have positive integer degree, got %r" % (name, degree))
            gens.append((str(name), degree))
        names = [n for n, _ in gens]
        if len(set(names)) != len(names):
            raise ContextMismatchError("duplicate generator names: %r" % (names,))
        self.gens = tuple(gens)
        self.names = tuple(names)
        self.degrees = tuple(d for _, d in gens)
        self.index = {n: i for i, (n, _) in enumerate(gens)}

    def __len__(self):
        return len(self.gens)

    def __eq__(self, other):
        return isinstance(other, GeneratorContext) and self.gens == other.gens

    def __hash__(self):
        return hash(self.gens)

    def __repr__(self):
        return "GeneratorContext(%s)" % ", ".join("%s:%d" % g for g in self.gens)

    def degree_of(self, name):
        return self.degrees[self.index[name]]

    def is_odd(self, i):
        return self.degrees[i] % 2 == 1

    def extend(self, more):
        """New context with extra generators appended (order preserved)."""
        return GeneratorContext(list(self.gens) + list(more))

    def generator(self, name):
        """The generator as an AlgElement."""
        i = self.index[name]
        return AlgElement(self, {((i, 1),): ONE})


# A monomial is a tuple of (generator_index, exponent) pairs, sorted by index,
# exponents >= 1, odd generators with exponent exactly 1.  () is the unit.

def monomial_degree(ctx, mono):
    return sum(ctx.degrees[i] * e for i, e in mono)


def monomial_word_length(mono):
    return sum(e for _, e in mono)


def monomial_mul(ctx, m1, m2):
    """Normal-ordered product of two monomials: (sign, monomial) or (0, None)."""
    if not m1:
        return 1, m2
    if not m2:
        return 1, m1
    # Sign: each odd factor of m2 hops over the odd factors of m1 with larger index.
    odd1 = [i for i, _ in m1 if ctx.is_odd(i)]
    swaps = 0
    for j, _ in m2:
        if ctx.is_odd(j):
            for i in odd1:
                if i > j:
                    swaps += 1
    merged = {}
    for i, e in m1:
        merged[i] = merged.get(i, 0) + e
    for i, e in m2:
        merged[i] = merged.get(i, 0) + e
    for i, e in merged.items():
        if ctx.is_odd(i) and e > 1:
            return 0, None
    mono = tuple(sorted(merged.items()))
    return (-1) ** swaps, mono


def monomial_str(ctx, mono):
    if not mono:
        return "1"
    parts = []
    for i, e in mono:
        parts.append(ctx.names[i] if e == 1 else "%s^%d" % (ctx.names[i], e))
    return "*".join(parts)


class AlgElement:
    """Finite Q-linear combination of normal-ordered monomials."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx, terms=None):
        self.ctx = ctx
        clean = {}
        if terms:
            for mono, coeff in terms.items():
                coeff = as_q(coeff)
                if coeff != 0:
                    clean[mono] = clean.get(mono, ZERO) + coeff
                    if clean[mono] == 0:
                        del clean[mono]
        self.terms = dict(sorted(clean.items()))

    # -- constructors ------------------------------------------------------
    @staticmethod
    def zero(ctx):
        return AlgElement(ctx, {})

    @staticmethod
    def unit(ctx, coeff=ONE):
        return AlgElement(ctx, {(): as_q(coeff)})

    # -- structure ---------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def degree(self):
        """Degree if homogeneous, else None.  Zero has degree None."""
        degs = {monomial_degree(self.ctx, m) for m in self.terms}
        if len(degs) == 1:
            return degs.pop()
        return None

    def word_components(self):
        """Split by word length: dict length -> AlgElement."""
        out = {}
        for m, c in self.terms.items():
            out.setdefault(monomial_word_length(m), {})[m] = c
        return {k: AlgElement(self.ctx, v) for k, v in sorted(out.items())}

    def word_part(self, length):
        return AlgElement(self.ctx, {m: c for m, c in self.terms.items()
                                     if monomial_word_length(m) == length})

    def word_min_part(self, length):
        """Terms of word length >= length."""
        return AlgElement(self.ctx, {m: c for m, c in self.terms.items()
                                     if monomial_word_length(m) >= length})

    def linear_part(self):
        return self.word_part(1)

    def _check(self, other):
        if self.ctx != other.ctx:
            raise ContextMismatchError("elements live in different generator contexts")

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, ZERO) + c
        return AlgElement(self.ctx, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return AlgElement(self.ctx, {m: -c for m, c in self.terms.items()})

    def scale(self, coeff):
        coeff = as_q(coeff)
        return AlgElement(self.ctx, {m: c * coeff for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check(other)
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                sign, mono = monomial_mul(self.ctx, m1, m2)
                if sign == 0:
                    continue
                out[mono] = out.get(mono, ZERO) + sign * c1 * c2
        return AlgElement(self.ctx, out)

    def __rmul__(self, coeff):
        return self.scale(coeff)

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative powers are not defined in Lambda(V)")
        result = AlgElement.unit(self.ctx)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other):
        return isinstance(other, AlgElement) and self.ctx == other.ctx and self.terms == other.terms

    def __hash__(self):
        return hash((self.ctx, tuple(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.terms.items():
            ms = monomial_str(self.ctx, m)
            if ms == "1":
                parts.append(str(c))
            elif c == 1:
                parts.append(ms)
            elif c == -1:
                parts.append("-" + ms)
            else:
                parts.append("%s*%s" % (c, ms))
        s = " + ".join(parts)
        return s.replace("+ -", "- ")


def multiply(x, y):
    """Normal-ordered product with Koszul signs (odd squares annihilated)."""
    return x * y


class Derivation:
    """Degree-r derivation of Lambda(V), given by its values on generators.

    Extension to monomials follows the graded Leibniz rule
    theta(xy) = theta(x) y + (-1)^(r deg x) x theta(y).
    """

    def __init__(self, ctx, degree, images):
        self.ctx = ctx
        self.degree = degree
        self.images = {}
        for name, img in images.items():
            if name not in ctx.index:
                raise DerivationError("image given for unknown generator %r" % name)
            if img.ctx != ctx:
                raise ContextMismatchError("image of %r lives in a different context" % name)
            if not img.is_zero():
                d = img.degree()
                if d is None or d != ctx.degree_of(name) + degree:
                    raise DegreeError(
                        "image of %r must be homogeneous of degree %d"
                        % (name, ctx.degree_of(name) + degree))
            self.images[name] = img

    def image_of(self, name):
        if name not in self.images:
            raise DerivationError("derivation has no image for generator %r" % name)
        return self.images[name]

    def __call__(self, x):
        return apply_derivation(self, x)

    def __repr__(self):
        body = ", ".join("%s -> %s" % (n, v) for n, v in self.images.items())
        return "Derivation(deg %+d; %s)" % (self.degree, body)


def apply_derivation(theta, x):
    """Leibniz extension of a derivation to an arbitrary element."""
    if x.ctx != theta.ctx:
        raise ContextMismatchError("derivation and element contexts differ")
    ctx = x.ctx
    r = theta.degree
    out = AlgElement.zero(ctx)
    for mono, coeff in x.terms.items():
        prefix_deg = 0
        for pos, (i, e) in enumerate(mono):
            g_img = theta.image_of(ctx.names[i])
            if not g_img.is_zero():
                # Remove one copy of generator i; even copies commute so the
                # remaining e-1 copies may sit on either side without a sign.
                left = tuple((j, f) for j, f in mono[:pos]) + \
                    (((i, e - 1),) if e > 1 else ())
                right = mono[pos + 1:]
                sign = -1 if (r % 2) and (prefix_deg % 2) else 1
                term = AlgElement(ctx, {left: ONE}) * g_img * AlgElement(ctx, {right: ONE})
                out = out + term.scale(sign * e * coeff)
            prefix_deg += ctx.degrees[i] * e
    return out


def compose_derivation(theta, x_images=None):
    """theta o theta on generators, as a dict name -> AlgElement."""
    return {name: apply_derivation(theta, theta.image_of(name)) for name in theta.ctx.names}


def degree_basis(ctx, n, budget=DEFAULT_MONOMIAL_BUDGET):
    """Complete ordered monomial basis of Lambda(V) in total degree n.

    Deterministic order: lexicographic in exponent vectors over the context
    order (unit first in degree 0).  Raises BudgetExceededError when the
    basis would exceed `budget` monomials.
    """
    if n < 0:
        return []
    out = []

    def rec(idx, remaining, acc):
        if remaining == 0:
            out.append(tuple(acc))
            if len(out) > budget:
                raise BudgetExceededError(
                    "degree %d basis exceeds %d monomials" % (n, budget))
            return
        if idx >= len(ctx.gens):
            return
        deg = ctx.degrees[idx]
        max_e = remaining // deg
        if ctx.is_odd(idx):
            max_e = min(max_e, 1)
        for e in range(0, max_e + 1):
            if e:
                acc.append((idx, e))
            rec(idx + 1, remaining - e * deg, acc)
            if e:
                acc.pop()

    rec(0, n, [])
    return out


def substitute(x, images, new_ctx):
    """Algebra-map extension of a generator assignment name -> AlgElement.

    Every generator of x's context must appear in `images` with a value in
    `new_ctx`; the map is extended multiplicatively (Koszul signs included
    via ordinary products in the target).
    """
    out = AlgElement.zero(new_ctx)
    for mono, coeff in x.terms.items():
        term = AlgElement.unit(new_ctx, coeff)
        for i, e in mono:
            img = images[x.ctx.names[i]]
            for _ in range(e):
                term = term * img
                if term.is_zero():
                    break
            if term.is_zero():
                break
        out = out + term
    return out


def rebase(x, new_ctx):
    """Reinterpret x in an extended context sharing the same initial segment."""
    if new_ctx.gens[:len(x.ctx.gens)] != x.ctx.gens:
        raise ContextMismatchError("rebase target does not extend the source context")
    return AlgElement(new_ctx, x.terms)


def element_from_coords(ctx, basis, coords):
    """AlgElement from a sparse {index: Fraction} vector over a monomial basis."""
    return AlgElement(ctx, {basis[i]: c for i, c in coords.items() if c != 0})


def coords_from_element(x, basis_index):
    """Sparse coordinates of x over a monomial basis given as {mono: index}."""
    out = {}
    for mono, coeff in x.terms.items():
        if mono not in basis_index:
            raise DegreeError("element has a term outside the given basis: %r" % (mono,))
        out[basis_index[mono]] = coeff
    return out
