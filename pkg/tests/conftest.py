"""Shared model builders used across the suite."""

import pytest

from rht.algebra import AlgElement, GeneratorContext
from rht.cdga import SullivanPresentation, cohomology_algebra


def sphere2_model():
    ctx = GeneratorContext([("a", 2), ("b", 3)])
    a = ctx.generator("a")
    return SullivanPresentation(ctx, {"a": AlgElement.zero(ctx), "b": a * a},
                                name="S2")


def nonformal_uvw():
    """The degree-1 example with du = dv = 0, dw = uv."""
    ctx = GeneratorContext([("u", 1), ("v", 1), ("w", 1)])
    u, v = ctx.generator("u"), ctx.generator("v")
    zero = AlgElement.zero(ctx)
    return SullivanPresentation(ctx, {"u": zero, "v": zero, "w": u * v},
                                name="uvw")


def wedge_two_s2_cohomology():
    """H of a wedge of two 2-spheres: two degree-2 classes, all products zero."""
    from rht.constructions import sphere, wedge_cohomology
    h = cohomology_algebra(sphere(2), 2, name="H(S2)")
    return wedge_cohomology(h, cohomology_algebra(sphere(2), 2), name="H(S2vS2)")


@pytest.fixture
def s2():
    return sphere2_model()


@pytest.fixture
def uvw():
    return nonformal_uvw()
