"""Exact-rational computer algebra for Sullivan models and their invariants.

The package is organized around free graded-commutative algebras over Q
(`algebra`), exact sparse linear algebra (`linalg`), cdga presentations and
cohomology (`cdga`), minimal Sullivan models and Lambda-extensions
(`minimal_model`), homotopy Lie algebras and BCH group structure
(`homotopy_lie`), numerical homotopy invariants (`invariants`), named model
builders (`constructions`), and a small description language plus CLI
(`dsl`, `cli`).
"""

__version__ = "0.1.0"
