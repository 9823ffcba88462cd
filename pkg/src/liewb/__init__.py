"""Exact computations with Lie algebras of polynomial vector fields.

Modules: ``poly`` (Laurent polynomials over Q), ``weyl`` (differential
operators), ``lie`` (structure constants, gradings, multiplets),
``enveloping`` (PBW normal form and Casimir search), ``poisson``
(Lie-Poisson invariants), ``extensions`` (central extensions and virtual
copies), ``catalog`` (fixtures and table diffs) and ``cli``.
"""

__version__ = "0.1.0"
