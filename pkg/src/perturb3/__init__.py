"""Exact combinatorics for perturbative 3-manifold invariants.

Modules: :mod:`graphs` (multigraphs, canonical forms, diagram enumeration),
:mod:`parity` (parity-functor signs), :mod:`vassiliev` (the spaces V_n),
:mod:`faces` (configuration-space faces and gluings), :mod:`surgery`
(leading-order surgery formulas) and :mod:`cli`.
"""

__version__ = "0.1.0"
