"""Exact-arithmetic toolkit for Newton fans, toric charts and jet spaces.

Subpackages are layered bottom-up: ``lattice`` (cones, Smith form, Hilbert
bases), ``poly`` (sparse polynomials and truncated power series), ``newton``
(Newton polyhedra and nondegeneracy probes), ``fan`` (fans, subdivision and
G-regularity checks), ``resolution`` (toric charts, strict transforms and
exceptional dual graphs), ``jets`` (m-jet equations and jet deformations),
``families`` (two built-in hypersurface families with verification reports)
and ``cli``.
"""

__version__ = "0.1.0"
