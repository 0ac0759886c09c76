"""Built-in hypersurface families with verified resolution data.

Two four-variable families are provided, each singular only at the origin
and each resolved by one of the hand-built fans in `fan`:

  family 1:  f = h_q(x1, x2) + h_k(x3, x4),      k = p*q,  p >= 2, q >= 2
  family 2:  f = h_q(x1, x2) + h_k(x3, x4^2),    k = q,    q >= 3

where h_q and h_k are squarefree homogeneous binary forms of the stated
degrees, neither divisible by a variable, supplied as factor lists (the
defaults are the Fermat forms a^d + b^d).  Under these hypotheses the
exceptional fiber of the toric modification has (p-1)*q + 1 components
for family 1 and 2 components for family 2, and all of them are essential.

`verify` re-derives everything from scratch for a given spec: the family
fan refines the Newton fan, the interior rays match the closed form (or the
fan equals the double stellar subdivision of the orthant, for family 2),
the subdivision is G-regular, property (*) holds, no coordinate torus orbit
lies inside the hypersurface, and the assembled dual graph has the expected
component count.  Any failure lands in `discrepancies`; the report is empty
of discrepancies exactly when every check passes.

Isolation of the singular point is *verified* only when the gradient is
diagonal (each partial a single monomial in its own variable, as with the
Fermat defaults); for general factor lists it is part of the declared
family hypothesis and the report flags it as "assumed".
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

from .fan import (Fan, family1_fan, family2_fan, g_subdivision_check,
                  is_subdivision, newton_fan, stellar_subdivision)
from .lattice import Cone, dot
from .newton import _on_compact_face, compact_faces, newton_polyhedron
from .poly import (SparsePolynomial, _univariate_data, format_polynomial,
                   partial_derivative, set_var_one, set_vars_zero,
                   squarefree_part)
from .resolution import (DualGraph, UnsupportedStructureError,
                         assemble_dual_graph, chart, dual_graph_json,
                         strict_transform)


class Family(Enum):
    ONE = 1
    TWO = 2


@dataclass(frozen=True)
class FamilySpec:
    """A member of one of the two families.

    `hq_factors` and `hk_factors` are tuples of two-variable polynomials
    whose products are the binary forms h_q and h_k.  Build specs through
    `family1_spec` / `family2_spec`, which validate the hypotheses; the
    factor data is re-validated by `build_polynomial` in any case.
    """

    family: Family
    p: Optional[int]
    q: int
    hq_factors: tuple
    hk_factors: tuple


def fermat_form(degree: int) -> SparsePolynomial:
    """a^degree + b^degree, the default factor for either slot."""
    if degree < 1:
        raise ValueError("degree must be positive")
    return SparsePolynomial(2, {(degree, 0): Fraction(1),
                                (0, degree): Fraction(1)})


def _product(factors):
    prod = SparsePolynomial.constant(2, Fraction(1))
    for h in factors:
        prod = prod * h
    return prod


def _dehomogenize(h: SparsePolynomial) -> SparsePolynomial:
    # h(t, 1); degree is preserved whenever the second variable does not
    # divide h, which the validator guarantees
    return set_var_one(h, 1)


def _validate_factors(factors, degree: int, label: str) -> tuple:
    """Check one factor list against the family hypotheses.

    Every factor must be a nonzero homogeneous polynomial in two variables;
    the product must have the declared degree, must not be divisible by
    either variable (both corner coefficients nonzero), and must be
    squarefree.  Squarefreeness is checked on the dehomogenization h(t, 1),
    which is faithful because the corner conditions rule out linear factors
    at infinity.
    """
    factors = tuple(factors)
    if not factors:
        raise ValueError(f"{label}: at least one factor is required")
    for h in factors:
        if not isinstance(h, SparsePolynomial) or h.n_vars != 2:
            raise ValueError(
                f"{label}: factors must be polynomials in two variables")
        if h.is_zero():
            raise ValueError(f"{label}: zero factor")
        if not h.is_homogeneous():
            raise ValueError(
                f"{label}: factor {format_polynomial(h, ('a', 'b'))} "
                "is not homogeneous")
    prod = _product(factors)
    if prod.total_degree() != degree:
        raise ValueError(
            f"{label}: factor degrees sum to {prod.total_degree()}, "
            f"expected {degree}")
    # divisibility by a variable shows up as a vanishing corner: a | h
    # kills the pure-b term and vice versa
    for corner, name in (((0, degree), "first"), ((degree, 0), "second")):
        if prod.coefficient(corner) == 0:
            raise ValueError(
                f"{label}: the {name} variable divides the product")
    _, is_sf = squarefree_part(_dehomogenize(prod))
    if not is_sf:
        raise ValueError(f"{label}: the factor product is not squarefree")
    return factors


def _hk_degree(spec: FamilySpec) -> int:
    return spec.p * spec.q if spec.family is Family.ONE else spec.q


def family1_spec(p: int, q: int, hq_factors=None,
                 hk_factors=None) -> FamilySpec:
    """Spec for h_q(x1,x2) + h_{pq}(x3,x4); Fermat defaults."""
    if not isinstance(p, int) or not isinstance(q, int) or p < 2 or q < 2:
        raise ValueError("family 1 requires integers p >= 2 and q >= 2")
    if hq_factors is None:
        hq_factors = (fermat_form(q),)
    if hk_factors is None:
        hk_factors = (fermat_form(p * q),)
    return FamilySpec(Family.ONE, p, q,
                      _validate_factors(hq_factors, q, "h_q"),
                      _validate_factors(hk_factors, p * q, "h_k"))


def family2_spec(q: int, hq_factors=None, hk_factors=None) -> FamilySpec:
    """Spec for h_q(x1,x2) + h_q'(x3,x4^2); Fermat defaults."""
    if not isinstance(q, int) or q < 3:
        raise ValueError("family 2 requires an integer q >= 3")
    if hq_factors is None:
        hq_factors = (fermat_form(q),)
    if hk_factors is None:
        hk_factors = (fermat_form(q),)
    return FamilySpec(Family.TWO, None, q,
                      _validate_factors(hq_factors, q, "h_q"),
                      _validate_factors(hk_factors, q, "h_k"))


# ---------------------------------------------------------------------------
# the defining polynomial


def _embed(h: SparsePolynomial, positions, scale: int) -> SparsePolynomial:
    # (a, b) |-> (x_{positions[0]}, x_{positions[1]}^scale) inside Q[x1..x4]
    terms = {}
    for (i, j), c in h.terms.items():
        e = [0, 0, 0, 0]
        e[positions[0]] = i
        e[positions[1]] = j * scale
        terms[tuple(e)] = terms.get(tuple(e), Fraction(0)) + c
    return SparsePolynomial(4, terms)


def build_polynomial(spec: FamilySpec) -> SparsePolynomial:
    """The defining equation f in Q[x1..x4].

    Factor hypotheses are re-validated here, so a hand-built FamilySpec
    with a non-squarefree product is rejected even though the dataclass
    itself carries no checks.
    """
    _validate_factors(spec.hq_factors, spec.q, "h_q")
    _validate_factors(spec.hk_factors, _hk_degree(spec), "h_k")
    hq = _product(spec.hq_factors)
    hk = _product(spec.hk_factors)
    scale = 1 if spec.family is Family.ONE else 2
    return _embed(hq, (0, 1), 1) + _embed(hk, (2, 3), scale)


def family_fan(spec: FamilySpec) -> Fan:
    if spec.family is Family.ONE:
        return family1_fan(spec.p, spec.q)
    return family2_fan(spec.q)


def expected_component_count(spec: FamilySpec) -> int:
    """Closed form for the number of exceptional components."""
    if spec.family is Family.ONE:
        return (spec.p - 1) * spec.q + 1
    return 2


def family_root_data(spec: FamilySpec):
    """Root-matching data handed to the component classifier.

    The chains of components over the rays (p-j, p-j, 1, 1), j >= 1, are
    indexed by the roots of h_q(s, 1); the canonical form is the monic
    dense coefficient tuple of that univariate polynomial, matched in every
    chart along the weight direction (1, -1, 0, 0).
    """
    hq = _product(spec.hq_factors)
    _, coeffs = _univariate_data(_dehomogenize(hq))
    lead = coeffs[-1]
    return (1, -1, 0, 0), tuple(Fraction(c) / lead for c in coeffs)


def family_labeler(spec: FamilySpec):
    """Component labels: E_0 and E_{i,j} (family 1); E_1, E_2 (family 2)."""
    if spec.family is Family.ONE:
        p = spec.p

        def label(ray, kind, index):
            j = p - ray[0]
            if j == 0:
                return "E_0"
            return f"E_{{{index + 1},{j}}}"

        return label

    def label(ray, kind, index):
        return "E_1" if ray == (1, 1, 1, 1) else "E_2"

    return label


def family_dual_graph(spec: FamilySpec) -> DualGraph:
    """Assembled exceptional dual graph for a validated spec."""
    f = build_polynomial(spec)
    return assemble_dual_graph(family_fan(spec), f,
                               root_data=family_root_data(spec),
                               labeler=family_labeler(spec))


# ---------------------------------------------------------------------------
# hypothesis checks


def torus_orbit_violations(f: SparsePolynomial):
    """Coordinate torus orbits (of positive dimension) inside f = 0.

    The orbit with free variables J lies in the hypersurface exactly when
    f with the complementary variables set to zero is identically zero.
    Returns the violating index tuples; empty means the hypothesis that no
    such orbit lies in the hypersurface holds.
    """
    bad = []
    n = f.n_vars
    for size in range(1, n + 1):
        for free in itertools.combinations(range(n), size):
            rest = [i for i in range(n) if i not in free]
            if set_vars_zero(f, rest).is_zero():
                bad.append(free)
    return bad


def singular_isolation(spec: FamilySpec) -> str:
    """"verified" when the gradient is diagonal, else "assumed".

    With the Fermat defaults each partial derivative is a single monomial
    c * x_i^e with e >= 1, so the critical locus is exactly the origin and
    isolation is a theorem.  For general factor lists it is carried as a
    declared hypothesis of the family instead of being re-derived.
    """
    f = build_polynomial(spec)
    for i in range(4):
        d = partial_derivative(f, i)
        if len(d.terms) != 1:
            return "assumed"
        (e,) = d.terms
        if e[i] < 1 or any(e[j] != 0 for j in range(4) if j != i):
            return "assumed"
    return "verified"


def exponent_above_boundary(f: SparsePolynomial, e) -> bool:
    """Is e in the Newton polyhedron but on none of its compact faces?

    Adding a term c * x^e with such an exponent changes neither the
    polyhedron nor any face polynomial, so every check performed here is
    stable under that perturbation.
    """
    P = newton_polyhedron(f)
    e = tuple(int(c) for c in e)
    if len(e) != P.n:
        raise ValueError("exponent length does not match the variable count")
    if any(c < 0 for c in e):
        return False
    for normal, offset in P.facets:
        if dot(e, normal) < offset:
            return False
    return not any(_on_compact_face(face, e) for face in compact_faces(P))


# ---------------------------------------------------------------------------
# verification


@dataclass
class VerificationReport:
    """Outcome of re-deriving all resolution data for one spec.

    `discrepancies` is empty exactly when every boolean is true and the
    component count matches the closed form; anything else appends a
    human-readable reason.
    """

    fan_ok: bool
    g_subdivision_ok: bool
    star_ok: bool
    chart_maps: list
    component_count: Optional[int]
    expected_count: int
    dual_graph: Optional[DualGraph]
    discrepancies: list = field(default_factory=list)
    singular_isolation: str = "assumed"


def _orthant_fan(n: int) -> Fan:
    return Fan([Cone([tuple(int(k == i) for k in range(n))
                      for i in range(n)])], n)


def _chart_table(fine: Fan, f: SparsePolynomial):
    names = [f"y{i + 1}" for i in range(fine.ambient_rank)]
    table = []
    for cone in sorted(fine.maximal_cones, key=lambda c: c.rays):
        ch = chart(cone)
        st = strict_transform(f, ch)
        table.append({
            "rays": [list(r) for r in cone.rays],
            "map": [list(row) for row in ch.map_matrix],
            "exceptional_exponent": list(st.exceptional_exponent),
            "strict_transform": format_polynomial(st.equation, names),
        })
    return table


def verify(spec: FamilySpec) -> VerificationReport:
    """Re-derive and check every piece of the resolution for one spec."""
    f = build_polynomial(spec)
    coarse = newton_fan(f)
    fine = family_fan(spec)
    discrepancies = []

    fan_ok = True
    refines = is_subdivision(fine, coarse)
    if not refines:
        fan_ok = False
        discrepancies.append(
            "family fan is not a subdivision of the Newton fan")
    if spec.family is Family.ONE:
        std = {tuple(int(k == i) for k in range(4)) for i in range(4)}
        expected_rays = {(spec.p - j, spec.p - j, 1, 1)
                         for j in range(spec.p)}
        if fine.rays() - std != expected_rays:
            fan_ok = False
            discrepancies.append(
                "interior rays differ from (p-j, p-j, 1, 1), j = 0..p-1")
    else:
        sigma2 = stellar_subdivision(
            stellar_subdivision(_orthant_fan(4), (1, 1, 1, 1)), (2, 2, 2, 1))
        if fine != sigma2:
            fan_ok = False
            discrepancies.append(
                "family fan differs from the double stellar subdivision "
                "of the orthant at (1,1,1,1) then (2,2,2,1)")

    g_subdivision_ok = False
    star_ok = False
    if refines:
        sub = g_subdivision_check(fine, coarse, f=f)
        g_subdivision_ok = sub.g_regular
        star_ok = sub.admissible is True
        for cone, reason in sub.failures:
            discrepancies.append(
                f"{reason} (cone with rays {sorted(cone.rays)})")

    for free in torus_orbit_violations(f):
        names = ", ".join(f"x{i + 1}" for i in free)
        discrepancies.append(
            "hypersurface contains the coordinate torus orbit with free "
            f"variables {names}")

    chart_maps = _chart_table(fine, f)

    count = None
    graph = None
    try:
        graph = assemble_dual_graph(fine, f,
                                    root_data=family_root_data(spec),
                                    labeler=family_labeler(spec))
        count = len(graph.nodes)
    except UnsupportedStructureError as err:
        discrepancies.append(f"unsupported component structure: {err}")
    expected = expected_component_count(spec)
    if count is not None and count != expected:
        discrepancies.append(
            f"component count {count} != expected {expected}")

    return VerificationReport(
        fan_ok=fan_ok,
        g_subdivision_ok=g_subdivision_ok,
        star_ok=star_ok,
        chart_maps=chart_maps,
        component_count=count,
        expected_count=expected,
        dual_graph=graph,
        discrepancies=discrepancies,
        singular_isolation=singular_isolation(spec),
    )


def verification_report_json(spec: FamilySpec,
                             report: VerificationReport) -> dict:
    """JSON-ready form of a report; deterministic for a fixed spec.

    Built-in family components are essential divisors, so the dual graph
    is serialized with essentiality "essential".
    """
    graph = None
    if report.dual_graph is not None:
        graph = dual_graph_json(report.dual_graph, essentiality="essential")
    return {
        "report_version": 1,
        "family": spec.family.value,
        "p": spec.p,
        "q": spec.q,
        "polynomial": format_polynomial(build_polynomial(spec)),
        "fan_ok": report.fan_ok,
        "g_subdivision_ok": report.g_subdivision_ok,
        "star_ok": report.star_ok,
        "singular_isolation": report.singular_isolation,
        "charts": report.chart_maps,
        "component_count": report.component_count,
        "expected_count": report.expected_count,
        "dual_graph": graph,
        "discrepancies": list(report.discrepancies),
    }
