"""Toric charts, strict transforms, and exceptional dual graphs.

A regular full-dimensional cone with ordered rays defines a monomial chart
map x_k = prod_i y_i^{(rho_i)_k}.  Pulling a hypersurface back and stripping
the exceptional monomial gives the strict transform; restricting it to the
hyperplane of an interior (non-coordinate) ray enumerates the exceptional
components over that ray.

Irreducibility is never guessed: restrictions are matched against four
structural shapes, each proved irreducible over any field of characteristic
zero under the stated hypotheses:

  1. univariate u            -> one component per distinct root;
  2. u(a) + y_b^c * v(d)     -> irreducible for u nonconstant squarefree
                                univariate, v a univariate squarefree
                                nonconstant polynomial (in a third variable)
                                or a nonzero constant, c >= 1
                                (Capelli's theorem + Gauss's lemma);
  3. u(a) + w(b, c)          -> irreducible for u nonconstant squarefree
                                univariate and w of total degree n >= 1 with
                                w(y_b, 0) = c0*y_b^n, w(0, y_c) = c1*y_c^n,
                                c0*c1 != 0 (specialize y_c = 0: shape 2 with
                                constant v; total degree is preserved, so a
                                factorization would survive);
  4. w(b, c) + const         -> irreducible for w squarefree homogeneous
                                bivariate and const != 0 (the projective
                                closure is a smooth plane curve).

Everything else yields the UNSUPPORTED sentinel.

Components over the roots of a restriction are tracked by abstract root
index of a declared canonical polynomial c~, never numerically.  Each chart
must present the root coordinate with character +-m_s (m_s the declared
canonical character); after making the restriction monic — reversing the
coefficients when the character is negated — it must equal c~ exactly.
Edges involving roots are emitted only in relabeling-invariant patterns
(all roots, or index-diagonal), so the graph does not depend on how the
abstract roots are enumerated.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .fan import Fan
from .lattice import Cone, dot, dual_basis
from .poly import (
    SparsePolynomial,
    _univariate_data,
    distinct_root_count,
    format_polynomial,
    set_vars_zero,
    squarefree_part,
)


class _UnsupportedType:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNSUPPORTED"

    def __bool__(self):
        return False


UNSUPPORTED = _UnsupportedType()


class UnsupportedStructureError(ValueError):
    """A restriction did not match any proved irreducibility shape."""

    def __init__(self, message, chart=None):
        super().__init__(message)
        self.chart = chart


# ---------------------------------------------------------------------------
# charts and transforms


@dataclass(frozen=True)
class ToricChart:
    """Monomial chart of a regular full-dimensional cone with ordered rays.

    map_matrix[k][i] = (rho_i)_k, so column i is ray i and the chart map is
    x_k = prod_i y_i^{map_matrix[k][i]}.
    """

    cone: Cone
    map_matrix: tuple


def chart(c: Cone) -> ToricChart:
    dual_basis(c)  # raises on non-regular or lower-dimensional cones
    n = c.ambient_rank
    matrix = tuple(tuple(c.rays[i][k] for i in range(len(c.rays)))
                   for k in range(n))
    return ToricChart(cone=c, map_matrix=matrix)


def pullback(f: SparsePolynomial, ch: ToricChart) -> SparsePolynomial:
    """Substitute x_k = prod_i y_i^{(rho_i)_k}: exponent e becomes
    (<e, rho_1>, ..., <e, rho_n>)."""
    n = ch.cone.ambient_rank
    if f.n_vars != n:
        raise ValueError("variable count does not match chart rank")
    terms = {}
    for e, coeff in f.terms.items():
        new_e = tuple(dot(e, ray) for ray in ch.cone.rays)
        terms[new_e] = terms.get(new_e, 0) + coeff
    return SparsePolynomial(n, terms)


@dataclass(frozen=True)
class StrictTransform:
    """Pullback with the exceptional monomial y^a factored out."""

    chart: ToricChart
    exceptional_exponent: tuple
    equation: SparsePolynomial

    def __post_init__(self):
        if any(a < 0 for a in self.exceptional_exponent):
            raise ValueError("exceptional exponent must be nonnegative")
        if not self.equation.is_zero():
            mins = [min(e[i] for e in self.equation.terms)
                    for i in range(self.equation.n_vars)]
            if any(m != 0 for m in mins):
                raise ValueError(
                    "a chart variable divides the strict transform equation")


def strict_transform(f: SparsePolynomial, ch: ToricChart) -> StrictTransform:
    pb = pullback(f, ch)
    if pb.is_zero():
        raise ValueError("zero polynomial has no strict transform")
    n = pb.n_vars
    mins = tuple(min(e[i] for e in pb.terms) for i in range(n))
    shifted = {tuple(a - b for a, b in zip(e, mins)): c
               for e, c in pb.terms.items()}
    return StrictTransform(chart=ch, exceptional_exponent=mins,
                           equation=SparsePolynomial(n, shifted))


def arc_pushforward_orders(ch: ToricChart, r) -> tuple:
    """t-order vector of the composed arc: mu_k = sum_i r_i (rho_i)_k."""
    rays = ch.cone.rays
    if len(r) != len(rays):
        raise ValueError("order vector length must match the chart rank")
    if any(x < 0 for x in r):
        raise ValueError("chart orders must be nonnegative")
    n = ch.cone.ambient_rank
    return tuple(sum(r[i] * rays[i][k] for i in range(len(rays)))
                 for k in range(n))


# ---------------------------------------------------------------------------
# restriction classifier


def _is_std_basis(v) -> bool:
    return sum(v) == 1 and all(c in (0, 1) for c in v)


def _monomial_content(g: SparsePolynomial):
    mins = tuple(min(e[i] for e in g.terms) for i in range(g.n_vars))
    core = SparsePolynomial(
        g.n_vars,
        {tuple(a - b for a, b in zip(e, mins)): c for e, c in g.terms.items()})
    return mins, core


def _dense_coeffs(u: SparsePolynomial):
    var, coeffs = _univariate_data(u)
    return var, coeffs


def _monic(coeffs):
    lead = coeffs[-1]
    return tuple(Fraction(c) / lead for c in coeffs)


def _canonical_root_match(core, var, ch, root_data) -> bool:
    """Does the univariate restriction agree with the canonical polynomial?

    The chart character of the root variable must be the canonical character
    or its negative; in the negated case the coefficients are reversed
    (roots map to their inverses) before comparing.
    """
    if root_data is None:
        return False
    m_s, canonical = root_data
    u_var, coeffs = _dense_coeffs(core)
    if u_var != var:
        return False
    row = dual_basis(ch.cone)[var]
    if tuple(row) == tuple(m_s):
        oriented = coeffs
    elif tuple(row) == tuple(-c for c in m_s):
        oriented = list(reversed(coeffs))
        if oriented[-1] == 0:
            return False
    else:
        return False
    return _monic(oriented) == tuple(canonical)


def _univariate_squarefree(u: SparsePolynomial) -> bool:
    _, is_sf = squarefree_part(u)
    return is_sf


def _bivariate_homogeneous_squarefree(w: SparsePolynomial) -> bool:
    """Squarefree test for a homogeneous polynomial in two used variables.

    Split off the coordinate factors y^alpha (squarefree iff alpha <= 1),
    then dehomogenize the corner-free cofactor: it is squarefree iff its
    one-variable image is, with no degree loss.
    """
    mins, core = _monomial_content(w)
    if any(a > 1 for a in mins):
        return False
    used = sorted(core.used_variables())
    if not used:
        return True
    if len(used) == 1:
        return core.total_degree() <= 1
    b, c = used
    n = core.n_vars
    dehom = set_vars_zero(
        SparsePolynomial(
            n, {tuple(e[i] if i != c else 0 for i in range(n)): coeff
                for e, coeff in core.terms.items()}),
        [])
    # degree in y_b is full because the y_b^deg corner coefficient survives
    return _univariate_squarefree(dehom)


def _rule_univariate(core):
    used = core.used_variables()
    if len(used) != 1:
        return None
    var = next(iter(used))
    return ("roots", var)


def _rule_binomial_shift(core):
    """u(y_a) + y_b^c * v: Capelli + Gauss shape."""
    used = sorted(core.used_variables())
    if len(used) not in (2, 3):
        return None
    for a in used:
        u_terms = {e: c for e, c in core.terms.items()
                   if all(e[i] == 0 for i in range(core.n_vars) if i != a)}
        u = SparsePolynomial(core.n_vars, dict(u_terms))
        rest = core - u
        if u.is_zero() or rest.is_zero():
            continue
        if len(u.used_variables()) != 1 or not _univariate_squarefree(u):
            continue
        for b in used:
            if b == a:
                continue
            exps_b = [e[b] for e in rest.terms]
            c_min = min(exps_b)
            if c_min < 1:
                continue
            v = SparsePolynomial(
                core.n_vars,
                {tuple(e[i] - (c_min if i == b else 0)
                       for i in range(core.n_vars)): coeff
                 for e, coeff in rest.terms.items()})
            v_used = v.used_variables()
            if b in v_used or a in v_used or len(v_used) > 1:
                continue
            if v_used and not _univariate_squarefree(v):
                continue
            return ("single",)
    return None


def _rule_corner_sum(core):
    """u(y_a) + w(y_b, y_c) with pure-power corner restrictions."""
    used = sorted(core.used_variables())
    if len(used) != 3:
        return None
    for a in used:
        u_terms = {e: c for e, c in core.terms.items()
                   if all(e[i] == 0 for i in range(core.n_vars) if i != a)}
        u = SparsePolynomial(core.n_vars, dict(u_terms))
        if u.is_zero() or len(u.used_variables()) != 1:
            continue
        if not _univariate_squarefree(u):
            continue
        w = core - u
        if w.is_zero():
            continue
        b, c = [x for x in used if x != a]
        if w.used_variables() != {b, c}:
            continue
        n_w = w.total_degree()
        if n_w < 1:
            continue
        corner_b = set_vars_zero(w, [c])
        corner_c = set_vars_zero(w, [b])
        for corner, var in ((corner_b, b), (corner_c, c)):
            if len(corner.terms) != 1:
                break
            (e,) = corner.terms
            if e[var] != n_w:
                break
        else:
            return ("single",)
    return None


def _rule_smooth_plane_curve(core):
    """w(y_b, y_c) + const with w squarefree homogeneous."""
    used = sorted(core.used_variables())
    if len(used) != 2:
        return None
    const = core.constant_coefficient()
    if const == 0:
        return None
    w = core - const
    if w.is_zero() or not w.is_homogeneous():
        return None
    if w.used_variables() != set(used):
        return None
    if not _bivariate_homogeneous_squarefree(w):
        return None
    return ("single",)


@dataclass(frozen=True)
class _RayAnalysis:
    kind: str                      # "single" or "roots"
    count: int
    root_var: Optional[int] = None
    reversed_orientation: Optional[bool] = None


def _classify_restriction(restriction, ch, root_data):
    _, core = _monomial_content(restriction)
    if not core.used_variables():
        return UNSUPPORTED
    hit = _rule_univariate(core)
    if hit is not None:
        _, var = hit
        if not _canonical_root_match(core, var, ch, root_data):
            return UNSUPPORTED
        row = dual_basis(ch.cone)[var]
        rev = tuple(row) != tuple(root_data[0])
        return _RayAnalysis(kind="roots", count=distinct_root_count(core),
                            root_var=var, reversed_orientation=rev)
    if core == restriction:  # the proved shapes assume no monomial cofactor
        for rule in (_rule_binomial_shift, _rule_corner_sum,
                     _rule_smooth_plane_curve):
            if rule(core) is not None:
                return _RayAnalysis(kind="single", count=1)
    return UNSUPPORTED


# ---------------------------------------------------------------------------
# components


@dataclass(frozen=True)
class ComponentDescriptor:
    ray: tuple
    root_index: Optional[int]      # None when the divisor slice is a single
                                   # irreducible component


def divisor_components(st: StrictTransform, chart_var: int,
                       root_data=None):
    """Components of the exceptional divisor slice {y_chart_var = 0}.

    Returns a list of descriptors, or the UNSUPPORTED sentinel when the
    restriction matches none of the proved structural shapes.
    """
    rays = st.chart.cone.rays
    ray = rays[chart_var]
    if _is_std_basis(ray):
        raise ValueError(
            "chart variable corresponds to a coordinate divisor, "
            "not an exceptional one")
    restriction = set_vars_zero(st.equation, [chart_var])
    if restriction.is_zero():
        raise ValueError(
            "restriction is identically zero: the divisor lies inside the "
            "hypersurface, contradicting the strict transform invariant")
    analysis = _classify_restriction(restriction, st.chart, root_data)
    if analysis is UNSUPPORTED:
        return UNSUPPORTED
    if analysis.kind == "roots":
        return [ComponentDescriptor(ray=ray, root_index=i)
                for i in range(analysis.count)]
    return [ComponentDescriptor(ray=ray, root_index=None)]


# ---------------------------------------------------------------------------
# dual graph


@dataclass(frozen=True)
class ExceptionalComponent:
    ray: tuple
    index: int
    label: str
    witness_chart: ToricChart


@dataclass(frozen=True)
class DualGraph:
    nodes: tuple
    edges: frozenset              # frozensets of two (ray, index) keys


def _default_labeler(ray, kind, index):
    name = "(" + ",".join(str(c) for c in ray) + ")"
    if kind == "roots":
        return f"E{name}[{index}]"
    return f"E{name}"


def _edge_keys_for_pair(st, k1, a1, k2, a2, root_data, chart_label):
    """Edges contributed by a chart containing two interior rays.

    The joint restriction (both chart variables set to zero) decides which
    component pairs meet; only relabeling-invariant patterns are allowed.
    """
    ray1, ray2 = st.chart.cone.rays[k1], st.chart.cone.rays[k2]
    joint = set_vars_zero(st.equation, [k1, k2])
    if joint.is_zero():
        raise UnsupportedStructureError(
            f"joint restriction vanishes identically in chart {chart_label}",
            chart=st.chart)
    _, core = _monomial_content(joint)
    kinds = {a1.kind, a2.kind}
    edges = set()
    if kinds == {"single"}:
        if core.used_variables():
            edges.add(frozenset({(ray1, 0), (ray2, 0)}))
        return edges
    if not core.used_variables():
        return edges  # joint locus misses the torus: no intersection curve
    roots_side = a1 if a1.kind == "roots" else a2
    if not _canonical_root_match(core, roots_side.root_var, st.chart,
                                 root_data):
        raise UnsupportedStructureError(
            f"joint restriction in chart {chart_label} does not reproduce "
            "the canonical root polynomial", chart=st.chart)
    if kinds == {"single", "roots"}:
        single_ray = ray1 if a1.kind == "single" else ray2
        root_ray = ray2 if a1.kind == "single" else ray1
        for i in range(roots_side.count):
            edges.add(frozenset({(single_ray, 0), (root_ray, i)}))
        return edges
    # roots -- roots: require one shared root coordinate and orientation so
    # that the index-diagonal matching is independent of root enumeration
    if (a1.root_var != a2.root_var
            or a1.reversed_orientation != a2.reversed_orientation
            or a1.count != a2.count):
        raise UnsupportedStructureError(
            f"root coordinates disagree between the two rays in chart "
            f"{chart_label}", chart=st.chart)
    for i in range(a1.count):
        edges.add(frozenset({(ray1, i), (ray2, i)}))
    return edges


def _worker_count() -> int:
    raw = os.environ.get("NASHTOR_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"NASHTOR_THREADS must be an integer, got {raw!r}")
    return max(1, value)


def _analyze_chart(args):
    f, cone, root_data = args
    ch = chart(cone)
    st = strict_transform(f, ch)
    interior = [k for k, ray in enumerate(cone.rays)
                if not _is_std_basis(ray)]
    analyses = {}
    for k in interior:
        restriction = set_vars_zero(st.equation, [k])
        if restriction.is_zero():
            raise UnsupportedStructureError(
                f"restriction identically zero in chart {cone.rays}",
                chart=ch)
        analysis = _classify_restriction(restriction, ch, root_data)
        if analysis is UNSUPPORTED:
            raise UnsupportedStructureError(
                "unsupported component structure in chart "
                f"{cone.rays} at variable {k}: "
                f"{format_polynomial(restriction)}", chart=ch)
        analyses[k] = analysis
    edges = set()
    for k1, k2 in itertools.combinations(interior, 2):
        edges |= _edge_keys_for_pair(st, k1, analyses[k1], k2, analyses[k2],
                                     root_data, str(cone.rays))
    return ch, st, analyses, edges


def assemble_dual_graph(fan: Fan, f: SparsePolynomial, root_data=None,
                        labeler=None) -> DualGraph:
    """Glue per-chart component data into the exceptional dual graph.

    Components are keyed (ray, index); a component seen in several charts
    becomes one node.  Chart analyses are independent and run on a thread
    pool when NASHTOR_THREADS > 1; the reduction is a deterministic sorted
    merge, so the result does not depend on scheduling or chart order.
    """
    if labeler is None:
        labeler = _default_labeler
    work = [(f, cone, root_data) for cone in fan.maximal_cones]
    threads = _worker_count()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_analyze_chart, work))
    else:
        results = [_analyze_chart(w) for w in work]

    ray_kind = {}
    witness = {}
    all_edges = set()
    for ch, _, analyses, edges in results:
        for k, analysis in analyses.items():
            ray = ch.cone.rays[k]
            key = (analysis.kind, analysis.count)
            if ray_kind.setdefault(ray, key) != key:
                raise UnsupportedStructureError(
                    f"inconsistent component structure for ray {ray} "
                    "across charts")
            if ray not in witness:
                witness[ray] = ch
        all_edges |= edges
    for edge in all_edges:
        for ray, index in edge:
            kind, count = ray_kind[ray]
            assert 0 <= index < count, (ray, index)

    nodes = []
    for ray in sorted(ray_kind):
        kind, count = ray_kind[ray]
        for index in range(count):
            nodes.append(ExceptionalComponent(
                ray=ray, index=index,
                label=labeler(ray, kind, index),
                witness_chart=witness[ray]))
    return DualGraph(nodes=tuple(nodes), edges=frozenset(all_edges))


def component_count(family: int, p: Optional[int] = None,
                    q: Optional[int] = None) -> int:
    """Node count of the assembled dual graph for a built-in family."""
    from . import families

    if family == 1:
        spec = families.family1_spec(p, q)
    elif family == 2:
        if p is not None:
            raise ValueError("family 2 takes only q")
        spec = families.family2_spec(q)
    else:
        raise ValueError("family must be 1 or 2")
    graph = families.family_dual_graph(spec)
    return len(graph.nodes)


# ---------------------------------------------------------------------------
# serialization


def _node_sort_key(node):
    return (node.ray, node.index)


def dual_graph_json(g: DualGraph, essentiality="undecided") -> dict:
    label_of = {(n.ray, n.index): n.label for n in g.nodes}
    edges = sorted(
        sorted([label_of[k] for k in edge]) for edge in g.edges)
    return {
        "nodes": [
            {
                "ray": list(n.ray),
                "index": n.index,
                "label": n.label,
                "essentiality": essentiality,
            }
            for n in sorted(g.nodes, key=_node_sort_key)
        ],
        "edges": edges,
    }


def dual_graph_dot(g: DualGraph) -> str:
    nodes = sorted(g.nodes, key=_node_sort_key)
    name = {(n.ray, n.index): f"n{i}" for i, n in enumerate(nodes)}
    lines = ["graph exceptional_fiber {"]
    for n in nodes:
        lines.append(f'  {name[(n.ray, n.index)]} [label="{n.label}"];')
    for a, b in sorted(sorted(name[k] for k in edge) for edge in g.edges):
        lines.append(f"  {a} -- {b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def resolution_report(fan: Fan, f: SparsePolynomial, root_data=None,
                      labeler=None, essentiality="undecided") -> dict:
    """JSON-ready description of the whole resolution: charts, maps,
    strict transforms, component table, counts."""
    graph = assemble_dual_graph(fan, f, root_data=root_data, labeler=labeler)
    charts = []
    for cone in sorted(fan.maximal_cones, key=lambda c: c.rays):
        ch = chart(cone)
        st = strict_transform(f, ch)
        charts.append({
            "rays": [list(r) for r in cone.rays],
            "map": [list(row) for row in ch.map_matrix],
            "exceptional_exponent": list(st.exceptional_exponent),
            "strict_transform": format_polynomial(
                st.equation,
                [f"y{i+1}" for i in range(cone.ambient_rank)]),
        })
    data = dual_graph_json(graph, essentiality=essentiality)
    return {
        "charts": charts,
        "components": data["nodes"],
        "edges": data["edges"],
        "counts": {
            "components": len(graph.nodes),
            "edges": len(graph.edges),
        },
    }
