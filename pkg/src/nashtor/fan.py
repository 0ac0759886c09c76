"""Fans on the standard cone Delta: Newton fans, subdivision and regularity.

Fan validity (pairwise intersections are common faces) is certified by exact
LP separation: two cones of a fan meeting in the common face F admit a linear
functional vanishing on F, strictly positive on the remaining rays of one
cone and strictly negative on those of the other.  Feasibility of that system
is equivalent to the pair being properly glued, so the constructor check is
sound and complete, with no double-description step.

The subdivision test uses the wall criterion: inside each coarse cone, every
facet of every contained fine cone is either on the coarse boundary (then it
is shared by no other contained cone) or interior (then shared by exactly
one).  Together with fan validity this is equivalent to exact coverage.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Optional

from .lattice import (
    Cone,
    cone_facets,
    cone_from_generators,
    contains,
    dot,
    fraction_primitive,
    hilbert_basis,
    is_regular_cone,
    lp_feasible,
    matrix_rank,
    nullspace,
    primitive,
)
from .newton import newton_polyhedron
from .poly import SparsePolynomial


@functools.lru_cache(maxsize=None)
def _facet_data(cone: Cone):
    return tuple(cone_facets(cone))


@functools.lru_cache(maxsize=None)
def _h_normals(cone: Cone):
    """Inequality normals whose intersection (over >=0) is exactly the cone.

    Facet normals, plus +-w for a basis w of the orthogonal complement of the
    cone's span, so the description is exact in any dimension.
    """
    normals = [nrm for nrm, _ in _facet_data(cone)]
    for w in nullspace(cone.rays, cone.ambient_rank):
        pw = fraction_primitive(w)
        normals.append(pw)
        normals.append(tuple(-c for c in pw))
    return tuple(normals)


def _ray_in(cone: Cone, v) -> bool:
    return all(dot(u, v) >= 0 for u in _h_normals(cone))


def _separated(a: Cone, b: Cone) -> bool:
    """Do a and b intersect exactly in the common face on their shared rays?

    Searches for w with <w,r> = 0 on shared rays, >= 1 on the rest of a and
    <= -1 on the rest of b.  Such w exists iff the pair glues properly.
    """
    shared = set(a.rays) & set(b.rays)
    n = a.ambient_rank
    eqs = [(r, 0) for r in sorted(shared)]
    ges = [(r, 1) for r in a.rays if r not in shared]
    ges += [(tuple(-c for c in r), 1) for r in b.rays if r not in shared]
    return lp_feasible(n, eqs=eqs, ges=ges, nonneg=set()) is not None


class Fan:
    """Finite collection of maximal cones forming a fan.

    Construction validates: common ambient rank, no cone contained in
    another, and every pairwise intersection a common face (via the
    separation certificate).  Equality is as sets of cones.
    """

    __slots__ = ("ambient_rank", "maximal_cones")

    def __init__(self, maximal_cones, ambient_rank: Optional[int] = None):
        cones = list(maximal_cones)
        if not cones:
            if ambient_rank is None:
                raise ValueError("ambient_rank required for an empty fan")
        else:
            if ambient_rank is None:
                ambient_rank = cones[0].ambient_rank
        for c in cones:
            if not isinstance(c, Cone):
                raise TypeError("maximal_cones must be Cone instances")
            if c.ambient_rank != ambient_rank:
                raise ValueError("mixed ambient ranks in fan")
        for a, b in itertools.combinations(cones, 2):
            if _cone_contains_cone(a, b) or _cone_contains_cone(b, a):
                raise ValueError(
                    f"cone {a!r} and {b!r}: one contains the other "
                    "(not maximal)")
            if not _separated(a, b):
                raise ValueError(
                    f"cones {a!r} and {b!r} do not meet in a common face")
        self.ambient_rank = ambient_rank
        self.maximal_cones = tuple(cones)

    def rays(self) -> set:
        out = set()
        for c in self.maximal_cones:
            out.update(c.rays)
        return out

    def __eq__(self, other):
        return (isinstance(other, Fan)
                and self.ambient_rank == other.ambient_rank
                and set(self.maximal_cones) == set(other.maximal_cones))

    def __hash__(self):
        return hash((self.ambient_rank, frozenset(self.maximal_cones)))

    def __repr__(self):
        return (f"Fan(rank={self.ambient_rank}, "
                f"cones={len(self.maximal_cones)})")


# ---------------------------------------------------------------------------
# Newton fan


def _rays_from_normals(normals, n):
    """Generators of {x : <u,x> >= 0 for all u}, assuming the set is pointed.

    Extremal rays have n-1 independent active constraints, so they appear as
    sign-consistent nullspace vectors of (n-1)-subsets.
    """
    out = []
    for sub in itertools.combinations(range(len(normals)), n - 1):
        span = [normals[i] for i in sub]
        if matrix_rank(span) != n - 1:
            continue
        w = nullspace(span, n)
        if len(w) != 1:
            continue
        v = fraction_primitive(w[0])
        vals = [dot(u, v) for u in normals]
        if all(x >= 0 for x in vals):
            pass
        elif all(x <= 0 for x in vals):
            v = tuple(-c for c in v)
        else:
            continue
        if v not in out:
            out.append(v)
    return out


def newton_fan(f: SparsePolynomial) -> Fan:
    """The coarsest subdivision of Delta on which h_{Gamma(f)} is linear.

    One maximal cone per vertex v of the Newton polyhedron:
    C_v = {p in Delta : <v,p> = h(p)} = {p >= 0, <v'-v, p> >= 0 for all v'}.
    """
    P = newton_polyhedron(f)
    n = P.n
    cones = []
    for v in sorted(P.vertices):
        normals = [tuple(int(j == i) for j in range(n)) for i in range(n)]
        normals += [tuple(a - b for a, b in zip(w, v))
                    for w in sorted(P.vertices) if w != v]
        gens = sorted(_rays_from_normals(normals, n))
        cones.append(cone_from_generators(gens, n))
    return Fan(cones, n)


# ---------------------------------------------------------------------------
# subdivision relation


def _require_full_dim(F: Fan):
    for c in F.maximal_cones:
        if matrix_rank(c.rays) != F.ambient_rank:
            raise ValueError(
                "subdivision checks require full-dimensional maximal cones")


def _cone_contains_cone(outer: Cone, inner: Cone) -> bool:
    return all(_ray_in(outer, r) for r in inner.rays)


def is_subdivision(fine: Fan, coarse: Fan) -> bool:
    """Equal supports and every fine cone inside some coarse cone."""
    if fine.ambient_rank != coarse.ambient_rank:
        raise ValueError("ambient rank mismatch")
    _require_full_dim(fine)
    _require_full_dim(coarse)
    for tau in fine.maximal_cones:
        if not any(_cone_contains_cone(s, tau) for s in coarse.maximal_cones):
            return False
    for sigma in coarse.maximal_cones:
        members = [t for t in fine.maximal_cones
                   if _cone_contains_cone(sigma, t)]
        if not members:
            return False
        sigma_normals = [nrm for nrm, _ in _facet_data(sigma)]
        for tau in members:
            for _, wall_rays in _facet_data(tau):
                on_boundary = any(
                    all(dot(u, r) == 0 for r in wall_rays)
                    for u in sigma_normals)
                sharers = sum(
                    1 for t2 in members
                    if t2 is not tau
                    and all(_ray_in(t2, r) for r in wall_rays))
                if on_boundary:
                    if sharers != 0:
                        return False
                elif sharers != 1:
                    return False
    return True


# ---------------------------------------------------------------------------
# property (*) admissibility


def _is_face_of(ray_set: frozenset, cone: Cone) -> bool:
    """Is the cone generated by ray_set a face of the given cone?

    Requires ray_set to be (a subset of) the cone's extremal rays; the face
    test takes the active-facet closure and compares.
    """
    if not ray_set <= set(cone.rays):
        return False
    active = [nrm for nrm, _ in _facet_data(cone)
              if all(dot(nrm, r) == 0 for r in ray_set)]
    closure = {r for r in cone.rays
               if all(dot(u, r) == 0 for u in active)}
    return closure == set(ray_set)


def property_star_check(candidate: Fan, f: SparsePolynomial):
    """Admissibility of a subdivision of Delta for f.

    For every coordinate subset J whose face of Delta meets {h = 0} in its
    relative interior, that face must occur as a cone of the candidate fan.
    Since h vanishes at p in relint(face_J) exactly when some exponent of f
    has support disjoint from J, the trigger is purely combinatorial.

    Returns (ok, violations); each violation is (J, reason) with J a sorted
    tuple of 0-based coordinate indices.
    """
    if f.is_zero():
        raise ValueError("zero polynomial")
    n = candidate.ambient_rank
    if f.n_vars != n:
        raise ValueError("variable count does not match fan rank")
    supports = [frozenset(i for i, a in enumerate(e) if a > 0)
                for e in f.terms]
    violations = []
    for r in range(1, n + 1):
        for J in itertools.combinations(range(n), r):
            if not any(s.isdisjoint(J) for s in supports):
                continue
            face = frozenset(tuple(int(k == j) for k in range(n)) for j in J)
            if not any(_is_face_of(face, c) for c in candidate.maximal_cones):
                violations.append(
                    (J, "face of Delta on {h=0} is not a cone of the fan"))
    return not violations, violations


def is_regular_fan(F: Fan) -> bool:
    """All cones regular (faces of regular cones are regular)."""
    return all(is_regular_cone(c) for c in F.maximal_cones)


# ---------------------------------------------------------------------------
# G-subdivision report


@dataclass
class SubdivisionReport:
    refines: bool
    regular: bool
    admissible: Optional[bool]
    g_regular: bool
    failures: list


def g_subdivision_check(fine: Fan, coarse: Fan,
                        f: Optional[SparsePolynomial] = None
                        ) -> SubdivisionReport:
    """Is fine a G-regular subdivision of coarse?

    Checks, per maximal cone sigma of coarse: the rays of fine lying in
    sigma are exactly the Hilbert basis of sigma, and all fine cones inside
    sigma are regular.  When f is supplied, property (*) admissibility is
    evaluated as well and folded into the verdict; without f the admissible
    field stays None and the verdict covers the ray/regularity conditions.
    """
    if not is_subdivision(fine, coarse):
        raise ValueError("fine is not a subdivision of coarse")
    failures = []
    regular = True
    for tau in fine.maximal_cones:
        if not is_regular_cone(tau):
            regular = False
            failures.append((tau, "cone is not regular"))
    hilbert_ok = True
    fine_rays = fine.rays()
    for sigma in coarse.maximal_cones:
        inside = {r for r in fine_rays if _ray_in(sigma, r)}
        hb = hilbert_basis(sigma)
        if inside != hb:
            hilbert_ok = False
            missing = sorted(hb - inside)
            extra = sorted(inside - hb)
            failures.append(
                (sigma, "rays in cone differ from Hilbert basis: "
                 f"missing {missing}, extra {extra}"))
    admissible = None
    if f is not None:
        admissible, violations = property_star_check(fine, f)
        for J, reason in violations:
            failures.append(
                (Cone([tuple(int(k == j) for k in range(fine.ambient_rank))
                       for j in J]), reason))
    g_regular = regular and hilbert_ok and admissible is not False
    return SubdivisionReport(refines=True, regular=regular,
                             admissible=admissible, g_regular=g_regular,
                             failures=failures)


# ---------------------------------------------------------------------------
# stellar subdivision


def stellar_subdivision(F: Fan, u) -> Fan:
    """Subdivide every cone containing u by joining u to its far facets."""
    u = tuple(int(c) for c in u)
    if all(c == 0 for c in u):
        raise ValueError("stellar center must be nonzero")
    if primitive(u) != u:
        raise ValueError("stellar center must be primitive")
    if not any(_ray_in(c, u) for c in F.maximal_cones):
        raise ValueError("stellar center lies outside the fan's support")
    new_cones = []
    for c in F.maximal_cones:
        if not _ray_in(c, u):
            new_cones.append(c)
            continue
        if u in c.rays:
            new_cones.append(c)
            continue
        for _, facet_rays in _facet_data(c):
            facet = Cone(list(facet_rays), c.ambient_rank)
            if contains(facet, u):
                continue
            new_cones.append(Cone(list(facet_rays) + [u], c.ambient_rank))
    return Fan(new_cones, F.ambient_rank)


# ---------------------------------------------------------------------------
# the two built-in fans (ray orders are load-bearing: chart maps read them)


def _e(n, i):
    return tuple(int(j == i) for j in range(n))


def family1_fan(p: int, q: int) -> Fan:
    """Subdivision fan for the first family, 4p maximal cones.

    Rays rho_j = (p-j, p-j, 1, 1) for j = 0..p-1 plus the standard vectors.
    Ray orders are fixed so that each cone's chart map comes out in the
    reference form (columns of the map matrix are the rays in order).
    """
    if p < 2 or q < 2:
        raise ValueError("family 1 requires p >= 2 and q >= 2")
    n = 4
    e1, e2, e3, e4 = (_e(n, i) for i in range(4))
    rho = [(p - j, p - j, 1, 1) for j in range(p)]
    cones = []
    for j in range(1, p):
        for u in (e3, e4):
            cones.append(Cone([e2, rho[j - 1], rho[j], u]))
            cones.append(Cone([e1, rho[j - 1], rho[j], u]))
    cones.append(Cone([e2, e3, e4, rho[p - 1]]))
    cones.append(Cone([e1, e3, e4, rho[p - 1]]))
    cones.append(Cone([rho[0], e1, e2, e4]))
    cones.append(Cone([rho[0], e1, e2, e3]))
    return Fan(cones, n)


def family2_fan(q: int) -> Fan:
    """Subdivision fan for the second family: 7 maximal cones.

    Equals the double stellar subdivision of Delta at (1,1,1,1) then
    (2,2,2,1), with chart-determining ray orders fixed by hand.
    """
    if q < 3:
        raise ValueError("family 2 requires q >= 3")
    n = 4
    es = [_e(n, i) for i in range(4)]
    rho0 = (2, 2, 2, 1)
    rho1 = (1, 1, 1, 1)
    cones = []
    for j in range(3):
        rest = [es[i] for i in range(3) if i != j]
        cones.append(Cone([rho0] + rest + [rho1]))
    for j in range(3):
        rest = [es[i] for i in range(4) if i != j]
        cones.append(Cone([rho1] + rest))
    cones.append(Cone([rho0, es[0], es[1], es[2]]))
    return Fan(cones, n)


# ---------------------------------------------------------------------------
# serialization


def fan_json(F: Fan) -> dict:
    return {
        "rank": F.ambient_rank,
        "cones": [{"rays": [list(r) for r in c.rays]}
                  for c in F.maximal_cones],
    }


def fan_dot(F: Fan) -> str:
    """Ray-adjacency graph: an edge when two rays share a maximal cone."""
    rays = sorted(F.rays())
    index = {r: i for i, r in enumerate(rays)}
    edges = set()
    for c in F.maximal_cones:
        for a, b in itertools.combinations(sorted(c.rays), 2):
            edges.add((index[a], index[b]))
    lines = ["graph fan {"]
    for i, r in enumerate(rays):
        label = "(" + ",".join(str(c) for c in r) + ")"
        lines.append(f'  r{i} [label="{label}"];')
    for a, b in sorted(edges):
        lines.append(f"  r{a} -- r{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"
