"""Exact integer/rational linear algebra on lattice vectors and pointed cones.

Everything works over Z and Q (``fractions.Fraction``); no floats anywhere.
The geometric objects are strongly convex rational polyhedral cones in
N = Z^n, described by their extremal primitive ray generators -- the shape in
which fan, chart and Hilbert-basis data is consumed downstream.

Two independent membership routes are kept on purpose: Gaussian elimination on
simplicial ray sets and exact phase-1 simplex (Bland's rule) for the general
case.  The tests cross-check them against each other.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, NamedTuple, Optional, Sequence


Vector = tuple  # integer or Fraction entries, fixed length


def _as_int_vector(v) -> tuple:
    out = []
    for c in v:
        ic = int(c)
        if ic != c:
            raise ValueError(f"non-integer coordinate {c!r}")
        out.append(ic)
    return tuple(out)


def dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def primitive(v: Sequence[int]) -> tuple:
    """Divide an integer vector by the gcd of its coordinates.

    The zero vector has no primitive representative.
    """
    v = _as_int_vector(v)
    g = 0
    for c in v:
        g = gcd(g, c)
    if g == 0:
        raise ValueError("zero vector is not primitivizable")
    return tuple(c // g for c in v)


def fraction_primitive(v: Sequence[Fraction]) -> tuple:
    """Primitive integer vector on the ray spanned by a rational vector."""
    den = 1
    for c in v:
        den = lcm(den, Fraction(c).denominator)
    ints = [int(Fraction(c) * den) for c in v]
    return primitive(ints)


# ---------------------------------------------------------------------------
# dense rational elimination helpers


def matrix_rank(rows: Sequence[Sequence]) -> int:
    A = [[Fraction(x) for x in row] for row in rows]
    if not A:
        return 0
    ncols = len(A[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = A[r][c]
        A[r] = [x / inv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        r += 1
        if r == len(A):
            break
    return r


def solve_independent_columns(cols: Sequence[Sequence], target: Sequence):
    """Solve ``sum_i lam_i * cols[i] = target`` for linearly independent cols.

    Returns the unique list of Fractions, or None when target is outside the
    column span.
    """
    k = len(cols)
    if k == 0:
        return [] if all(Fraction(t) == 0 for t in target) else None
    dim = len(cols[0])
    A = [[Fraction(cols[j][i]) for j in range(k)] + [Fraction(target[i])]
         for i in range(dim)]
    piv_rows = []
    r = 0
    for c in range(k):
        piv = next((i for i in range(r, dim) if A[i][c] != 0), None)
        if piv is None:
            raise ValueError("columns are not linearly independent")
        A[r], A[piv] = A[piv], A[r]
        inv = A[r][c]
        A[r] = [x / inv for x in A[r]]
        for i in range(dim):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        piv_rows.append(r)
        r += 1
    # rows past the pivots must have vanished entirely, else inconsistent
    for i in range(r, dim):
        if A[i][k] != 0:
            return None
    return [A[i][k] for i in range(k)]


def nullspace(rows: Sequence[Sequence], dim: int) -> list:
    """Basis of {x : <row, x> = 0 for all rows}, as Fraction vectors."""
    A = [[Fraction(x) for x in row] for row in rows]
    piv_cols = []
    r = 0
    for c in range(dim):
        piv = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = A[r][c]
        A[r] = [x / inv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        piv_cols.append(c)
        r += 1
        if r == len(A):
            break
    basis = []
    for free in range(dim):
        if free in piv_cols:
            continue
        x = [Fraction(0)] * dim
        x[free] = Fraction(1)
        for i, pc in enumerate(piv_cols):
            x[pc] = -A[i][free]
        basis.append(x)
    return basis


def invert_matrix(rows: Sequence[Sequence]) -> list:
    """Exact inverse of a square matrix given by rows."""
    n = len(rows)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(rows)]
    for c in range(n):
        piv = next((i for i in range(c, n) if A[i][c] != 0), None)
        if piv is None:
            raise ValueError("matrix is singular")
        A[c], A[piv] = A[piv], A[c]
        inv = A[c][c]
        A[c] = [x / inv for x in A[c]]
        for i in range(n):
            if i != c and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return [row[n:] for row in A]


# ---------------------------------------------------------------------------
# exact LP feasibility (phase-1 simplex, Bland's rule)


def _feasible_standard(rows, rhs):
    """Find x >= 0 with A x = b exactly, or return None.

    Textbook phase-1: one artificial variable per row, minimize their sum with
    Bland's pivoting rule (anti-cycling), everything in Fractions.
    """
    m = len(rows)
    if m == 0:
        return []
    n = len(rows[0])
    T = []
    for i in range(m):
        r = [Fraction(c) for c in rows[i]]
        b = Fraction(rhs[i])
        if b < 0:
            r = [-c for c in r]
            b = -b
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        T.append(r + art + [b])
    total = n + m
    basis = list(range(n, n + m))
    # reduced-cost row for w = sum of artificials, priced out over the
    # initial (artificial) basis: zero on basic columns, -(column sums)
    # elsewhere, and -(w) in the rhs slot.
    zeta = [Fraction(0)] * (total + 1)
    for j in range(n):
        zeta[j] = -sum(T[i][j] for i in range(m))
    zeta[total] = -sum(T[i][total] for i in range(m))
    while True:
        # Bland's rule; artificial columns never re-enter (safe: a zero-cost
        # point of the full problem keeps them at zero anyway).
        enter = next((j for j in range(n) if zeta[j] < 0), None)
        if enter is None:
            break
        leave = None
        best = None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][total] / a
                if best is None or ratio < best or \
                        (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave is None:  # phase-1 objective is bounded below by 0
            raise AssertionError("unbounded phase-1 column")
        piv = T[leave][enter]
        T[leave] = [c / piv for c in T[leave]]
        for i in range(m):
            if i != leave and T[i][enter] != 0:
                f = T[i][enter]
                T[i] = [c - f * d for c, d in zip(T[i], T[leave])]
        if zeta[enter] != 0:
            f = zeta[enter]
            zeta = [c - f * d for c, d in zip(zeta, T[leave])]
        basis[leave] = enter
    if zeta[total] != 0:
        return None
    x = [Fraction(0)] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = T[i][total]
    # cheap self-check; catching a pivoting bug here beats debugging a fan
    for row, b in zip(rows, rhs):
        if dot(row, x) != Fraction(b):
            raise AssertionError("simplex produced a non-solution")
    return x


def lp_feasible(num_vars: int, eqs=(), ges=(), nonneg: Optional[set] = None):
    """Feasibility of a mixed system over variables x_0..x_{num_vars-1}.

    eqs / ges: iterables of (coeff_row, rhs) meaning <row,x> = rhs resp.
    <row,x> >= rhs.  ``nonneg`` is the set of indices constrained to be >= 0
    (default: all of them); the rest are free.  Returns a Fraction solution
    or None.
    """
    if nonneg is None:
        nonneg = set(range(num_vars))
    cols = []          # (var_index, sign) per standard-form column
    for i in range(num_vars):
        cols.append((i, 1))
        if i not in nonneg:
            cols.append((i, -1))
    eqs = list(eqs)
    ges = list(ges)
    nrows = len(eqs) + len(ges)
    rows, rhs = [], []
    for k, (coeffs, b) in enumerate(eqs + ges):
        row = [sign * Fraction(coeffs[i]) for i, sign in cols]
        row.extend(Fraction(0) for _ in ges)
        if k >= len(eqs):  # slack turns >= into =
            row[len(cols) + (k - len(eqs))] = Fraction(-1)
        rows.append(row)
        rhs.append(Fraction(b))
    sol = _feasible_standard(rows, rhs)
    if sol is None:
        return None
    x = [Fraction(0)] * num_vars
    for val, (i, sign) in zip(sol, cols):
        x[i] += sign * val
    return x


# ---------------------------------------------------------------------------
# Smith normal form


class SnfResult(NamedTuple):
    diag: tuple
    rank: int


def smith_normal_form(matrix: Sequence[Sequence[int]]) -> SnfResult:
    """Elementary divisors of an integer matrix.

    Row/column reduction with a smallest-pivot strategy, then a gcd/lcm bubble
    pass to enforce d_i | d_{i+1}.  diag has min(m, n) entries, zeros trailing;
    rank counts the nonzero ones.
    """
    A = [[int(x) for x in row] for row in matrix]
    m = len(A)
    n = len(A[0]) if m else 0
    size = min(m, n)
    t = 0
    while t < size:
        piv = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] != 0 and (piv is None or
                                     abs(A[i][j]) < abs(A[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        pi, pj = piv
        A[t], A[pi] = A[pi], A[t]
        for row in A:
            row[t], row[pj] = row[pj], row[t]
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
        p = A[t][t]
        dirty = False
        for i in range(t + 1, m):
            q, r = divmod(A[i][t], p)
            if q:
                A[i] = [a - q * b for a, b in zip(A[i], A[t])]
            if r:
                dirty = True
        for j in range(t + 1, n):
            q, r = divmod(A[t][j], p)
            if q:
                for row in A:
                    row[j] -= q * row[t]
            if r:
                dirty = True
        if dirty:
            continue  # remainders < p appeared; re-pick a smaller pivot
        t += 1
    diag = [abs(A[i][i]) for i in range(size)]
    # bubble divisibility (products of the k smallest stay invariant)
    changed = True
    while changed:
        changed = False
        for i in range(len(diag) - 1):
            a, b = diag[i], diag[i + 1]
            if a == 0 and b != 0:
                diag[i], diag[i + 1] = b, a
                changed = True
            elif a != 0 and b % a != 0:
                g = gcd(a, b)
                diag[i], diag[i + 1] = g, a * b // g
                changed = True
    rank = sum(1 for d in diag if d != 0)
    return SnfResult(tuple(diag), rank)


# ---------------------------------------------------------------------------
# cones


class Cone:
    """Strongly convex rational polyhedral cone, by extremal primitive rays.

    Construction validates the full invariant set and raises ValueError on
    anything off: non-primitive or duplicate rays, a ray inside the cone of
    the others (redundant generators are rejected, not silently dropped), or
    a non-pointed ray configuration.  Ray order is preserved -- chart maps
    depend on it -- but equality and hashing are geometric (ray sets).
    """

    __slots__ = ("ambient_rank", "rays")

    def __init__(self, rays: Iterable[Sequence[int]],
                 ambient_rank: Optional[int] = None):
        rays = tuple(_as_int_vector(r) for r in rays)
        if ambient_rank is None:
            if not rays:
                raise ValueError("ambient_rank required for the zero cone")
            ambient_rank = len(rays[0])
        if ambient_rank < 1:
            raise ValueError("ambient rank must be >= 1")
        for r in rays:
            if len(r) != ambient_rank:
                raise ValueError(f"ray {r} has wrong length")
            if all(c == 0 for c in r):
                raise ValueError("zero vector cannot be a ray")
            if primitive(r) != r:
                raise ValueError(f"ray {r} is not primitive")
        if len(set(rays)) != len(rays):
            raise ValueError("rays must be pairwise distinct")
        if rays and not _pointed(rays, ambient_rank):
            raise ValueError("cone is not strongly convex")
        for j, r in enumerate(rays):
            rest = rays[:j] + rays[j + 1:]
            if rest and _in_cone_of(rest, r):
                raise ValueError(f"redundant generator {r}")
        self.ambient_rank = ambient_rank
        self.rays = rays

    def __eq__(self, other):
        return (isinstance(other, Cone)
                and self.ambient_rank == other.ambient_rank
                and frozenset(self.rays) == frozenset(other.rays))

    def __hash__(self):
        return hash((self.ambient_rank, frozenset(self.rays)))

    def __repr__(self):
        return f"Cone({list(self.rays)!r})"

    def dim(self) -> int:
        return matrix_rank(self.rays)

    def is_simplicial(self) -> bool:
        return len(self.rays) == self.dim()


def _pointed(rays, ambient) -> bool:
    # not pointed  <=>  0 is a convex combination of the rays
    rows = [[rays[i][k] for i in range(len(rays))] for k in range(ambient)]
    rows.append([1] * len(rays))
    return _feasible_standard(rows, [0] * ambient + [1]) is None


def _in_cone_of(gens, v) -> bool:
    rows = [[g[k] for g in gens] for k in range(len(v))]
    return _feasible_standard(rows, list(v)) is not None


def cone_from_generators(vectors: Iterable[Sequence[int]],
                         ambient_rank: Optional[int] = None) -> Cone:
    """Tolerant constructor: primitivize, dedupe and drop redundant generators.

    Used by fan algorithms whose candidate sets are over-complete by design;
    the strict ``Cone`` constructor then revalidates the survivors.
    """
    prims = []
    for v in vectors:
        p = primitive(v)
        if p not in prims:
            prims.append(p)
    # peel redundant generators until stable (order-stable scan)
    changed = True
    while changed:
        changed = False
        for j in range(len(prims)):
            rest = prims[:j] + prims[j + 1:]
            if rest and _in_cone_of(rest, prims[j]):
                prims.pop(j)
                changed = True
                break
    return Cone(prims, ambient_rank)


def contains(c: Cone, v: Sequence) -> bool:
    """Is v a nonnegative rational combination of the rays of c?"""
    v = tuple(Fraction(x) for x in v)
    if len(v) != c.ambient_rank:
        raise ValueError("dimension mismatch")
    if all(x == 0 for x in v):
        return True
    if not c.rays:
        return False
    if c.is_simplicial():
        lam = solve_independent_columns(c.rays, v)
        return lam is not None and all(l >= 0 for l in lam)
    return _in_cone_of(c.rays, v)


def is_regular_cone(c: Cone) -> bool:
    """Do the rays extend to a Z-basis of the ambient lattice?

    Equivalent to the ray matrix having Smith normal form with all elementary
    divisors 1 and rank equal to the number of rays.
    """
    if not c.rays:
        return True
    snf = smith_normal_form(c.rays)
    return snf.rank == len(c.rays) and all(d == 1 for d in snf.diag[:snf.rank])


def dual_basis(c: Cone) -> tuple:
    """Integer rows m_1..m_n with <m_i, ray_j> = delta_ij.

    Exists exactly for regular full-dimensional cones (the inverse of the
    ray-column matrix is then integral).
    """
    n = c.ambient_rank
    if len(c.rays) != n:
        raise ValueError("dual basis requires a full-dimensional cone")
    if not is_regular_cone(c):
        raise ValueError("dual basis requires a regular cone")
    cols = [[c.rays[j][i] for j in range(n)] for i in range(n)]
    inv = invert_matrix(cols)
    out = []
    for row in inv:
        ints = []
        for x in row:
            assert x.denominator == 1, "regular cone must invert integrally"
            ints.append(int(x))
        out.append(tuple(ints))
    return tuple(out)


# ---------------------------------------------------------------------------
# faces, triangulation, Hilbert bases


def _facets_of_rays(rays, ambient):
    """Facets of cone(rays) as (witness functional, facet ray tuple) pairs.

    Works in any dimension: the functional lives in the ambient space but its
    values on span(rays) are what define the facet.  For each (d-1)-subset of
    rays a sign-consistent nullspace functional is sought; subsets that do not
    span a hyperplane of the cone's span are skipped.
    """
    d = matrix_rank(rays)
    facets = {}
    for sub in itertools.combinations(range(len(rays)), d - 1):
        subset = [rays[i] for i in sub]
        if matrix_rank(subset) != d - 1:
            continue
        for w in nullspace(subset, ambient):
            vals = [dot(r, w) for r in rays]
            if all(v == 0 for v in vals):
                continue  # functional vanishes on the whole span
            if all(v >= 0 for v in vals):
                pass
            elif all(v <= 0 for v in vals):
                w = [-x for x in w]
                vals = [-v for v in vals]
            else:
                continue  # subset not on the boundary
            frs = tuple(r for r, v in zip(rays, vals) if v == 0)
            if matrix_rank(frs) != d - 1:
                continue
            facets.setdefault(frozenset(frs), (fraction_primitive(w), frs))
            break
    return list(facets.values())


def cone_facets(c: Cone):
    """(primitive normal, facet rays) for every facet of c.

    For a full-dimensional cone the normals give the exact H-representation
    {x : <normal, x> >= 0 for all facets}.
    """
    if not c.rays:
        return []
    return _facets_of_rays(c.rays, c.ambient_rank)


def triangulate(c: Cone):
    """Split into simplicial subcones on the same rays (pulling scheme)."""

    def rec(rays):
        if matrix_rank(rays) == len(rays):
            return [tuple(rays)]
        r0 = rays[0]
        out = []
        for _, frs in _facets_of_rays(rays, c.ambient_rank):
            if r0 in frs:
                continue
            for simplex in rec(frs):
                out.append((r0,) + simplex)
        return out

    if not c.rays:
        return []
    return rec(c.rays)


def _parallelepiped_points(rays):
    """Nonzero lattice points of {sum lam_i r_i : 0 <= lam_i < 1}."""
    n = len(rays[0])
    lo = [sum(min(0, r[j]) for r in rays) for j in range(n)]
    hi = [sum(max(0, r[j]) for r in rays) for j in range(n)]
    pts = []
    for x in itertools.product(*[range(lo[j], hi[j] + 1) for j in range(n)]):
        if all(v == 0 for v in x):
            continue
        lam = solve_independent_columns(rays, x)
        if lam is not None and all(0 <= l < 1 for l in lam):
            pts.append(tuple(x))
    return pts


def hilbert_basis(c: Cone) -> set:
    """Irreducible elements of the semigroup cone ∩ Z^n.

    Candidates are the primitive rays plus the lattice points of the half-open
    fundamental parallelepiped of each simplicial piece (the classical fact
    that these generate the semigroup).  A candidate h is reducible exactly
    when h - g lands back in the semigroup, nonzero, for some other nonzero
    candidate g; peeling those off leaves precisely the irreducibles.
    Construction of ``Cone`` already guarantees strong convexity, which is
    what makes "irreducible" well defined here.
    """
    if not c.rays:
        return set()
    if c.is_simplicial():
        pieces = [c.rays]
    else:
        pieces = triangulate(c)
    candidates = set(c.rays)
    for piece in pieces:
        candidates.update(_parallelepiped_points(piece))
    zero = (0,) * c.ambient_rank
    candidates.discard(zero)
    basis = set()
    for h in candidates:
        reducible = False
        for g in candidates:
            if g == h:
                continue
            diff = tuple(a - b for a, b in zip(h, g))
            if diff == zero:
                continue
            if contains(c, diff):
                reducible = True
                break
        if not reducible:
            basis.add(h)
    return basis
