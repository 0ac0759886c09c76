"""Newton polyhedra: vertices, facets, support function, compact faces.

Gamma_+(f) is the convex hull of E(f) + R^n_{>=0}.  Since the recession cone
is always the standard orthant, vertices fall out of exact LP domination
tests and facets from a brute-force normal search over hyperplane-spanning
subsets -- entirely adequate in ambient dimension <= 4.

The nondegeneracy probe at the end is heuristic by design: it reduces the
face polynomials modulo primes and searches the torus for common zeros with
their partials.  It can certify failure (a witness), and it only claims PASS
when every compact face was either settled by a constant-partial certificate
or searched exhaustively under every modulus; everything else stays
INCONCLUSIVE.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .lattice import (
    dot,
    fraction_primitive,
    lp_feasible,
    matrix_rank,
    nullspace,
    _feasible_standard,
)
from .poly import SparsePolynomial, partial_derivative


@dataclass(frozen=True)
class NewtonPolyhedron:
    n: int
    vertices: frozenset
    facets: tuple  # ((primitive normal in Delta, integer offset), ...)


@dataclass(frozen=True)
class CompactFace:
    vertex_subset: frozenset
    dimension: int


def _vertex_filter(exponents, n):
    # Pareto pass: anything componentwise above another exponent is interior
    pts = []
    for e in exponents:
        if not any(other != e and all(o <= a for o, a in zip(other, e))
                   for other in exponents):
            pts.append(e)
    verts = []
    for e in pts:
        others = [o for o in pts if o != e]
        if not others:
            verts.append(e)
            continue
        # e in conv(others) + orthant?  (lambda, slack) >= 0 exact LP
        k = len(others)
        rows = []
        for i in range(n):
            rows.append([o[i] for o in others] + [int(j == i) for j in range(n)])
        rows.append([1] * k + [0] * n)
        if _feasible_standard(rows, list(e) + [1]) is None:
            verts.append(e)
    return verts


def _facet_search(verts, n):
    verts = sorted(verts)
    dirs = [tuple(a - b for a, b in zip(v, w))
            for v, w in itertools.combinations(verts, 2)]
    for i in range(n):
        dirs.append(tuple(int(j == i) for j in range(n)))
    dirs = [d for d in dirs if any(d)]
    found = {}
    for sub in itertools.combinations(range(len(dirs)), n - 1):
        span = [dirs[i] for i in sub]
        if matrix_rank(span) != n - 1:
            continue
        for w in nullspace(span, n):
            p = fraction_primitive(w)
            if all(c <= 0 for c in p):
                p = tuple(-c for c in p)
            if any(c < 0 for c in p):
                continue  # facet normals of Gamma_+ live in Delta
            if p in found:
                continue
            vals = [dot(v, p) for v in verts]
            offset = min(vals)
            on_face = [v for v, val in zip(verts, vals) if val == offset]
            rec = [tuple(int(j == i) for j in range(n))
                   for i in range(n) if p[i] == 0]
            span_dirs = [tuple(a - b for a, b in zip(v, on_face[0]))
                         for v in on_face[1:]] + rec
            if matrix_rank(span_dirs) == n - 1:
                found[p] = offset
            break
    return tuple(sorted(found.items()))


def newton_polyhedron(f: SparsePolynomial) -> NewtonPolyhedron:
    """Vertices and facet inequalities of Gamma_+(f)."""
    if f.is_zero():
        raise ValueError("zero polynomial has no Newton polyhedron")
    n = f.n_vars
    verts = _vertex_filter(list(f.terms), n)
    return NewtonPolyhedron(n, frozenset(verts), _facet_search(verts, n))


def support_function(P: NewtonPolyhedron, p) -> Fraction:
    """h(p) = min over Gamma_+(f) of <r, p>, attained at a vertex for p in Delta."""
    p = tuple(Fraction(c) for c in p)
    if len(p) != P.n:
        raise ValueError("dimension mismatch")
    if any(c < 0 for c in p):
        raise ValueError("support function undefined for negative "
                         "coordinates (infimum is -infinity)")
    return min(dot(v, p) for v in P.vertices)


def compact_faces(P: NewtonPolyhedron):
    """Every compact face, as its vertex set plus dimension.

    A vertex subset V' spans a compact face exactly when some strictly
    positive functional is constant on V' and strictly larger on the other
    vertices; by scaling this is an exact LP with unit gaps.
    """
    verts = sorted(P.vertices)
    n = P.n
    faces = []
    for r in range(1, len(verts) + 1):
        for sub in itertools.combinations(verts, r):
            rest = [v for v in verts if v not in sub]
            # variables: p_1..p_n, c
            ges = [(tuple(int(j == i) for j in range(n)) + (0,), 1)
                   for i in range(n)]
            base = sub[0]
            eqs = [(v + (-1,), 0) for v in sub]
            ges += [(v + (-1,), 1) for v in rest]
            if lp_feasible(n + 1, eqs=eqs, ges=ges, nonneg=set()) is None:
                continue
            dim = matrix_rank([tuple(a - b for a, b in zip(v, base))
                               for v in sub[1:]])
            faces.append(CompactFace(frozenset(sub), dim))
    return faces


def _on_compact_face(face: CompactFace, e) -> bool:
    # compact faces are polytopes: membership = convex-combination LP
    verts = sorted(face.vertex_subset)
    n = len(verts[0])
    rows = [[v[i] for v in verts] for i in range(n)]
    rows.append([1] * len(verts))
    return _feasible_standard(rows, list(e) + [1]) is not None


def face_polynomial(f: SparsePolynomial, face: CompactFace) -> SparsePolynomial:
    """f_gamma: the terms of f whose exponents lie on the face."""
    P = newton_polyhedron(f)
    if not face.vertex_subset <= P.vertices:
        raise ValueError("not a face of the Newton polyhedron of f")
    if face not in compact_faces(P):
        raise ValueError("not a face of the Newton polyhedron of f")
    terms = {e: c for e, c in f.terms.items() if _on_compact_face(face, e)}
    return SparsePolynomial(f.n_vars, terms)


def polyhedron_json(P: NewtonPolyhedron) -> dict:
    return {
        "vertices": [list(v) for v in sorted(P.vertices)],
        "facets": [{"normal": list(nrm), "offset": int(off)}
                   for nrm, off in P.facets],
    }


# ---------------------------------------------------------------------------
# nondegeneracy probe


@dataclass(frozen=True)
class ProbeWitness:
    face: CompactFace
    point: tuple
    modulus: int


@dataclass(frozen=True)
class ProbeVerdict:
    status: str  # "PASS" | "FAIL" | "INCONCLUSIVE"
    witness: Optional[ProbeWitness] = None


def _next_prime(k: int) -> int:
    def is_prime(x):
        if x < 2:
            return False
        d = 2
        while d * d <= x:
            if x % d == 0:
                return False
            d += 1
        return True

    k += 1
    while not is_prime(k):
        k += 1
    return k


def _mod_terms(g: SparsePolynomial, p: int):
    out = []
    for e, c in g.terms.items():
        if c.denominator % p == 0:
            raise ValueError(f"modulus {p} divides a coefficient denominator")
        r = (c.numerator % p) * pow(c.denominator, -1, p) % p
        if r:
            out.append((e, r))
    return out


def _eval_mod(terms, point, p: int) -> int:
    total = 0
    for e, c in terms:
        v = c
        for x, a in zip(point, e):
            if a:
                v = v * pow(x, a, p) % p
        total = (total + v) % p
    return total


def nondegeneracy_probe(f: SparsePolynomial, trials: int = 200,
                        modulus: int = 10007, seed: int = 0,
                        budget: int = 10**6) -> ProbeVerdict:
    """Search for common torus zeros of f_gamma and its partials, mod primes.

    A probe, not a proof: FAIL comes with a concrete witness (face, point,
    modulus); PASS is only issued when every compact face is covered by a
    certificate -- a nonzero constant among f_gamma and its partials (no
    common zero over any field), or an exhaustive torus sweep under each of
    the three moduli tried.  Sampling that finds nothing stays INCONCLUSIVE.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if f.is_zero():
        raise ValueError("zero polynomial")
    n = f.n_vars
    moduli = [modulus]
    while len(moduli) < 3:
        moduli.append(_next_prime(moduli[-1]))
    for p in moduli:
        for c in f.terms.values():
            if c.denominator % p == 0:
                raise ValueError(
                    f"modulus {p} divides a coefficient denominator")
    rng = random.Random(seed)
    P = newton_polyhedron(f)
    faces = sorted(compact_faces(P),
                   key=lambda fc: (fc.dimension, sorted(fc.vertex_subset)))
    all_certified = True
    for face in faces:
        fg = face_polynomial(f, face)
        system = [fg] + [partial_derivative(fg, i) for i in range(n)]
        system = [g for g in system if not g.is_zero()]
        constant_term = (0,) * n
        if any(g.terms.keys() == {constant_term} for g in system):
            continue  # a nonzero constant can never vanish: certified
        for p in moduli:
            mod_system = [_mod_terms(g, p) for g in system]
            mod_system = [t for t in mod_system if t]
            if not mod_system:
                # everything vanished mod p: every torus point is a witness
                return ProbeVerdict("FAIL",
                                    ProbeWitness(face, (1,) * n, p))
            if (p - 1) ** n <= budget:
                points = itertools.product(range(1, p), repeat=n)
            else:
                all_certified = False
                points = (tuple(rng.randrange(1, p) for _ in range(n))
                          for _ in range(trials))
            for pt in points:
                if all(_eval_mod(t, pt, p) == 0 for t in mod_system):
                    return ProbeVerdict("FAIL", ProbeWitness(face, pt, p))
    return ProbeVerdict("PASS" if all_certified else "INCONCLUSIVE")
