import itertools
import random
from fractions import Fraction

import pytest

from nashtor.lattice import dot, matrix_rank
from nashtor.newton import (
    CompactFace,
    compact_faces,
    face_polynomial,
    newton_polyhedron,
    nondegeneracy_probe,
    polyhedron_json,
    support_function,
)
from nashtor.poly import SparsePolynomial, parse_polynomial


FAM1_22 = parse_polynomial("x1^2+x2^2+x3^4+x4^4", 4)
FAM2_3 = parse_polynomial("x1^3+x2^3+x3^3+x4^6", 4)


def _random_poly(rng, n, max_terms=6, max_exp=6):
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        e = tuple(rng.randint(0, max_exp) for _ in range(n))
        terms[e] = rng.randint(1, 5)
    return SparsePolynomial(n, terms)


def test_vertices_families():
    assert newton_polyhedron(FAM1_22).vertices == frozenset(
        {(2, 0, 0, 0), (0, 2, 0, 0), (0, 0, 4, 0), (0, 0, 0, 4)})
    assert newton_polyhedron(FAM2_3).vertices == frozenset(
        {(3, 0, 0, 0), (0, 3, 0, 0), (0, 0, 3, 0), (0, 0, 0, 6)})
    with pytest.raises(ValueError, match="zero polynomial"):
        newton_polyhedron(SparsePolynomial(3))


def test_facets_families():
    P = newton_polyhedron(FAM1_22)
    assert set(P.facets) == {((1, 0, 0, 0), 0), ((0, 1, 0, 0), 0),
                             ((0, 0, 1, 0), 0), ((0, 0, 0, 1), 0),
                             ((2, 2, 1, 1), 4)}
    P2 = newton_polyhedron(FAM2_3)
    assert ((2, 2, 2, 1), 6) in P2.facets
    # monomial: coordinate halfspaces plus the shifted one
    Px = newton_polyhedron(parse_polynomial("x1", 4))
    assert set(Px.facets) == {((1, 0, 0, 0), 1), ((0, 1, 0, 0), 0),
                              ((0, 0, 1, 0), 0), ((0, 0, 0, 1), 0)}
    assert Px.vertices == frozenset({(1, 0, 0, 0)})


def test_vertices_satisfy_facets_with_enough_equalities():
    rng = random.Random(19)
    for _ in range(25):
        f = _random_poly(rng, 3)
        P = newton_polyhedron(f)
        for v in P.vertices:
            assert all(dot(nrm, v) >= off for nrm, off in P.facets)
            # active constraints (facets + coordinate hyperplanes) must pin
            # the vertex down: their normals span the whole space
            active = [nrm for nrm, off in P.facets if dot(nrm, v) == off]
            active += [tuple(int(j == i) for j in range(P.n))
                       for i, c in enumerate(v) if c == 0]
            assert len(active) >= P.n
            assert matrix_rank(active) == P.n


def test_support_function_examples_and_errors():
    P = newton_polyhedron(FAM1_22)
    assert support_function(P, (2, 2, 1, 1)) == 4
    assert support_function(P, (0, 0, 0, 0)) == 0
    assert support_function(newton_polyhedron(FAM2_3), (2, 2, 2, 1)) == 6
    with pytest.raises(ValueError, match="negative"):
        support_function(P, (1, -1, 0, 0))


def test_support_function_against_all_exponents_oracle():
    rng = random.Random(101)
    for _ in range(60):
        n = rng.choice((2, 3, 4))
        f = _random_poly(rng, n)
        P = newton_polyhedron(f)
        for _ in range(6):
            p = tuple(rng.randint(0, 7) for _ in range(n))
            expected = min(dot(e, p) for e in f.terms)
            assert support_function(P, p) == expected
        # positive homogeneity
        p = tuple(rng.randint(0, 5) for _ in range(n))
        k = rng.randint(0, 4)
        assert support_function(P, tuple(k * c for c in p)) \
            == k * support_function(P, p)


def test_exponents_dominate_support_on_grid():
    rng = random.Random(103)
    for _ in range(15):
        f = _random_poly(rng, 3)
        P = newton_polyhedron(f)
        for p in itertools.product(range(4), repeat=3):
            h = support_function(P, p)
            assert all(dot(e, p) >= h for e in f.terms)


def test_compact_faces_families():
    P = newton_polyhedron(FAM1_22)
    faces = compact_faces(P)
    tops = [fc for fc in faces if fc.dimension == 3]
    assert len(tops) == 1 and tops[0].vertex_subset == P.vertices
    # full simplex face lattice: 4 + 6 + 4 + 1
    assert len(faces) == 15
    mono = newton_polyhedron(parse_polynomial("x1^2", 2))
    fcs = compact_faces(mono)
    assert len(fcs) == 1 and fcs[0].dimension == 0
    P2 = newton_polyhedron(FAM2_3)
    tops2 = [fc for fc in compact_faces(P2) if fc.dimension == 3]
    assert len(tops2) == 1 and tops2[0].vertex_subset == P2.vertices


def test_compact_faces_closed_under_intersection():
    rng = random.Random(107)
    for _ in range(12):
        f = _random_poly(rng, 3, max_terms=5)
        faces = compact_faces(newton_polyhedron(f))
        sets = {fc.vertex_subset for fc in faces}
        for a, b in itertools.combinations(sets, 2):
            inter = a & b
            if inter:
                assert inter in sets


def test_face_polynomial():
    pert = FAM1_22 + SparsePolynomial.monomial(4, (3, 0, 0, 0))
    top = [fc for fc in compact_faces(newton_polyhedron(pert))
           if fc.dimension == 3][0]
    assert face_polynomial(pert, top) == FAM1_22
    P = newton_polyhedron(FAM1_22)
    vface = [fc for fc in compact_faces(P)
             if fc.vertex_subset == frozenset({(2, 0, 0, 0)})][0]
    assert face_polynomial(FAM1_22, vface) == \
        SparsePolynomial.monomial(4, (2, 0, 0, 0))
    assert face_polynomial(FAM1_22, [fc for fc in compact_faces(P)
                                     if fc.dimension == 3][0]) == FAM1_22
    with pytest.raises(ValueError, match="not a face"):
        face_polynomial(FAM1_22, CompactFace(frozenset({(1, 1, 1, 1)}), 0))
    with pytest.raises(ValueError, match="not a face"):
        face_polynomial(FAM1_22, CompactFace(
            frozenset({(2, 0, 0, 0), (0, 0, 4, 0)}), 2))
    # non-vertex exponents sitting on the face are kept
    line = parse_polynomial("x1^2 + x1*x2 + x2^2", 2)
    seg = [fc for fc in compact_faces(newton_polyhedron(line))
           if fc.dimension == 1][0]
    assert face_polynomial(line, seg) == line


def test_probe_fail_with_witness():
    f = parse_polynomial("x1^2 + 2*x1*x2 + x2^2", 2)
    v = nondegeneracy_probe(f, modulus=5)
    assert v.status == "FAIL"
    assert v.witness.modulus == 5
    assert v.witness.point == (1, 4)  # i.e. x1=1, x2=-1 mod 5


def test_probe_pass_exhaustive_and_constant():
    assert nondegeneracy_probe(parse_polynomial("x1^3+x2^4", 2),
                               modulus=5).status == "PASS"
    # a unit partial derivative certifies every face at once
    assert nondegeneracy_probe(parse_polynomial("x1+x2", 2)).status == "PASS"


def test_probe_families_inconclusive():
    # n=4 at the default modulus cannot be exhaustive, and there is no
    # constant certificate on the big face: the probe must refuse to certify
    assert nondegeneracy_probe(FAM1_22).status == "INCONCLUSIVE"
    assert nondegeneracy_probe(FAM2_3).status == "INCONCLUSIVE"


def test_probe_errors():
    with pytest.raises(ValueError, match="divides"):
        nondegeneracy_probe(
            SparsePolynomial(2, {(1, 0): Fraction(1, 5)}), modulus=5)
    with pytest.raises(ValueError, match="trials"):
        nondegeneracy_probe(FAM1_22, trials=0)


def test_probe_deterministic_under_seed():
    f = parse_polynomial("x1^2+x2^2+x3^4+x4^4", 4)
    a = nondegeneracy_probe(f, seed=42)
    b = nondegeneracy_probe(f, seed=42)
    assert a == b


def test_polyhedron_json():
    data = polyhedron_json(newton_polyhedron(FAM1_22))
    assert data == {
        "vertices": [[0, 0, 0, 4], [0, 0, 4, 0], [0, 2, 0, 0], [2, 0, 0, 0]],
        "facets": [{"normal": [0, 0, 0, 1], "offset": 0},
                   {"normal": [0, 0, 1, 0], "offset": 0},
                   {"normal": [0, 1, 0, 0], "offset": 0},
                   {"normal": [1, 0, 0, 0], "offset": 0},
                   {"normal": [2, 2, 1, 1], "offset": 4}],
    }
