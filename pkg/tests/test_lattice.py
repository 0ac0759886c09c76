import itertools
import random
from fractions import Fraction

import pytest

from nashtor.lattice import (
    Cone,
    SnfResult,
    cone_facets,
    cone_from_generators,
    contains,
    dot,
    dual_basis,
    hilbert_basis,
    invert_matrix,
    is_regular_cone,
    lp_feasible,
    matrix_rank,
    nullspace,
    primitive,
    smith_normal_form,
    solve_independent_columns,
    triangulate,
)
from nashtor.lattice import _in_cone_of


def _det(rows):
    # independent determinant oracle via fraction-free-ish elimination
    A = [[Fraction(x) for x in r] for r in rows]
    n = len(A)
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if A[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        det *= A[c][c]
        for i in range(c + 1, n):
            if A[i][c] != 0:
                f = A[i][c] / A[c][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return det


def _random_orthant_cone(rng, n=3, max_entry=4, max_gens=4):
    while True:
        gens = []
        for _ in range(rng.randint(2, max_gens)):
            v = tuple(rng.randint(0, max_entry) for _ in range(n))
            if any(v):
                gens.append(v)
        if gens:
            return cone_from_generators(gens, n)


def _random_unimodular(rng, n=3):
    rows = [[int(i == j) for j in range(n)] for i in range(n)]
    if n == 1:
        return [[rng.choice((-1, 1))]]
    for _ in range(6):
        i, j = rng.sample(range(n), 2)
        s = rng.choice((-1, 1))
        rows[i] = [a + s * b for a, b in zip(rows[i], rows[j])]
    rng.shuffle(rows)
    return rows


def _apply(mat, v):
    return tuple(dot(row, v) for row in mat)


def test_primitive_examples():
    assert primitive((4, 6, 2, 2)) == (2, 3, 1, 1)
    assert primitive((-2, -4)) == (-1, -2)
    assert primitive((0, 7, 0)) == (0, 1, 0)
    with pytest.raises(ValueError, match="not primitivizable"):
        primitive((0, 0, 0))


def test_primitive_idempotent_random():
    rng = random.Random(11)
    for _ in range(200):
        v = tuple(rng.randint(-9, 9) for _ in range(4))
        if not any(v):
            continue
        p = primitive(v)
        assert primitive(p) == p
        # p spans the same ray
        g = [a // b for a, b in zip(v, p) if b != 0]
        assert all(x == g[0] for x in g) and g[0] > 0 or all(c == 0 for c in v)


def test_smith_normal_form_examples():
    assert smith_normal_form(
        [(0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1), (3, 3, 1, 1)]
    ) == SnfResult((1, 1, 1, 3), 4)
    for p in (2, 3, 5):
        assert smith_normal_form(
            [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 0, 1), (p, p, 1, 1)]
        ) == SnfResult((1, 1, 1, 1), 4)
    assert smith_normal_form([(2, 0), (0, 3)]) == SnfResult((1, 6), 2)
    assert smith_normal_form([(0, 0), (0, 0)]) == SnfResult((0, 0), 0)
    assert smith_normal_form([(2, 4, 4)]) == SnfResult((2,), 1)


def test_smith_divisibility_and_unimodular_invariance():
    rng = random.Random(23)
    for _ in range(60):
        m = rng.randint(1, 4)
        n = rng.randint(1, 4)
        M = [[rng.randint(-6, 6) for _ in range(n)] for _ in range(m)]
        snf = smith_normal_form(M)
        assert len(snf.diag) == min(m, n)
        assert snf.rank == matrix_rank(M)
        for a, b in zip(snf.diag, snf.diag[1:]):
            if a == 0:
                assert b == 0
            else:
                assert b % a == 0
        # invariant under left multiplication by a unimodular matrix
        U = _random_unimodular(rng, m)
        UM = [[dot(U[i], [M[k][j] for k in range(m)]) for j in range(n)]
              for i in range(m)]
        assert smith_normal_form(UM) == snf


def test_cone_validation_rejects_bad_input():
    with pytest.raises(ValueError, match="not primitive"):
        Cone([(2, 0), (0, 1)])
    with pytest.raises(ValueError, match="distinct"):
        Cone([(1, 0), (1, 0)])
    with pytest.raises(ValueError, match="redundant"):
        Cone([(1, 0), (0, 1), (1, 1)])
    with pytest.raises(ValueError, match="strongly convex"):
        Cone([(1, 0), (-1, 0)])
    with pytest.raises(ValueError, match="strongly convex"):
        Cone([(1, 0), (-1, 1), (0, -1)])
    with pytest.raises(ValueError, match="zero vector"):
        Cone([(0, 0), (1, 0)])
    with pytest.raises(ValueError, match="ambient_rank"):
        Cone([])
    with pytest.raises(ValueError):
        Cone([(1, 0), (0, 1, 0)])


def test_cone_equality_is_geometric():
    a = Cone([(1, 0), (1, 2)])
    b = Cone([(1, 2), (1, 0)])
    assert a == b
    assert hash(a) == hash(b)
    assert a != Cone([(1, 0), (0, 1)])
    # but ray order is preserved as given
    assert b.rays == ((1, 2), (1, 0))


def test_cone_from_generators_cleans_up():
    c = cone_from_generators([(2, 0), (0, 3), (1, 1), (1, 0)])
    assert c == Cone([(1, 0), (0, 1)])
    assert cone_from_generators([(4, 6, 2, 2)]).rays == ((2, 3, 1, 1),)


def test_contains_examples():
    s1 = Cone([(2, 2, 1, 1), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)])
    assert contains(s1, (1, 1, 1, 1))
    assert not contains(s1, (1, 0, 0, 0))
    assert contains(s1, (0, 0, 0, 0))
    assert contains(s1, (Fraction(1, 2), Fraction(1, 2),
                         Fraction(1, 4), Fraction(1, 4)))
    for r in s1.rays:
        assert contains(s1, r)
        assert not contains(s1, tuple(-c for c in r))


def test_contains_two_routes_agree():
    # Gaussian route (simplicial) vs simplex LP route on the same queries
    rng = random.Random(5)
    for _ in range(40):
        c = _random_orthant_cone(rng)
        for _ in range(8):
            v = tuple(rng.randint(-4, 8) for _ in range(3))
            via_lp = _in_cone_of(c.rays, v)
            assert contains(c, v) == via_lp
        # nonnegative combinations must always test positive
        comb = [0, 0, 0]
        for r in c.rays:
            k = rng.randint(0, 3)
            comb = [a + k * b for a, b in zip(comb, r)]
        assert contains(c, tuple(comb))


def test_is_regular_cone_matches_determinant():
    rng = random.Random(7)
    checked = 0
    for _ in range(80):
        rays = [tuple(rng.randint(-3, 3) for _ in range(3)) for _ in range(3)]
        if any(not any(r) for r in rays):
            continue
        rays = [primitive(r) for r in rays]
        if len(set(rays)) < 3 or _det(rays) == 0:
            continue
        try:
            c = Cone(rays)
        except ValueError:
            continue
        checked += 1
        assert is_regular_cone(c) == (abs(_det(rays)) == 1)
    assert checked > 20
    # a non-simplicial cone is never regular
    sq = Cone([(1, 0, 0), (0, 1, 0), (1, 0, 1), (0, 1, 1)])
    assert not is_regular_cone(sq)


def test_dual_basis_identity_and_errors():
    c = Cone([(2, 2, 1, 1), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)])
    with pytest.raises(ValueError, match="regular"):
        dual_basis(c)
    with pytest.raises(ValueError, match="full-dimensional"):
        dual_basis(Cone([(1, 0), ], ambient_rank=2))
    rng = random.Random(31)
    for _ in range(20):
        U = _random_unimodular(rng, 4)
        rays = [primitive(row) for row in U]
        try:
            c = Cone(rays)
        except ValueError:
            continue
        m = dual_basis(c)
        for i in range(4):
            for j in range(4):
                assert dot(m[i], c.rays[j]) == (1 if i == j else 0)


def test_hilbert_basis_small_examples():
    assert hilbert_basis(Cone([(1, 0), (1, 2)])) == {(1, 0), (1, 1), (1, 2)}
    assert hilbert_basis(Cone([(1, 0), (0, 1)])) == {(1, 0), (0, 1)}
    assert hilbert_basis(Cone([(1, 2)])) == {(1, 2)}
    sq = Cone([(1, 0, 0), (0, 1, 0), (1, 0, 1), (0, 1, 1)])
    assert hilbert_basis(sq) == set(sq.rays)


def test_hilbert_basis_weighted_family():
    for p in (2, 3, 4):
        c = Cone([(p, p, 1, 1), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)])
        expected = {(0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)}
        expected |= {(k, k, 1, 1) for k in range(1, p + 1)}
        assert hilbert_basis(c) == expected


def _assert_hilbert_correct(c, basis):
    """Property-level check: basis generates, and each element is irreducible.

    Valid for cones inside the first orthant, where any decomposition of v
    stays componentwise below v.
    """
    n = c.ambient_rank
    pts = sorted(basis)
    assert all(contains(c, b) for b in pts)
    # irreducibility: no element is a sum of two nonzero semigroup points
    for v in pts:
        box = itertools.product(*[range(0, vi + 1) for vi in v])
        for a in box:
            if not any(a) or a == v:
                continue
            b = tuple(x - y for x, y in zip(v, a))
            if any(bi < 0 for bi in b) or not any(b):
                continue
            assert not (contains(c, a) and contains(c, b)), \
                f"{v} = {a} + {b} is reducible"
    # generation: every semigroup point in a modest box is a N-combination
    bound = 7

    def expressible(x, memo={}):
        if not any(x):
            return True
        if x in memo:
            return memo[x]
        ok = False
        for h in pts:
            if all(hi <= xi for hi, xi in zip(h, x)):
                if expressible(tuple(xi - hi for xi, hi in zip(x, h))):
                    ok = True
                    break
        memo[x] = ok
        return ok

    for x in itertools.product(range(bound), repeat=n):
        if contains(c, x):
            assert expressible(x), f"{x} not generated by {pts}"


def test_hilbert_basis_random_orthant_cones():
    rng = random.Random(97)
    for _ in range(12):
        c = _random_orthant_cone(rng)
        _assert_hilbert_correct(c, hilbert_basis(c))


def test_hilbert_basis_unimodular_equivariance():
    # moves the orthant-only coverage to cones with negative entries
    rng = random.Random(13)
    for _ in range(10):
        c = _random_orthant_cone(rng)
        U = _random_unimodular(rng)
        img = cone_from_generators([_apply(U, r) for r in c.rays], 3)
        assert set(img.rays) == {_apply(U, r) for r in c.rays}
        assert hilbert_basis(img) == {_apply(U, h) for h in hilbert_basis(c)}


def test_cone_facets_simplicial_and_square():
    c = Cone([(2, 2, 1, 1), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)])
    fs = cone_facets(c)
    assert len(fs) == 4
    assert {frozenset(frs) for _, frs in fs} == \
        {frozenset(c.rays) - {r} for r in c.rays}
    for normal, frs in fs:
        assert all(dot(normal, r) == 0 for r in frs)
        assert all(dot(normal, r) >= 0 for r in c.rays)
    sq = Cone([(1, 0, 0), (0, 1, 0), (1, 0, 1), (0, 1, 1)])
    assert len(cone_facets(sq)) == 4


def test_cone_facets_give_h_representation():
    rng = random.Random(41)
    for _ in range(25):
        c = _random_orthant_cone(rng)
        if c.dim() != 3:
            continue  # normals only give the H-rep in full dimension
        normals = [nrm for nrm, _ in cone_facets(c)]
        for _ in range(10):
            v = tuple(rng.randint(-5, 9) for _ in range(3))
            assert contains(c, v) == all(dot(nrm, v) >= 0 for nrm in normals)


def test_triangulate_covers_cone():
    rng = random.Random(59)
    for _ in range(20):
        c = _random_orthant_cone(rng)
        pieces = triangulate(c)
        seen_rays = set()
        for piece in pieces:
            assert matrix_rank(piece) == len(piece)
            assert set(piece) <= set(c.rays)
            seen_rays |= set(piece)
            assert matrix_rank(piece) == c.dim()
        assert seen_rays == set(c.rays)
        for _ in range(10):
            v = tuple(rng.randint(0, 8) for _ in range(3))
            inside = contains(c, v)
            in_piece = any(
                (lam := solve_independent_columns(piece, v)) is not None
                and all(x >= 0 for x in lam)
                for piece in pieces)
            assert inside == in_piece


def test_lp_feasible_hand_cases():
    # x + y = 1, x - y >= 0, both nonnegative
    sol = lp_feasible(2, eqs=[((1, 1), 1)], ges=[((1, -1), 0)])
    assert sol is not None and sol[0] + sol[1] == 1 and sol[0] >= sol[1] >= 0
    # free variable: x = -5 forced
    sol = lp_feasible(1, eqs=[((1,), -5)], nonneg=set())
    assert sol == [Fraction(-5)]
    # infeasible: sum of nonnegatives equal to -1
    assert lp_feasible(2, eqs=[((1, 1), -1)]) is None
    # infeasible: <a,x> = 0 and <a,x> >= 1
    assert lp_feasible(3, eqs=[((1, 2, 3), 0)], ges=[((1, 2, 3), 1)]) is None
    # empty system
    assert lp_feasible(2) == [0, 0]


def test_lp_feasible_random_systems():
    rng = random.Random(71)
    for _ in range(60):
        nv = rng.randint(1, 4)
        free = {i for i in range(nv) if rng.random() < 0.4}
        xstar = [rng.randint(-6, 6) if i in free else rng.randint(0, 6)
                 for i in range(nv)]
        eqs, ges = [], []
        for _ in range(rng.randint(0, 3)):
            row = tuple(rng.randint(-4, 4) for _ in range(nv))
            eqs.append((row, dot(row, xstar)))
        for _ in range(rng.randint(0, 3)):
            row = tuple(rng.randint(-4, 4) for _ in range(nv))
            ges.append((row, dot(row, xstar) - rng.randint(0, 5)))
        sol = lp_feasible(nv, eqs=eqs, ges=ges,
                          nonneg=set(range(nv)) - free)
        assert sol is not None
        for row, b in eqs:
            assert dot(row, sol) == b
        for row, b in ges:
            assert dot(row, sol) >= b
        for i in range(nv):
            if i not in free:
                assert sol[i] >= 0


def test_linear_helpers():
    assert matrix_rank([(1, 2), (2, 4)]) == 1
    assert matrix_rank([]) == 0
    assert solve_independent_columns([(1, 0), (1, 2)], (3, 4)) == \
        [Fraction(1), Fraction(2)]
    assert solve_independent_columns([(1, 0, 0)], (0, 1, 0)) is None
    with pytest.raises(ValueError, match="independent"):
        solve_independent_columns([(1, 0), (2, 0)], (1, 1))
    ns = nullspace([(1, 1, 1)], 3)
    assert len(ns) == 2
    assert all(sum(v) == 0 for v in ns)
    inv = invert_matrix([(1, 1), (0, 1)])
    assert inv == [[Fraction(1), Fraction(-1)], [Fraction(0), Fraction(1)]]
    with pytest.raises(ValueError, match="singular"):
        invert_matrix([(1, 1), (2, 2)])
