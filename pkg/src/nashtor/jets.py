"""m-jet equations of hypersurfaces and constructive jet deformations.

The m-jet equations of f are the t-coefficients of f(sum_k x^(k) t^k) in
Q[x^(0)..x^(m)][t]/(t^{m+1}); everything here is obtained by exact truncated
series substitution, never by formula transcription.

deform_jet lifts an m-jet of f = F(x, 0) through a polynomial family
F(x, s) = f + sum_l s^l g_l order by order in s: at each stage the s^j
obstruction T_j is cancelled by correcting a single coordinate i0 (the one
of minimal contact order, fixed once), which amounts to one truncated series
division by d_{i0}f(phi).  The construction is valid when two order
conditions hold — the weighted order of f equals the minimal contact order
of phi, and no g_l has smaller weighted order than f — and the result is
always re-verified by an independent substitution of the finished family.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .poly import (
    INFINITY,
    SparsePolynomial,
    TruncatedSeries,
    format_polynomial,
    nu_v,
    nu_v_m,
    ord_t_m,
    parse_polynomial,
    partial_derivative,
    set_vars_zero,
    substitute_series,
)


def jet_variable_names(n_vars: int, m: int, s_names=()):
    """x{i}_{k} for original variable i (1-based) and jet level k, then any
    scalar deformation parameters."""
    names = [f"x{i + 1}_{k}" for i in range(n_vars) for k in range(m + 1)]
    return names + list(s_names)


@dataclass(frozen=True)
class JetSystem:
    """Equations F_0..F_m of the m-jet space of a hypersurface.

    The equations live in n_vars*(m+1) jet variables ordered x1_0..x1_m,
    x2_0, ...; relative systems append scalar parameter variables at the
    end (s_names).
    """

    n_vars: int
    m: int
    equations: tuple
    s_names: tuple = ()


def _jet_args(n_vars, m, total_vars, offset=0):
    args = []
    for i in range(n_vars):
        coeffs = []
        for k in range(m + 1):
            idx = offset + i * (m + 1) + k
            exp = tuple(1 if j == idx else 0 for j in range(total_vars))
            coeffs.append(SparsePolynomial(total_vars, {exp: Fraction(1)}))
        args.append(TruncatedSeries(m, coeffs))
    return args


def _as_polys(coeffs, total_vars):
    return tuple(c if isinstance(c, SparsePolynomial)
                 else SparsePolynomial.constant(total_vars, c)
                 for c in coeffs)


def jet_equations(f: SparsePolynomial, m: int) -> JetSystem:
    """Substitute x_i -> sum_k x_i^(k) t^k and collect t-coefficients."""
    if m < 0:
        raise ValueError("jet order must be >= 0")
    n = f.n_vars
    total = n * (m + 1)
    series = substitute_series(f, _jet_args(n, m, total))
    return JetSystem(n_vars=n, m=m, equations=_as_polys(series.coeffs, total))


def relative_jet_equations(F: SparsePolynomial, m: int,
                           s_vars) -> JetSystem:
    """Jet equations of a family: the declared s-variables stay scalar.

    Only the remaining (x-) variables are replaced by jet series; each s
    passes through as a degree-zero coefficient, so F_0..F_m live in the
    jet variables of the x's plus the s's (appended last).
    """
    if m < 0:
        raise ValueError("jet order must be >= 0")
    s_vars = sorted(set(s_vars))
    if any(v < 0 or v >= F.n_vars for v in s_vars):
        raise ValueError("s-variable index out of range")
    x_vars = [v for v in range(F.n_vars) if v not in s_vars]
    if not x_vars:
        raise ValueError("no x-variables left to jetify")
    n_x = len(x_vars)
    total = n_x * (m + 1) + len(s_vars)
    jet_args = _jet_args(n_x, m, total)
    args = []
    x_pos = {v: i for i, v in enumerate(x_vars)}
    for v in range(F.n_vars):
        if v in x_pos:
            args.append(jet_args[x_pos[v]])
        else:
            idx = n_x * (m + 1) + s_vars.index(v)
            exp = tuple(1 if j == idx else 0 for j in range(total))
            coeffs = [SparsePolynomial(total, {exp: Fraction(1)})]
            coeffs += [SparsePolynomial(total, {})] * m
            args.append(TruncatedSeries(m, coeffs))
    series = substitute_series(F, args)
    if len(s_vars) == 1:
        s_names = ("s",)
    else:
        s_names = tuple(f"s{j + 1}" for j in range(len(s_vars)))
    return JetSystem(n_vars=n_x, m=m,
                     equations=_as_polys(series.coeffs, total),
                     s_names=s_names)


def origin_fiber_is_affine(f: SparsePolynomial, m: int):
    """Is the m-jet fiber over the origin a full affine space?

    Setting all level-0 variables to zero kills every equation exactly when
    the fiber is A^{n*m}; then (True, n*m), otherwise (False, None).
    """
    system = jet_equations(f, m)
    n = system.n_vars
    zero_levels = [i * (m + 1) for i in range(n)]
    if all(set_vars_zero(eq, zero_levels).is_zero()
           for eq in system.equations):
        return (True, n * m)
    return (False, None)


def lic_criterion(n: int, p: int, m: int) -> bool:
    """p*m <= n-p: the jet space of a codimension-p local complete
    intersection is again a local complete intersection."""
    if not 0 < p < n:
        raise ValueError("requires 0 < p < n")
    if m < 0:
        raise ValueError("jet order must be >= 0")
    return p * m <= n - p


# ---------------------------------------------------------------------------
# deformation hypotheses


class _UndecidedType:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNDECIDED"

    def __bool__(self):
        return False


UNDECIDED = _UndecidedType()


def monomial_ideal_member(g: SparsePolynomial, generators) -> bool:
    """Membership in the monomial ideal spanned by the given exponents:
    every term of g must be divisible by some generator."""
    gens = [tuple(int(c) for c in gen) for gen in generators]
    for gen in gens:
        if len(gen) != g.n_vars or any(c < 0 for c in gen):
            raise ValueError(f"bad generator exponent {gen}")
    return all(
        any(all(e >= d for e, d in zip(exp, gen)) for gen in gens)
        for exp in g.terms)


def integral_closure_member(g: SparsePolynomial, generators):
    """True for the decidable monomial sub-case; UNDECIDED otherwise.

    Full integral closure of an arbitrary ideal is out of scope; callers
    get an explicit sentinel instead of a guess.
    """
    if monomial_ideal_member(g, generators):
        return True
    return UNDECIDED


@dataclass(frozen=True)
class HypothesisReport:
    ok: bool
    min_order_equality: bool
    g_order_bound: bool
    nu_f: object
    contact_orders: tuple
    g_orders: tuple
    failures: tuple


def _check_phi(f, phi, m):
    phi = tuple(phi)
    if len(phi) != f.n_vars:
        raise ValueError("phi must have one series per variable")
    for p in phi:
        if not isinstance(p, TruncatedSeries) or p.m != m:
            raise ValueError("phi entries must be series truncated at m")
    if not substitute_series(f, phi).is_zero():
        raise ValueError("phi is not an m-jet of f: f(phi) != 0 mod t^(m+1)")
    orders = tuple(ord_t_m(p) for p in phi)
    if any(o is INFINITY for o in orders):
        raise ValueError("every phi_i must be nonzero mod t^(m+1)")
    if any(o == 0 for o in orders):
        raise ValueError("phi must be centered at the origin "
                         "(each phi_i needs positive t-order)")
    return phi, orders


def check_deform_hypotheses(f: SparsePolynomial, g_list, phi,
                            m: int) -> HypothesisReport:
    """Evaluate the two order conditions of the jet-deformation lemma.

    With v = (ord_t phi_i): the truncated weighted order of f must equal
    the minimal contact order min_i ord_t^m(phi_i * d_i f(phi)), and no g
    may have truncated weighted order below f's.
    """
    phi, v = _check_phi(f, phi, m)
    nu_f = nu_v_m(f, v, m)
    contact = tuple(
        ord_t_m(phi[i] * substitute_series(partial_derivative(f, i), phi))
        for i in range(f.n_vars))
    cond_a = nu_f == min(contact)
    g_orders = []
    for g in g_list:
        if g.n_vars != f.n_vars:
            raise ValueError("g must share f's variables")
        g_orders.append(INFINITY if g.is_zero() else nu_v_m(g, v, m))
    cond_b = all(nu_f <= o for o in g_orders)
    failures = []
    if not cond_a:
        failures.append("min-order equality")
    if not cond_b:
        failures.append("deformation order bound")
    return HypothesisReport(ok=cond_a and cond_b,
                            min_order_equality=cond_a,
                            g_order_bound=cond_b,
                            nu_f=nu_f,
                            contact_orders=contact,
                            g_orders=tuple(g_orders),
                            failures=tuple(failures))


# ---------------------------------------------------------------------------
# the deformation construction


@dataclass(frozen=True)
class JetDeformation:
    """phi corrected by psi_1..psi_D: Phi_i = phi_i + sum_j s^j psi_{j,i}.

    The recorded corrections never drop below the base orders (the
    invariant the construction's proof rests on).
    """

    phi: tuple
    psi: tuple                     # psi[j-1] = n-tuple of series
    s_degree: int
    pivot_index: int

    def __post_init__(self):
        for stage in self.psi:
            for base, corr in zip(self.phi, stage):
                if not ord_t_m(base) <= ord_t_m(corr):
                    raise ValueError(
                        "correction order drops below the base jet order")


def _s_truncate(series: TruncatedSeries, d: int) -> TruncatedSeries:
    out = []
    for c in series.coeffs:
        if isinstance(c, SparsePolynomial):
            out.append(SparsePolynomial(
                c.n_vars,
                {e: v for e, v in c.terms.items() if e[0] <= d}))
        else:
            out.append(c)
    return TruncatedSeries(series.m, out)


def _series_divide(num: TruncatedSeries, den: TruncatedSeries,
                   alpha: int) -> TruncatedSeries:
    """w with den * w = num in Q[t]/(t^{m+1}), den = t^alpha * unit.

    num must vanish to order >= alpha; the coefficients of w above
    t^{m-alpha} are not constrained by the congruence and are set to zero.
    """
    m = num.m
    u = den.coeffs[alpha:]
    rhs = num.coeffs[alpha:]
    w = [Fraction(0)] * (m + 1)
    for k in range(m - alpha + 1):
        acc = rhs[k]
        for l in range(k):
            acc -= u[k - l] * w[l]
        w[k] = acc / u[0]
    return TruncatedSeries(m, w)


def _family_value(f, g_list, args, d):
    """F(args, s) = f(args) + sum_l s^l g_l(args), s-truncated at degree d."""
    total = substitute_series(f, args)
    for l, g in enumerate(g_list, start=1):
        if g.is_zero():
            continue
        s_mono = SparsePolynomial(1, {(l,): Fraction(1)})
        total = total + substitute_series(g, args) * s_mono
    return _s_truncate(total, d)


def deform_jet(f: SparsePolynomial, g_list, phi, m: int,
               D: int) -> JetDeformation:
    """Lift the m-jet phi of f through F = f + sum s^l g_l to s-degree D.

    Stage j cancels the s^j coefficient of F(Phi, s) by a single series
    division against d_{i0}f(phi); the pivot i0 (minimal contact order,
    smallest index on ties) is fixed once.  The finished family is
    re-substituted independently and must vanish identically mod
    (t^{m+1}, s^{D+1}).
    """
    if D < 1:
        raise ValueError("s-degree D must be >= 1")
    g_list = list(g_list)
    report = check_deform_hypotheses(f, g_list, phi, m)
    if not report.ok:
        raise ValueError("deformation hypotheses fail: "
                         + ", ".join(report.failures))
    phi = tuple(phi)
    n = f.n_vars
    contact = report.contact_orders
    best = min(contact)
    i0 = min(i for i in range(n) if contact[i] == best)
    a_series = substitute_series(partial_derivative(f, i0), phi)
    alpha = ord_t_m(a_series)
    assert alpha is not INFINITY

    # promote the base jet into Q[s][t]/(t^{m+1})
    current = [TruncatedSeries(
        m, [SparsePolynomial.constant(1, c) for c in p.coeffs])
        for p in phi]
    zero = TruncatedSeries.zero(m)
    psi_stages = []
    for j in range(1, D + 1):
        value = _family_value(f, g_list, current, j)
        t_j = TruncatedSeries(
            m, [c.coefficient((j,)) for c in value.coeffs])
        stage = [zero] * n
        if not t_j.is_zero():
            if ord_t_m(t_j) < alpha:
                raise ValueError(
                    f"series division obstructed at stage {j}: obstruction "
                    f"order {ord_t_m(t_j)} below divisor order {alpha}")
            w = _series_divide(-t_j, a_series, alpha)
            stage[i0] = w
            s_mono = SparsePolynomial(1, {(j,): Fraction(1)})
            current[i0] = current[i0] + w * s_mono
        psi_stages.append(tuple(stage))

    residual = _family_value(f, g_list, current, D)
    if not residual.is_zero():
        raise AssertionError(
            "internal error: deformation residual is nonzero")
    return JetDeformation(phi=phi, psi=tuple(psi_stages), s_degree=D,
                          pivot_index=i0)


def deformation_residual(f: SparsePolynomial, g_list,
                         deformation: JetDeformation) -> TruncatedSeries:
    """F(Phi, s) mod (t^{m+1}, s^{D+1}), recomputed from scratch.

    Exposed so callers can distrust deform_jet the same way it distrusts
    itself; zero for every deformation it returns.
    """
    m = deformation.phi[0].m
    current = [TruncatedSeries(
        m, [SparsePolynomial.constant(1, c) for c in p.coeffs])
        for p in deformation.phi]
    for j, stage in enumerate(deformation.psi, start=1):
        s_mono = SparsePolynomial(1, {(j,): Fraction(1)})
        for i, w in enumerate(stage):
            if not w.is_zero():
                current[i] = current[i] + w * s_mono
    return _family_value(f, list(g_list), current, deformation.s_degree)


# ---------------------------------------------------------------------------
# serialization


def jet_system_json(system: JetSystem) -> dict:
    names = jet_variable_names(system.n_vars, system.m, system.s_names)
    return {
        "n_vars": system.n_vars,
        "m": system.m,
        "variables": names,
        "equations": [format_polynomial(eq, names)
                      for eq in system.equations],
    }


def jet_system_from_json(data: dict) -> JetSystem:
    names = list(data["variables"])
    n, m = int(data["n_vars"]), int(data["m"])
    if names[:n * (m + 1)] != jet_variable_names(n, m):
        raise ValueError("variable list does not match n_vars and m")
    equations = tuple(parse_polynomial(text, var_names=names)
                      for text in data["equations"])
    return JetSystem(n_vars=n, m=m, equations=equations,
                     s_names=tuple(names[n * (m + 1):]))
