"""Sparse multivariate polynomials and truncated power series, all exact.

Coefficients are ``fractions.Fraction`` throughout.  The load-bearing pieces
are the weighted orders nu_v / nu_v^m with their INFINITY convention, series
substitution in R[t]/(t^{m+1}) (the coefficient ring R may itself be a
polynomial ring in auxiliary variables), and squarefree analysis of univariate
polynomials via monic Euclid.
"""

from __future__ import annotations

import enum
from fractions import Fraction
from typing import Optional, Sequence


class _Infinity(enum.Enum):
    """The distinguished value ∞ used by truncated orders.

    Compares correctly against rationals from either side; never equal to any
    finite number.
    """

    INFINITY = "INFINITY"

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __repr__(self):
        return "INFINITY"

    __str__ = __repr__


INFINITY = _Infinity.INFINITY


class ParseError(ValueError):
    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


def _coeff(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"coefficient {c!r} is not rational")


class SparsePolynomial:
    """Polynomial in n_vars variables as {exponent tuple: nonzero Fraction}.

    Immutable by convention; equality and hashing are structural.  Variable
    indices are 0-based internally; the text format names them x1..xn.
    """

    __slots__ = ("n_vars", "terms")

    def __init__(self, n_vars: int, terms=None):
        clean = {}
        for exp, c in (terms or {}).items():
            if any(int(e) != e for e in exp):
                raise ValueError(f"non-integer exponent in {exp}")
            exp = tuple(int(e) for e in exp)
            if len(exp) != n_vars or any(e < 0 for e in exp):
                raise ValueError(f"bad exponent vector {exp}")
            c = _coeff(c)
            if c != 0:
                clean[exp] = clean.get(exp, Fraction(0)) + c
        self.n_vars = n_vars
        self.terms = {e: c for e, c in clean.items() if c != 0}

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, n_vars: int, c) -> "SparsePolynomial":
        return cls(n_vars, {(0,) * n_vars: _coeff(c)})

    @classmethod
    def variable(cls, n_vars: int, i: int) -> "SparsePolynomial":
        if not 0 <= i < n_vars:
            raise IndexError(f"variable index {i} out of range")
        exp = tuple(int(j == i) for j in range(n_vars))
        return cls(n_vars, {exp: Fraction(1)})

    @classmethod
    def monomial(cls, n_vars: int, exp: Sequence[int], c=1) -> "SparsePolynomial":
        return cls(n_vars, {tuple(exp): _coeff(c)})

    # -- ring structure ----------------------------------------------------

    def _check_same(self, other):
        if self.n_vars != other.n_vars:
            raise ValueError("n_vars mismatch")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = SparsePolynomial.constant(self.n_vars, other)
        if not isinstance(other, SparsePolynomial):
            return NotImplemented
        self._check_same(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return SparsePolynomial(self.n_vars, terms)

    __radd__ = __add__

    def __neg__(self):
        return SparsePolynomial(self.n_vars,
                                {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = SparsePolynomial.constant(self.n_vars, other)
        if not isinstance(other, SparsePolynomial):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return SparsePolynomial(
                self.n_vars, {e: c * other for e, c in self.terms.items()})
        if not isinstance(other, SparsePolynomial):
            return NotImplemented
        self._check_same(other)
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, Fraction(0)) + c1 * c2
        return SparsePolynomial(self.n_vars, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = SparsePolynomial.constant(self.n_vars, 1)
        base = self
        while k:  # binary powering
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        return (isinstance(other, SparsePolynomial)
                and self.n_vars == other.n_vars
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.n_vars, frozenset(self.terms.items())))

    def __repr__(self):
        return f"SparsePolynomial({self.n_vars}, {format_polynomial(self)!r})"

    def __str__(self):
        return format_polynomial(self)

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, exp) -> Fraction:
        return self.terms.get(tuple(exp), Fraction(0))

    def constant_coefficient(self) -> Fraction:
        return self.terms.get((0,) * self.n_vars, Fraction(0))

    def exponents(self):
        return set(self.terms)

    def used_variables(self) -> set:
        used = set()
        for e in self.terms:
            used.update(i for i, a in enumerate(e) if a > 0)
        return used

    def total_degree(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no degree")
        return max(sum(e) for e in self.terms)

    def is_homogeneous(self) -> bool:
        degs = {sum(e) for e in self.terms}
        return len(degs) <= 1

    def evaluate(self, point: Sequence) -> Fraction:
        if len(point) != self.n_vars:
            raise ValueError("point has wrong length")
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for x, a in zip(point, e):
                if a:
                    v *= Fraction(x) ** a
            total += v
        return total


def partial_derivative(f: SparsePolynomial, i: int) -> SparsePolynomial:
    """d f / d x_i (0-based index)."""
    if not 0 <= i < f.n_vars:
        raise IndexError(f"variable index {i} out of range")
    terms = {}
    for e, c in f.terms.items():
        if e[i] == 0:
            continue
        e2 = e[:i] + (e[i] - 1,) + e[i + 1:]
        terms[e2] = terms.get(e2, Fraction(0)) + c * e[i]
    return SparsePolynomial(f.n_vars, terms)


def set_vars_zero(f: SparsePolynomial, indices) -> SparsePolynomial:
    """Substitute x_i = 0 for every i in indices."""
    idx = set(indices)
    terms = {e: c for e, c in f.terms.items()
             if all(e[i] == 0 for i in idx)}
    return SparsePolynomial(f.n_vars, terms)


def set_var_one(f: SparsePolynomial, i: int) -> SparsePolynomial:
    """Substitute x_i = 1 (exponent coordinate collapses, terms may merge)."""
    terms = {}
    for e, c in f.terms.items():
        e2 = e[:i] + (0,) + e[i + 1:]
        terms[e2] = terms.get(e2, Fraction(0)) + c
    return SparsePolynomial(f.n_vars, terms)


# ---------------------------------------------------------------------------
# weighted orders


class WeightVector(tuple):
    """Tuple of strictly positive rational weights."""

    def __new__(cls, weights):
        ws = tuple(Fraction(w) for w in weights)
        if not ws or any(w <= 0 for w in ws):
            raise ValueError("weights must be positive")
        return super().__new__(cls, ws)


def nu_v(f: SparsePolynomial, v) -> Fraction:
    """Weighted order: min of <v, e> over the exponents of f.

    The zero polynomial has no order; callers that want the ∞ convention use
    nu_v_m or handle the error themselves.
    """
    if f.is_zero():
        raise ValueError("zero polynomial has no weighted order")
    v = WeightVector(v)
    if len(v) != f.n_vars:
        raise ValueError("weight vector has wrong length")
    return min(sum(w * e for w, e in zip(v, exp)) for exp in f.terms)


def nu_v_m(f: SparsePolynomial, v, m):
    """nu_v truncated at level m: values above m collapse to INFINITY."""
    val = nu_v(f, v)
    return val if val <= m else INFINITY


# ---------------------------------------------------------------------------
# truncated series


def _is_zero_elem(c) -> bool:
    if isinstance(c, SparsePolynomial):
        return c.is_zero()
    return c == 0


class TruncatedSeries:
    """Element of R[t]/(t^{m+1}): coefficient list c_0..c_m.

    R is either Q or a SparsePolynomial ring in auxiliary variables; mixing
    promotes rationals to constants of the polynomial ring.
    """

    __slots__ = ("m", "coeffs")

    def __init__(self, m: int, coeffs):
        coeffs = list(coeffs)
        if len(coeffs) != m + 1:
            raise ValueError(f"need {m + 1} coefficients, got {len(coeffs)}")
        n_vars = None
        for c in coeffs:
            if isinstance(c, SparsePolynomial):
                if n_vars is not None and c.n_vars != n_vars:
                    raise ValueError("inconsistent coefficient rings")
                n_vars = c.n_vars
        if n_vars is not None:
            coeffs = [c if isinstance(c, SparsePolynomial)
                      else SparsePolynomial.constant(n_vars, c)
                      for c in coeffs]
        else:
            coeffs = [_coeff(c) for c in coeffs]
        self.m = m
        self.coeffs = coeffs

    @classmethod
    def zero(cls, m: int) -> "TruncatedSeries":
        return cls(m, [Fraction(0)] * (m + 1))

    @classmethod
    def t_power(cls, m: int, k: int, c=1) -> "TruncatedSeries":
        """The series c * t^k (zero if k > m)."""
        coeffs = [Fraction(0)] * (m + 1)
        if 0 <= k <= m:
            coeffs[k] = _coeff(c)
        return cls(m, coeffs)

    def _align(self, other):
        if not isinstance(other, TruncatedSeries):
            raise TypeError("expected TruncatedSeries")
        if self.m != other.m:
            raise ValueError("truncation mismatch")

    def __add__(self, other):
        if isinstance(other, (int, Fraction, SparsePolynomial)):
            other = TruncatedSeries(
                self.m, [other] + [Fraction(0)] * self.m)
        self._align(other)
        return TruncatedSeries(
            self.m, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.m, [-c for c in self.coeffs])

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, SparsePolynomial)):
            other = TruncatedSeries(
                self.m, [other] + [Fraction(0)] * self.m)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, SparsePolynomial)):
            return TruncatedSeries(self.m,
                                   [c * other for c in self.coeffs])
        self._align(other)
        out = [Fraction(0)] * (self.m + 1)
        for i, a in enumerate(self.coeffs):
            if _is_zero_elem(a):
                continue
            for j in range(self.m + 1 - i):
                b = other.coeffs[j]
                if not _is_zero_elem(b):
                    out[i + j] = out[i + j] + a * b
        return TruncatedSeries(self.m, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = TruncatedSeries.t_power(self.m, 0, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries) or self.m != other.m:
            return NotImplemented if not isinstance(other, TruncatedSeries) \
                else False
        return all(_is_zero_elem(a - b)
                   for a, b in zip(self.coeffs, other.coeffs))

    def __repr__(self):
        return f"TruncatedSeries(m={self.m}, coeffs={self.coeffs!r})"

    def is_zero(self) -> bool:
        return all(_is_zero_elem(c) for c in self.coeffs)


def ord_t_m(s: TruncatedSeries):
    """Least k with a nonzero stored coefficient, or INFINITY."""
    for k, c in enumerate(s.coeffs):
        if not _is_zero_elem(c):
            return k
    return INFINITY


def substitute_series(f: SparsePolynomial, args) -> TruncatedSeries:
    """Evaluate f at truncated series, in R[t]/(t^{m+1}).

    A ring homomorphism (exact); each monomial is expanded by binary powering
    on the argument series.
    """
    args = list(args)
    if len(args) != f.n_vars:
        raise ValueError("argument count must match n_vars")
    if not args:
        raise ValueError("need at least one variable")
    m = args[0].m
    for a in args[1:]:
        if a.m != m:
            raise ValueError("truncation mismatch")
    total = TruncatedSeries.zero(m)
    for exp, c in f.terms.items():
        term = TruncatedSeries.t_power(m, 0, c)
        for a, e in zip(args, exp):
            if e:
                term = term * a ** e
        total = total + term
    return total


# ---------------------------------------------------------------------------
# univariate squarefree analysis


def _univariate_data(u: SparsePolynomial):
    """(variable index or None, dense coefficient list c_0..c_d)."""
    used = u.used_variables()
    if len(used) > 1:
        raise ValueError("polynomial is not univariate")
    if u.is_zero():
        raise ValueError("zero polynomial")
    var = used.pop() if used else None
    if var is None:
        return None, [u.constant_coefficient()]
    deg = max(e[var] for e in u.terms)
    coeffs = [Fraction(0)] * (deg + 1)
    for e, c in u.terms.items():
        coeffs[e[var]] = c
    return var, coeffs


def _trim(cs):
    while cs and cs[-1] == 0:
        cs.pop()
    return cs


def _list_div(num, den):
    """Exact division with remainder on dense coefficient lists."""
    num = list(num)
    q = [Fraction(0)] * max(0, len(num) - len(den) + 1)
    while len(_trim(num)) >= len(den):
        shift = len(num) - len(den)
        factor = num[-1] / den[-1]
        q[shift] = factor
        for i, dc in enumerate(den):
            num[shift + i] -= factor * dc
    return q, num


def _list_gcd(a, b):
    """Monic Euclid on dense coefficient lists."""
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        _, r = _list_div(a, b)
        a, b = b, _trim(r)
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def _from_list(n_vars, var, coeffs) -> SparsePolynomial:
    terms = {}
    for k, c in enumerate(coeffs):
        if c != 0:
            exp = [0] * n_vars
            if var is not None:
                exp[var] = k
            terms[tuple(exp)] = terms.get(tuple(exp), Fraction(0)) + c
    return SparsePolynomial(n_vars, terms)


def squarefree_part(u: SparsePolynomial):
    """(u / gcd(u, u'), is_squarefree) for univariate u over Q.

    In characteristic zero the quotient has the same roots as u, each once,
    so is_squarefree just compares degrees.
    """
    var, coeffs = _univariate_data(u)
    if len(coeffs) == 1:
        return u, True
    deriv = [c * k for k, c in enumerate(coeffs)][1:]
    g = _list_gcd(coeffs, deriv)
    q, r = _list_div(coeffs, g)
    assert not _trim(r), "gcd must divide"
    part = _from_list(u.n_vars, var, q)
    return part, len(q) == len(coeffs)


def distinct_root_count(u: SparsePolynomial) -> int:
    """Number of distinct roots of univariate u over the algebraic closure."""
    part, _ = squarefree_part(u)
    if not part.used_variables():
        return 0
    var, coeffs = _univariate_data(part)
    return len(_trim(list(coeffs))) - 1


# ---------------------------------------------------------------------------
# text format


def default_var_names(n_vars: int):
    return [f"x{i + 1}" for i in range(n_vars)]


def format_polynomial(f: SparsePolynomial, var_names=None) -> str:
    """Canonical text form: terms in descending lex order of exponents.

    Format per term: rational coefficient (omitted when ±1 next to a
    variable), then `name^a` factors joined by ` * `.
    """
    if var_names is None:
        var_names = default_var_names(f.n_vars)
    if f.is_zero():
        return "0"
    parts = []
    for exp in sorted(f.terms, reverse=True):
        c = f.terms[exp]
        factors = []
        for i, a in enumerate(exp):
            if a == 1:
                factors.append(var_names[i])
            elif a > 1:
                factors.append(f"{var_names[i]}^{a}")
        mag = abs(c)
        if not factors or mag != 1:
            factors.insert(0, str(mag))
        body = " * ".join(factors)
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts)


def parse_polynomial(text: str, n_vars: Optional[int] = None,
                     var_names=None) -> SparsePolynomial:
    """Parse the CLI polynomial format.

    Terms are separated by + or -; factors are rationals or `name^a` powers,
    optionally joined by `*`.  Whitespace is ignored everywhere.  Errors
    carry the offending position.
    """
    if var_names is None:
        if n_vars is None:
            raise ValueError("need n_vars or var_names")
        var_names = default_var_names(n_vars)
    var_names = list(var_names)
    n = len(var_names)
    if n_vars is not None and n_vars != n:
        raise ValueError("n_vars does not match var_names")
    by_length = sorted(range(n), key=lambda i: -len(var_names[i]))

    pos = 0

    def skip_ws():
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def read_uint():
        nonlocal pos
        start = pos
        while pos < len(text) and text[pos].isdigit():
            pos += 1
        if pos == start:
            raise ParseError("expected integer", start)
        return int(text[start:pos])

    def read_atom():
        # number (possibly a/b) or variable power; None if neither
        nonlocal pos
        skip_ws()
        if pos < len(text) and text[pos].isdigit():
            num = read_uint()
            save = pos
            skip_ws()
            if pos < len(text) and text[pos] == "/":
                pos += 1
                skip_ws()
                den = read_uint()
                if den == 0:
                    raise ParseError("zero denominator", save)
                return Fraction(num, den)
            pos = save
            return Fraction(num)
        for i in by_length:
            name = var_names[i]
            if text.startswith(name, pos):
                pos += len(name)
                save = pos
                skip_ws()
                if pos < len(text) and text[pos] == "^":
                    pos += 1
                    skip_ws()
                    e = read_uint()
                    return (i, e)
                pos = save
                return (i, 1)
        return None

    def read_term():
        nonlocal pos
        coeff = Fraction(1)
        exp = [0] * n
        first = True
        while True:
            skip_ws()
            save = pos
            if not first:
                if pos < len(text) and text[pos] == "*":
                    pos += 1
                    skip_ws()
                    atom = read_atom()
                    if atom is None:
                        raise ParseError("expected factor after '*'", pos)
                else:
                    atom = read_atom()
                    if atom is None:
                        pos = save
                        break
            else:
                atom = read_atom()
                if atom is None:
                    raise ParseError("expected a term", pos)
            if isinstance(atom, Fraction):
                coeff *= atom
            else:
                i, e = atom
                exp[i] += e
            first = False
        return coeff, tuple(exp)

    terms = {}
    skip_ws()
    if pos == len(text):
        raise ParseError("empty input", pos)
    sign = Fraction(1)
    if text[pos] in "+-":
        if text[pos] == "-":
            sign = Fraction(-1)
        pos += 1
    while True:
        c, e = read_term()
        terms[e] = terms.get(e, Fraction(0)) + sign * c
        skip_ws()
        if pos == len(text):
            break
        if text[pos] == "+":
            sign = Fraction(1)
        elif text[pos] == "-":
            sign = Fraction(-1)
        else:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        pos += 1
    return SparsePolynomial(n, terms)
