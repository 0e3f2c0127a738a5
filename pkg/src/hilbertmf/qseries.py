"""Exact truncated Laurent series in q over Q, plus level-1 building blocks.

A QSeries stores sparse rational coefficients on the window [low, prec):
exponents below `low` are identically zero, exponents at or above `prec` are
unknown.  All arithmetic propagates precision conservatively, so a computed
coefficient is always exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

Rat = Fraction


@lru_cache(maxsize=None)
def bernoulli(k: int) -> Fraction:
    """k-th Bernoulli number, B_1 = -1/2 convention."""
    if k < 0:
        raise ValueError("negative index")
    if k == 0:
        return Fraction(1)
    # sum_{j<=m} C(m+1,j) B_j = 0 for m >= 1
    acc = Fraction(0)
    for j in range(k):
        acc += math.comb(k + 1, j) * bernoulli(j)
    return -acc / (k + 1)


def bernoulli_poly(k: int, x: Fraction) -> Fraction:
    """Bernoulli polynomial B_k(x)."""
    x = Fraction(x)
    return sum(math.comb(k, j) * bernoulli(j) * x ** (k - j) for j in range(k + 1))


def sigma(s: int, n: int) -> int:
    """Divisor sum sigma_s(n) over positive divisors of n."""
    if n <= 0:
        raise ValueError("positive n required")
    total = 0
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            total += d**s
            if d != n // d:
                total += (n // d) ** s
    return total


def _rat(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class QSeries:
    """Sparse Laurent series with exact rational coefficients."""

    __slots__ = ("coeffs", "low", "prec")

    def __init__(self, coeffs: dict[int, Fraction], low: int, prec: int):
        if prec <= low:
            raise ValueError(f"empty window: low={low}, prec={prec}")
        clean = {}
        for e, c in coeffs.items():
            c = _rat(c)
            if c == 0:
                continue
            if e < low or e >= prec:
                raise ValueError(f"exponent {e} outside window [{low}, {prec})")
            clean[e] = c
        self.coeffs = clean
        self.low = low
        self.prec = prec

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, prec: int, low: int = 0) -> "QSeries":
        return cls({}, low, prec)

    @classmethod
    def one(cls, prec: int) -> "QSeries":
        return cls({0: Fraction(1)}, 0, prec)

    @classmethod
    def monomial(cls, c, e: int, prec: int) -> "QSeries":
        return cls({e: _rat(c)}, e, prec)

    # -- access --------------------------------------------------------

    def coeff(self, n: int) -> Fraction:
        if n >= self.prec:
            raise ValueError(f"coefficient of q^{n} beyond precision {self.prec}")
        return self.coeffs.get(n, Fraction(0))

    def __getitem__(self, n: int) -> Fraction:
        return self.coeff(n)

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def valuation(self) -> int:
        """Smallest exponent with nonzero stored coefficient (prec if none)."""
        return min(self.coeffs) if self.coeffs else self.prec

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QSeries({0: _rat(other)}, min(0, self.low), self.prec)
        low = min(self.low, other.low)
        prec = min(self.prec, other.prec)
        coeffs: dict[int, Fraction] = {}
        for e, c in self.coeffs.items():
            if e < prec:
                coeffs[e] = coeffs.get(e, Fraction(0)) + c
        for e, c in other.coeffs.items():
            if e < prec:
                coeffs[e] = coeffs.get(e, Fraction(0)) + c
        return QSeries(coeffs, low, prec)

    def __radd__(self, other):
        return self + other

    def __neg__(self):
        return QSeries({e: -c for e, c in self.coeffs.items()}, self.low, self.prec)

    def __sub__(self, other):
        return self + (-other if isinstance(other, QSeries) else -_rat(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = _rat(other)
            if c == 0:
                return QSeries.zero(self.prec, self.low)
            return QSeries({e: c * v for e, v in self.coeffs.items()}, self.low, self.prec)
        prec = min(self.prec + other.low, other.prec + self.low)
        low = self.low + other.low
        coeffs: dict[int, Fraction] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                if e < prec:
                    coeffs[e] = coeffs.get(e, Fraction(0)) + c1 * c2
        return QSeries(coeffs, low, prec)

    def __rmul__(self, other):
        return self * other

    def invert_unit(self) -> "QSeries":
        """Inverse of a series whose leading coefficient (at low) is a unit."""
        lead = self.coeffs.get(self.low)
        if not lead:
            raise ValueError("non-unit series")
        n = self.prec - self.low
        inv: dict[int, Fraction] = {-self.low: 1 / lead}
        for k in range(1, n):
            acc = Fraction(0)
            for j in range(1, k + 1):
                a = self.coeffs.get(self.low + j)
                if a:
                    b = inv.get(-self.low + k - j)
                    if b:
                        acc += a * b
            if acc:
                inv[-self.low + k] = -acc / lead
        return QSeries(inv, -self.low, self.prec - 2 * self.low)

    def __pow__(self, n: int) -> "QSeries":
        if n < 0:
            return self.invert_unit() ** (-n)
        # repeated squaring; precision propagates through __mul__
        acc = None
        base = self
        k = n
        while k:
            if k & 1:
                acc = base if acc is None else acc * base
            k >>= 1
            if k:
                base = base * base
        if acc is None:
            return QSeries.one(self.prec - self.low)
        return acc

    def shift(self, n: int) -> "QSeries":
        """Multiply by q^n."""
        return QSeries({e + n: c for e, c in self.coeffs.items()}, self.low + n, self.prec + n)

    def truncate(self, prec: int) -> "QSeries":
        if prec > self.prec:
            raise ValueError("cannot extend precision")
        return QSeries({e: c for e, c in self.coeffs.items() if e < prec}, self.low, prec)

    def scale_exponents(self, k: int) -> "QSeries":
        """Substitute q -> q^k (k positive)."""
        if k <= 0:
            raise ValueError("positive scale required")
        return QSeries(
            {e * k: c for e, c in self.coeffs.items()},
            self.low * k,
            (self.prec - 1) * k + 1,
        )

    # -- comparison / io ------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return (self.low, self.prec, self.coeffs) == (other.low, other.prec, other.coeffs)

    def __hash__(self):
        return hash((self.low, self.prec, tuple(sorted(self.coeffs.items()))))

    def agrees_with(self, other: "QSeries") -> bool:
        """Equality of coefficients on the overlap of the two windows."""
        lo = max(self.low, other.low)
        hi = min(self.prec, other.prec)
        if hi <= lo:
            raise ValueError("windows do not overlap")
        return all(self.coeff(e) == other.coeff(e) for e in range(lo, hi))

    def __repr__(self):
        terms = []
        for e in sorted(self.coeffs)[:8]:
            terms.append(f"{self.coeffs[e]}*q^{e}")
        body = " + ".join(terms) if terms else "0"
        return f"QSeries({body} + O(q^{self.prec}))"

    def to_json(self) -> dict:
        return {
            "low": self.low,
            "prec": self.prec,
            "coeffs": {str(e): f"{c.numerator}/{c.denominator}" for e, c in sorted(self.coeffs.items())},
        }

    @classmethod
    def from_json(cls, data: dict) -> "QSeries":
        coeffs = {int(e): Fraction(c) for e, c in data["coeffs"].items()}
        return cls(coeffs, data["low"], data["prec"])


# -- eta quotients and level-1 forms ------------------------------------


def euler_product(scale: int, prec: int) -> QSeries:
    """Prod_{n>=1} (1 - q^{scale*n}) via the pentagonal number theorem."""
    if scale <= 0:
        raise ValueError("non-positive scale")
    coeffs = {0: Fraction(1)}
    k = 1
    while True:
        done = True
        for kk in (k, -k):
            e = scale * kk * (3 * kk - 1) // 2
            if e < prec:
                coeffs[e] = coeffs.get(e, Fraction(0)) + Fraction((-1) ** (k % 2))
                done = False
        if done:
            break
        k += 1
    return QSeries(coeffs, 0, prec)


def eta_quotient(spec: list[tuple[int, int]], prec: int) -> tuple[QSeries, Fraction]:
    """Expand prod_delta (q^{delta/24} prod_{n>=1} (1-q^{delta n}))^{r_delta}.

    Returns (series, fractional_offset): the series carries the integral part
    of the leading exponent, the offset in [0,1) is the leftover fractional
    q-power, kept as separate metadata.
    """
    total = Fraction(0)
    for scale, exponent in spec:
        if scale <= 0:
            raise ValueError("non-positive scale in eta quotient")
        total += Fraction(scale * exponent, 24)
    n0 = math.floor(total)
    offset = total - n0
    work = prec - n0 + 1
    series = QSeries.one(work)
    for scale, exponent in spec:
        series = series * (euler_product(scale, work) ** exponent)
    series = series.shift(n0)
    return series.truncate(min(series.prec, prec)), offset


@lru_cache(maxsize=None)
def eisenstein_series(weight: int, prec: int) -> QSeries:
    """E_w with constant term -B_w/(2w) and coefficient sigma_{w-1}(n)."""
    if weight < 2 or weight % 2:
        raise ValueError("even weight >= 2 required")
    coeffs: dict[int, Fraction] = {0: -bernoulli(weight) / (2 * weight)}
    for n in range(1, prec):
        coeffs[n] = Fraction(sigma(weight - 1, n))
    return QSeries(coeffs, 0, prec)


@lru_cache(maxsize=None)
def eisenstein_normalized(weight: int, prec: int) -> QSeries:
    """E_w normalized to constant term 1."""
    base = eisenstein_series(weight, prec)
    return base * (1 / base.coeff(0))


@lru_cache(maxsize=None)
def delta_series(prec: int) -> QSeries:
    series, offset = eta_quotient([(1, 24)], prec)
    assert offset == 0
    return series


@lru_cache(maxsize=None)
def j_series(prec: int) -> QSeries:
    e4 = eisenstein_normalized(4, prec + 2)
    return (e4**3) * delta_series(prec + 2).invert_unit()


def level1_monomials(weight: int, prec: int) -> list[QSeries]:
    """The monomial basis E4^a E6^b, 4a + 6b = weight, of M_weight(SL2(Z))."""
    if weight == 0:
        return [QSeries.one(prec)]
    if weight < 0:
        return []
    e4 = eisenstein_normalized(4, prec)
    e6 = eisenstein_normalized(6, prec)
    out = []
    for b in range(weight // 6 + 1):
        rem = weight - 6 * b
        if rem % 4 == 0:
            out.append((e4 ** (rem // 4)) * (e6**b))
    return out


def level1_forms(name: str, prec: int, k: int | None = None) -> QSeries:
    """Named level-1 expansions used by the CLI and tests."""
    if prec < 1:
        raise ValueError("prec >= 1 required")
    if name == "E4":
        return eisenstein_series(4, prec)
    if name == "E6":
        return eisenstein_series(6, prec)
    if name == "Delta":
        return delta_series(prec)
    if name == "j":
        return j_series(prec)
    if name == "E_2k":
        if k is None:
            raise ValueError("E_2k requires k")
        return eisenstein_series(2 * k, prec)
    raise ValueError(f"unknown level-1 form {name!r}")
