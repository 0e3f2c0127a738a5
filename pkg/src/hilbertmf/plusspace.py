"""The Hecke plus space for prime level p = 1 mod 4.

Provides the Eisenstein series G_k, H_k, E_k^+/-, the bilinear pairing into
level-1 forms, and the weakly holomorphic basis f_m of the weight-0 plus
space for p in {5, 13, 17}.

Basis construction: a weakly holomorphic candidate with pole order <= p*b at
infinity is written as C / Delta(p tau)^b with C holomorphic of weight 12*b,
level Gamma_0(p) and character chi_p.  The space of such C is spanned by
products of G_k, H_k with level-1 monomials (achieved span is rank-checked at
run time); prescribing the principal part and the plus-space condition on an
initial coefficient window gives an exact, overdetermined linear system whose
unique solution is f_m.  Higher pole orders come from multiplying by j(p tau)
and eliminating lower basis elements.  For p = 5 every produced basis element
is checked against its published expansion before being returned.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from ._linalg import rref, solve_unique
from .qseries import QSeries, bernoulli_poly, delta_series, j_series, level1_monomials

Rat = Fraction

SUPPORTED_P = (5, 13, 17)  # primes with trivial S_2^+(p, chi_p)


def chi_p(p: int, n: int) -> int:
    """Legendre symbol (n/p) for p an odd prime."""
    n %= p
    if n == 0:
        return 0
    r = pow(n, (p - 1) // 2, p)
    return 1 if r == 1 else -1


def generalized_bernoulli(k: int, p: int) -> Fraction:
    """B_{k,chi_p} = p^{k-1} sum_a chi(a) B_k(a/p); p = 1 gives plain B_k."""
    if p == 1:
        return bernoulli_poly(k, Fraction(1))
    return Fraction(p) ** (k - 1) * sum(
        chi_p(p, a) * bernoulli_poly(k, Fraction(a, p)) for a in range(1, p + 1)
    )


def dirichlet_L_value(p: int, k: int) -> Fraction:
    """L(1-k, chi_p) = -B_{k,chi_p}/k for even k >= 2."""
    if k < 2 or k % 2:
        raise ValueError("even k >= 2 required")
    return -generalized_bernoulli(k, p) / k


@dataclass(frozen=True)
class PlusForm:
    """A q-series tagged with weight and level, satisfying the plus condition."""

    series: QSeries
    weight: int
    p: int
    plus_flag: bool = True

    def __post_init__(self):
        if self.plus_flag:
            bad = [
                n
                for n, c in self.series.coeffs.items()
                if c != 0 and chi_p(self.p, n) == -1
            ]
            if bad:
                raise ValueError(f"plus condition violated at exponents {sorted(bad)}")

    @property
    def pole_order(self) -> int:
        v = self.series.valuation
        return -v if v < 0 else 0

    @property
    def prec(self) -> int:
        return self.series.prec

    def coeff(self, n: int) -> Fraction:
        return self.series.coeff(n)

    def tilde_c(self, n: int) -> Fraction:
        """Coefficient doubled at indices divisible by p."""
        c = self.series.coeff(n)
        return 2 * c if n % self.p == 0 else c

    def __add__(self, other: "PlusForm") -> "PlusForm":
        if (self.p, self.weight) != (other.p, other.weight):
            raise ValueError("incompatible plus forms")
        return PlusForm(self.series + other.series, self.weight, self.p)

    def __sub__(self, other: "PlusForm") -> "PlusForm":
        return self + (other * -1)

    def __mul__(self, scalar) -> "PlusForm":
        return PlusForm(self.series * scalar, self.weight, self.p)

    __rmul__ = __mul__

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "weight": self.weight,
            "series": self.series.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "PlusForm":
        return cls(QSeries.from_json(data["series"]), data["weight"], data["p"])


@lru_cache(maxsize=None)
def eisenstein_G(p: int, k: int, prec: int) -> QSeries:
    """G_k = 1 + (2/L(1-k,chi_p)) sum_n sum_{d|n} d^{k-1} chi_p(d) q^n."""
    scale = 2 / dirichlet_L_value(p, k)
    coeffs = {0: Fraction(1)}
    for n in range(1, prec):
        acc = 0
        for d in range(1, n + 1):
            if n % d == 0:
                acc += d ** (k - 1) * chi_p(p, d)
        if acc:
            coeffs[n] = scale * acc
    return QSeries(coeffs, 0, prec)


@lru_cache(maxsize=None)
def eisenstein_H(p: int, k: int, prec: int) -> QSeries:
    """H_k = sum_n sum_{d|n} d^{k-1} chi_p(n/d) q^n."""
    coeffs: dict[int, Fraction] = {}
    for n in range(1, prec):
        acc = 0
        for d in range(1, n + 1):
            if n % d == 0:
                acc += d ** (k - 1) * chi_p(p, n // d)
        if acc:
            coeffs[n] = Fraction(acc)
    return QSeries(coeffs, 0, prec)


@lru_cache(maxsize=None)
def eisenstein_plus(p: int, k: int, sign: int, prec: int) -> PlusForm:
    """E_k^{+-} = 1 + (2/L) sum_n sum_{d|n} d^{k-1}(chi(d) +- chi(n/d)) q^n."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    series = eisenstein_G(p, k, prec) + sign * (2 / dirichlet_L_value(p, k)) * eisenstein_H(p, k, prec)
    return PlusForm(series, k, p, plus_flag=(sign == 1))


def pairing(f: PlusForm, g: PlusForm) -> QSeries:
    """<f, g>(n) = sum_m tilde_c_f(m) c_g(p*n - m): a level-1 form of weight
    f.weight + g.weight, computed to the largest exactly-known precision."""
    if f.p != g.p:
        raise ValueError("pairing requires equal levels")
    p = f.p
    fs, gs = f.series, g.series
    low = -((-(fs.low + gs.low)) // p)  # ceil division
    prec_f_limited = (gs.low + fs.prec - 1) // p + 1
    prec_g_limited = (fs.low + gs.prec - 1) // p + 1
    prec = min(prec_f_limited, prec_g_limited)
    if prec <= low:
        limiting = "f" if prec_f_limited <= prec_g_limited else "g"
        raise ValueError(f"insufficient precision for pairing: increase prec of {limiting}")
    coeffs: dict[int, Fraction] = {}
    for n in range(low, prec):
        acc = Fraction(0)
        for m, c in fs.coeffs.items():
            idx = p * n - m
            if gs.low <= idx < gs.prec:
                b = gs.coeffs.get(idx)
                if b:
                    acc += (2 * c if m % p == 0 else c) * b
        if acc:
            coeffs[n] = acc
    return QSeries(coeffs, low, prec)


def obstruction_check(p: int, principal_part: dict[int, Fraction]) -> tuple[bool, Fraction]:
    """Whether a principal part extends to a weight-0 plus form; also the
    forced constant term -(1/2) sum tilde_c(n) B_2^+(-n)."""
    if p not in SUPPORTED_P:
        raise ValueError(f"p={p} unsupported: S_2^+ is nontrivial or p invalid")
    for n, c in principal_part.items():
        if n >= 0:
            raise ValueError("principal part must be supported on n < 0")
        if c != 0 and chi_p(p, n) == -1:
            raise ValueError(f"support at n={n} violates the plus condition")
    if not principal_part:
        return True, Fraction(0)
    depth = max(-n for n in principal_part)
    e2 = eisenstein_plus(p, 2, 1, depth + 1)
    const = Fraction(0)
    for n, c in principal_part.items():
        ct = 2 * c if n % p == 0 else c
        const -= Fraction(1, 2) * ct * e2.coeff(-n)
    # S_2^+(p, chi_p) = 0 for supported p, so the obstruction is vacuous
    return True, const


# -- weakly holomorphic basis -------------------------------------------


_GOLDEN_P5: dict[int, dict[int, Fraction]] = {
    1: {-1: 1, 0: 5, 1: 11, 4: -54, 5: 55, 6: 44, 9: -395, 10: 340, 11: 296, 14: -1836},
    4: {-4: 1, 0: 15, 1: -216, 4: 4959, 5: 22040, 6: -90984, 9: 409944, 10: 1388520},
    5: {-5: Fraction(1, 2), 0: 15, 1: 275, 4: 27550, 5: 43893, 6: 255300, 9: 4173825},
    6: {-6: 1, 0: 10, 1: 264, 4: -136476, 5: 306360, 6: 616220, 9: -35408776},
    9: {-9: 1, 0: 35, 1: -3555, 4: 922374, 5: 7512885, 6: -53113164, 9: 953960075},
    10: {-10: Fraction(1, 2), 0: 10, 1: 3400, 4: 3471300, 5: 9614200, 6: 91620925},
}


def _chi_generators(p: int, prec: int) -> list[tuple[int, QSeries]]:
    gens = []
    for k in (2, 4, 6):
        gens.append((k, eisenstein_G(p, k, prec)))
        gens.append((k, eisenstein_H(p, k, prec)))
    return gens


def _chi_pool(p: int, weight: int, prec: int) -> list[QSeries]:
    """Products spanning M_weight(Gamma_0(p), chi_p): an odd number of G/H
    factors filled up with level-1 monomials."""
    pool: list[QSeries] = []
    # single chi-factor of any even weight up to the target
    for k in range(2, weight + 1, 2):
        for mono in level1_monomials(weight - k, prec):
            pool.append(eisenstein_G(p, k, prec) * mono)
            pool.append(eisenstein_H(p, k, prec) * mono)
    # triple chi-factors of small weights
    gens = _chi_generators(p, prec)
    for combo in itertools.combinations_with_replacement(range(len(gens)), 3):
        s = sum(gens[i][0] for i in combo)
        if s > weight:
            continue
        for mono in level1_monomials(weight - s, prec):
            prod = mono
            for i in combo:
                prod = prod * gens[i][1]
            pool.append(prod)
    return pool


def _independent_subset(series_list: list[QSeries], lo: int, hi: int) -> list[int]:
    """Indices of a maximal Q-linearly-independent subset on the window."""
    rows: list[list[Fraction]] = []
    picked: list[int] = []
    for i, s in enumerate(series_list):
        vec = [s.coeff(n) for n in range(lo, hi)]
        test = rows + [vec]
        red, pivots = rref(test)
        if len(pivots) == len(test):
            rows = test
            picked.append(i)
    return picked


def _seed_form(p: int, m: int, prec: int) -> QSeries:
    """The unique f_m for pole order m <= p, solved through Delta(p tau)^b."""
    last_err: Exception | None = None
    for extra in range(3):
        b = -((-m) // p) + extra  # ceil(m/p) + extra
        try:
            return _seed_form_at(p, m, b, prec)
        except ValueError as err:
            last_err = err
    raise RuntimeError(f"seed construction failed for p={p}, m={m}: {last_err}")


def _seed_form_at(p: int, m: int, b: int, prec: int) -> QSeries:
    pb = p * b
    n_work = prec + 2 * pb + 8
    pool = _chi_pool(p, 12 * b, n_work)
    picked = _independent_subset(pool, 0, min(n_work, 3 * pb + 30))
    basis = [pool[i] for i in picked]
    dpb = delta_series(n_work).scale_exponents(p) ** b
    inv = dpb.invert_unit()
    cands = [c * inv for c in basis]
    bcheck = min(c.prec for c in cands)
    target_lead = Fraction(1, 2) if m % p == 0 else Fraction(1)
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for n in range(-pb, 0):
        rows.append([c.coeff(n) for c in cands])
        rhs.append(target_lead if n == -m else Fraction(0))
    for n in range(1, bcheck):
        if chi_p(p, n) == -1:
            rows.append([c.coeff(n) for c in cands])
            rhs.append(Fraction(0))
    x = solve_unique(rows, rhs)
    out = QSeries.zero(bcheck, -pb)
    for xi, c in zip(x, cands):
        if xi:
            out = out + xi * c
    return out.truncate(min(out.prec, prec))


_BASIS_CACHE: dict[tuple[int, int, int], list[PlusForm]] = {}


def plus_basis(p: int, m_max: int, prec: int) -> list[PlusForm]:
    """The basis forms f_m (m <= m_max, chi_p(m) != -1) of the weight-0
    weakly holomorphic plus space, exact through q^(prec-1)."""
    if p not in SUPPORTED_P:
        raise ValueError(f"p={p} unsupported (need trivial S_2^+, p in {SUPPORTED_P})")
    if m_max < 1:
        raise ValueError("m_max >= 1 required")
    key = (p, m_max, prec)
    if key in _BASIS_CACHE:
        return _BASIS_CACHE[key]
    work = max(prec, 16)
    ms = [m for m in range(1, m_max + 1) if chi_p(p, m) != -1]
    max_steps = max((m - 1) // p for m in ms)
    seed_prec = work + p * max_steps
    jp = None
    if max_steps:
        jp = j_series(seed_prec // p + 2).scale_exponents(p)
    built: dict[int, QSeries] = {}
    for m in ms:
        if m <= p:
            built[m] = _seed_form(p, m, seed_prec)
        else:
            h = built[m - p] * jp
            for mp in range(m - 1, 0, -1):
                if -mp < h.low:
                    break
                c = h.coeff(-mp)
                if c == 0:
                    continue
                if chi_p(p, mp) == -1:
                    raise RuntimeError(f"ladder violated plus condition at -{mp}")
                h = h - (c / built[mp].coeff(-mp)) * built[mp]
            lead = Fraction(1, 2) if m % p == 0 else Fraction(1)
            if h.coeff(-m) != lead:
                raise RuntimeError(f"ladder normalization failed at m={m}")
            built[m] = h
    if p == 5:
        for m, golden in _GOLDEN_P5.items():
            if m in built:
                got = built[m]
                for n, c in golden.items():
                    if n < got.prec and got.coeff(n) != c:
                        raise RuntimeError(
                            f"golden gate: f_{m} coefficient q^{n} is "
                            f"{got.coeff(n)}, published value {c}"
                        )
    out = []
    for m in ms:
        s = built[m]
        out.append(PlusForm(s.truncate(min(s.prec, prec)), 0, p))
    _BASIS_CACHE[key] = out
    return out
