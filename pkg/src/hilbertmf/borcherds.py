"""Weyl chambers, Weyl vectors, and Borcherds product expansions.

A chamber is described by a basepoint w = (w1, w2) with positive real
coordinates (rational numbers, or field elements positive under the first
embedding, such as the paper's (1/eps0, eps0)).  All positivity and
truncation tests reduce to exact sign computations of elements a + b*sqrt(D).

The product Psi(z, f) = q1^rho q2^rho' prod_{(nu,W)>0} (1 - q1^nu q2^nu')^
{tilde_c(p nu nu')} is expanded with the grading L(nu) = nu w1 + nu' w2,
keeping every monomial with L <= height; the result is certified for all
totally positive exponents rho + mu with L(mu) <= height.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .lifts import HilbertQExpansion
from .plusspace import PlusForm, plus_basis
from .quadfield import QuadElem, QuadField, get_field, _is_square

Rat = Fraction


@dataclass(frozen=True)
class WeylChamber:
    """Connected component of the positive quadrant minus the walls S(m)."""

    field: QuadField
    m_set: frozenset[int]
    w1: QuadElem
    w2: QuadElem

    def pairing_sign(self, lam: QuadElem) -> int:
        """Exact sign of (lambda, W) = lambda*w1 + lambda'*w2."""
        val = lam * self.w1 + lam.conj() * self.w2
        return val.sign()

    def is_positive(self, lam: QuadElem) -> bool:
        return self.pairing_sign(lam) > 0

    def height_le(self, lam: QuadElem, bound: Fraction) -> bool:
        """Whether L(lambda) = lambda*w1 + lambda'*w2 <= bound, exactly."""
        val = lam * self.w1 + lam.conj() * self.w2 - bound
        return val.sign() <= 0

    def min_w(self) -> Fraction:
        """Rational lower bound for min(w1, w2) as real numbers."""
        return min(_real_lower(self.w1), _real_lower(self.w2))

    def max_w(self) -> Fraction:
        return max(_real_upper(self.w1), _real_upper(self.w2))


def _real_lower(x: QuadElem) -> Fraction:
    """Rational lower bound for the first-embedding value of x."""
    isq = Fraction(math.isqrt(x.field.D))
    s = isq if x.y >= 0 else isq + 1
    return (x.x + x.y * s) / 2


def _real_upper(x: QuadElem) -> Fraction:
    isq = Fraction(math.isqrt(x.field.D))
    s = isq + 1 if x.y >= 0 else isq
    return (x.x + x.y * s) / 2


def chamber_of(field: QuadField, m_set, point: tuple) -> WeylChamber:
    """Chamber descriptor for a rational basepoint off all walls of S(m).

    For a rational point the only possible wall through it is the diagonal
    w1 = w2, which lies in S(m) exactly when m is a perfect square.
    """
    w1, w2 = (Fraction(point[0]), Fraction(point[1]))
    if w1 <= 0 or w2 <= 0:
        raise ValueError("basepoint must have positive coordinates")
    m_set = frozenset(int(m) for m in m_set)
    if any(m <= 0 for m in m_set):
        raise ValueError("indices m must be positive")
    if w1 == w2 and any(_is_square(m) for m in m_set):
        raise ValueError("ambiguous chamber: basepoint lies on a wall")
    return WeylChamber(field, m_set, field.elem(2 * w1, 0), field.elem(2 * w2, 0))


def default_chamber(field: QuadField, m_set) -> WeylChamber:
    """The chamber of the off-diagonal basepoint (2, 3); for D = 5 this is
    the chamber containing (1, eps0) for every wall family with index <= 10."""
    return chamber_of(field, m_set, (2, 3))


def _norm_solutions(field: QuadField, m: int) -> list[QuadElem]:
    """Orbit representatives of {lambda in d^-1 : -lambda lambda' = m/D},
    canonicalized modulo multiplication by eps0^2 and sign."""
    D = field.D
    eps = field.eps0
    eps_f = float(eps.x) / 2 + float(eps.y) / 2 * math.sqrt(D)
    bmax = int(2 * eps_f * math.sqrt(m / D)) + 2
    sols = set()
    for b in range(-bmax, bmax + 1):
        a2 = 4 * m + D * b * b
        a = math.isqrt(a2)
        if a * a == a2 and (a - D * b) % 2 == 0:
            sols.add((a, b))
            sols.add((-a, b))
    eps2 = eps**2
    reps: dict[tuple[int, int], QuadElem] = {}
    for a, b in sols:
        lam = QuadElem.from_dual_coords(field, a, b)
        key = _canonical_rep(lam, eps2)
        reps[key] = QuadElem.from_dual_coords(field, *key)
    return list(reps.values())


def _canonical_rep(lam: QuadElem, eps2: QuadElem) -> tuple[int, int]:
    """Deterministic representative of {+-eps0^(2k) lambda}: walk to the
    trace-minimal elements and take the smallest (b^2, b, a) key."""

    def key(x: QuadElem) -> tuple:
        u, v = x.dual_coords()
        return (v * v, v, u)

    candidates = set()
    for start in (lam, -lam):
        x = start
        while True:
            down = x * eps2
            up = x / eps2
            better = min((down, up, x), key=key)
            if key(better) >= key(x):
                break
            x = better
        candidates.add(x)
        candidates.add(-x)
        # include neighbours so flat ties are seen on both sides
        candidates.add(x * eps2)
        candidates.add(x / eps2)
    best = min(candidates, key=key)
    u, v = best.dual_coords()
    return (u, v)


def reduced_set(m: int, chamber: WeylChamber) -> list[QuadElem]:
    """R(m, W): one lambda per unit orbit with (lambda, W) > 0 and
    (eps0^-2 lambda, W) < 0."""
    field = chamber.field
    eps2 = field.eps0 ** 2
    out = []
    for rep in _norm_solutions(field, m):
        lam = rep if rep.sign() > 0 else -rep
        s = chamber.pairing_sign(lam)
        if s == 0:
            raise ValueError("basepoint lies on a wall of S(m)")
        if s > 0:
            while True:
                prev = lam / eps2
                ps = chamber.pairing_sign(prev)
                if ps == 0:
                    raise ValueError("basepoint lies on a wall of S(m)")
                if ps < 0:
                    break
                lam = prev
        else:
            while chamber.pairing_sign(lam) < 0:
                lam = lam * eps2
            if chamber.pairing_sign(lam) == 0:
                raise ValueError("basepoint lies on a wall of S(m)")
        out.append(lam)
    return sorted(out, key=lambda x: x.dual_coords())


def weyl_vector(m: int, chamber: WeylChamber) -> QuadElem:
    """rho_{m,W} = sum over R(m,W) of lambda / (eps0^2 - 1)."""
    field = chamber.field
    denom = field.eps0 ** 2 - 1
    total = field.zero
    for lam in reduced_set(m, chamber):
        total = total + lam / denom
    return total


def local_borcherds_data(
    m: int, chamber: WeylChamber, height_bound
) -> tuple[QuadElem, list[QuadElem]]:
    """Exact data of the local product for T_m^infty: the Weyl vector and all
    lambda with -lambda lambda' = m/D, (lambda, W) > 0, L(lambda) <= bound."""
    bound = Fraction(height_bound)
    rho = weyl_vector(m, chamber)
    eps2 = chamber.field.eps0 ** 2
    lams = []
    for lam in reduced_set(m, chamber):
        x = lam
        while chamber.height_le(x, bound):
            lams.append(x)
            x = x * eps2
        x = -(lam / eps2)
        while chamber.height_le(x, bound):
            lams.append(x)
            x = x / eps2
    return rho, sorted(lams, key=lambda t: t.dual_coords())


@dataclass(frozen=True)
class BorcherdsProduct:
    """Expansion of Psi(z, f) with its weight, divisor and Weyl vector."""

    expansion: HilbertQExpansion
    weight: Fraction
    divisor: tuple[tuple[int, Fraction], ...]  # (m, multiplicity of T_m)
    weyl_vector: QuadElem
    height: Fraction


def _binomials(c: Fraction, imax: int) -> list[Fraction]:
    """(-1)^i binom(c, i) for i = 0..imax."""
    out = [Fraction(1)]
    for i in range(1, imax + 1):
        out.append(out[-1] * (c - (i - 1)) / i * -1)
    return out


def borcherds_product(f: PlusForm, chamber: WeylChamber, height) -> BorcherdsProduct:
    """Expand the Borcherds lift of f in W_0^+(p, chi_p) up to L <= height."""
    height = Fraction(height)
    p = f.p
    field = chamber.field
    if field.D != p:
        raise ValueError("chamber field must have discriminant p")
    if f.weight != 0:
        raise ValueError("weight-0 input required")
    principal = {}
    for n, c in f.series.coeffs.items():
        if n < 0:
            ct = 2 * c if n % p == 0 else c
            if ct.denominator != 1:
                raise ValueError(f"tilde_c({n}) = {ct} is not integral")
            principal[-n] = ct
    missing = set(principal) - set(chamber.m_set)
    if missing:
        raise ValueError(f"chamber lacks wall families for m in {sorted(missing)}")
    weight = f.coeff(0)
    rho = field.zero
    for m, ct in principal.items():
        rho = rho + ct * weyl_vector(m, chamber)

    factors: list[tuple[tuple[int, int], Fraction]] = []
    # totally positive factor exponents, graded by L
    v = 1
    min_w = chamber.min_w()
    while Fraction(v) * min_w <= height:
        bound = math.isqrt(p * v * v)
        for u in range(-bound, bound + 1):
            if u * u >= p * v * v or (u - p * v) % 2:
                continue
            nu = QuadElem.from_dual_coords(field, u, v)
            if not chamber.height_le(nu, height):
                continue
            n = (p * v * v - u * u) // 4
            if n >= f.prec:
                raise ValueError(
                    f"insufficient precision of f: borcherds product needs q^{n}"
                )
            ct = f.tilde_c(n)
            if ct:
                factors.append(((u, v), ct))
        v += 1
    # wall-crossing factors: unit orbits of each polar index m
    for m, ct in principal.items():
        _, lams = local_borcherds_data(m, chamber, height)
        for lam in lams:
            factors.append((lam.dual_coords(), ct))

    D = p

    def l_le(u: int, v: int, bound: Fraction) -> bool:
        return chamber.height_le(QuadElem.from_dual_coords(field, u, v), bound)

    acc: dict[tuple[int, int], Fraction] = {(0, 0): Fraction(1)}
    for (fu, fv), c in factors:
        imax = 0
        while l_le(fu * (imax + 1), fv * (imax + 1), height):
            imax += 1
        bins = _binomials(c, imax)
        new: dict[tuple[int, int], Fraction] = {}
        for (au, av), ac in acc.items():
            for i, bc in enumerate(bins):
                ku, kv = au + i * fu, av + i * fv
                if i and not l_le(ku, kv, height):
                    break
                val = ac * bc
                if val:
                    new[(ku, kv)] = new.get((ku, kv), Fraction(0)) + val
        acc = {k: v2 for k, v2 in new.items() if v2 != 0}

    ru, rv = rho.dual_coords() if not rho.is_zero() else (0, 0)
    const = Fraction(0)
    coeffs: dict[tuple[int, int], Fraction] = {}
    for (au, av), c in acc.items():
        ku, kv = au + ru, av + rv
        if (ku, kv) == (0, 0):
            const = c
        elif kv >= 1 and ku * ku < D * kv * kv:
            coeffs[(ku, kv)] = c
        elif c != 0:
            raise ValueError(
                "nonzero coefficient at a non-totally-positive exponent: "
                "the product is not holomorphic on this window"
            )
    trace_prec = int(height / chamber.max_w()) + 1
    expansion = HilbertQExpansion(field, int(weight), const, coeffs, trace_prec)
    divisor = tuple(sorted((m, ct) for m, ct in principal.items()))
    return BorcherdsProduct(expansion, weight, divisor, rho, height)


def psi_m(p: int, m: int, trace_prec: int, chamber: WeylChamber | None = None) -> BorcherdsProduct:
    """The Borcherds product Psi_m: lift of the basis form f_m."""
    field = get_field(p)
    if chamber is None:
        chamber = default_chamber(field, frozenset({m}))
    height = Fraction(trace_prec) * chamber.max_w()
    min_w = chamber.min_w()
    vmax = int(height / min_w) + 1
    prec = p * vmax * vmax // 4 + 2
    basis = plus_basis(p, m, prec)
    f = next(g for g in basis if g.pole_order == m)
    return borcherds_product(f, chamber, height)
