"""Exact CM value formulas: the Gross-Zagier singular moduli product and the
Bruinier-Yang formula for CM values of Borcherds products.

The reflex field K~ = F~(sqrt(delta~)) is never constructed explicitly: the
formula only needs, for each prime ideal of F~ = Q(sqrt q), whether it is
split, inert or ramified in K~, which reduces to exact square tests of
delta~ in completions of F~.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import mpmath

from .plusspace import PlusForm
from .qseries import j_series
from .quadfield import (
    QuadElem,
    QuadField,
    QuadIdeal,
    QuadPrime,
    factor_int,
    get_field,
    ideal_factor,
    is_prime,
    is_squarefree,
    kronecker,
)

Rat = Fraction


class NonzeroWeightError(ValueError):
    """The Bruinier-Yang value formula requires constant term c(0) = 0."""


def _divisors(n: int) -> list[int]:
    out = [1]
    for p, e in factor_int(n).items():
        out = [d * p**i for d in out for i in range(e + 1)]
    return sorted(out)


def is_neg_fundamental(d: int) -> bool:
    if d >= 0:
        return False
    if d % 4 == 1:
        return is_squarefree(-d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and is_squarefree(-m)
    return False


@dataclass(frozen=True)
class GenusChar:
    """Genus character data for coprime negative fundamental discriminants."""

    d1: int
    d2: int

    def __post_init__(self):
        if not (is_neg_fundamental(self.d1) and is_neg_fundamental(self.d2)):
            raise ValueError("d1, d2 must be negative fundamental discriminants")
        if math.gcd(self.d1, self.d2) != 1:
            raise ValueError("d1, d2 must be coprime")

    @property
    def D(self) -> int:
        return self.d1 * self.d2


def genus_char(gc: GenusChar, n: int) -> int:
    """epsilon(n) = prod epsilon(l)^a over the factorization of n."""
    if n <= 0:
        raise ValueError("positive n required")
    result = 1
    for ell, a in factor_int(n).items():
        if kronecker(gc.D, ell) == -1:
            raise ValueError(f"epsilon undefined at l={ell}: (D/l) = -1")
        eps = kronecker(gc.d1, ell) if gc.d1 % ell else kronecker(gc.d2, ell)
        result *= eps**a
    return result


@dataclass
class FactoredValue:
    """A rational number given by its prime exponents, with optional sign."""

    sign: int | None
    exponents: dict[int, Fraction]

    def __post_init__(self):
        self.exponents = {
            ell: Fraction(e) for ell, e in sorted(self.exponents.items()) if e != 0
        }

    def log_value(self) -> float:
        return sum(float(e) * math.log(ell) for ell, e in self.exponents.items())

    def abs_value(self) -> Fraction:
        val = Fraction(1)
        for ell, e in self.exponents.items():
            if e.denominator != 1:
                raise ValueError("fractional exponent; no rational value")
            val *= Fraction(ell) ** e
        return val

    def factored_str(self) -> str:
        if not self.exponents:
            body = "1"
        else:
            parts = []
            for ell, e in self.exponents.items():
                if e == 1:
                    parts.append(f"{ell}")
                elif e.denominator == 1:
                    parts.append(f"{ell}^{e}")
                else:
                    parts.append(f"{ell}^({e})")
            body = " * ".join(parts)
        prefix = {1: "+ ", -1: "- ", None: ""}[self.sign]
        return prefix + body

    def to_json(self) -> dict:
        return {
            "log_terms": {str(ell): f"{e.numerator}/{e.denominator}" for ell, e in self.exponents.items()},
            "value": self.factored_str(),
            "sign": {1: "+", -1: "-", None: "unknown"}[self.sign],
        }


def gross_zagier_J2(d1: int, d2: int) -> FactoredValue:
    """J(d1,d2)^2 = +- prod over x^2 + 4 n n' = D of n^epsilon(n')."""
    gc = GenusChar(d1, d2)
    D = gc.D
    exps: dict[int, Fraction] = {}
    for x in range(-math.isqrt(D), math.isqrt(D) + 1):
        rem = D - x * x
        if rem <= 0 or rem % 4:
            continue
        nn = rem // 4
        for n in _divisors(nn):
            eps = genus_char(gc, nn // n)
            for ell, a in factor_int(n).items():
                exps[ell] = exps.get(ell, Fraction(0)) + a * eps
    return FactoredValue(None, exps)


def reduced_forms(d: int) -> list[tuple[int, int, int]]:
    """Reduced positive binary quadratic forms [a, b, c] of discriminant d."""
    if d >= 0:
        raise ValueError("negative discriminant required")
    forms = []
    amax = math.isqrt(-d // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b * b - d) % (4 * a):
                continue
            c = (b * b - d) // (4 * a)
            if c < a:
                continue
            if b < 0 and (abs(b) == a or a == c):
                continue
            forms.append((a, b, c))
    return forms


def j_cm_oracle(d: int, precision_digits: int = 60) -> list[complex]:
    """Numerical values of j at the reduced CM points of discriminant d."""
    if not is_neg_fundamental(d):
        raise ValueError("negative fundamental discriminant required")
    forms = reduced_forms(d)
    values = []
    with mpmath.workdps(precision_digits + 10):
        for a, b, c in forms:
            y_approx = math.sqrt(-d) / (2 * a)
            nterms = int((precision_digits + 15) * math.log(10) / (2 * math.pi * y_approx)) + 40
            series = j_series(nterms)
            tau = (-b + mpmath.sqrt(d)) / (2 * a)
            q = mpmath.exp(2 * mpmath.pi * 1j * tau)
            val = mpmath.mpc(0)
            for n in range(-1, nterms):
                cn = series.coeff(n)
                if cn:
                    val += int(cn) * q**n
            values.append(val)
    return values


# -- Bruinier-Yang ------------------------------------------------------


@dataclass
class CMFieldData:
    """The (F, K, F~, K~) quadruple, with K~ known through delta~ only."""

    p: int
    q: int
    field: QuadField
    delta: QuadElem
    field_tilde: QuadField
    delta_tilde: QuadElem
    rel_disc: QuadPrime
    w_ktilde: int
    _splits: dict = dc_field(default_factory=dict, repr=False)


def _rational_square_root(x: Fraction) -> Fraction | None:
    if x <= 0:
        return None
    rn, rd = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if rn * rn == x.numerator and rd * rd == x.denominator:
        return Fraction(rn, rd)
    return None


def cm_field_setup(p: int, q: int, delta: QuadElem) -> CMFieldData:
    """Build the reflex data for K = F(sqrt(delta)) with d_K = p^2 q."""
    if not (is_prime(p) and p % 4 == 1 and is_prime(q) and q % 4 == 1):
        raise ValueError("p, q must be primes congruent to 1 mod 4")
    field = get_field(p)
    if delta.field != field:
        raise ValueError("delta must lie in Q(sqrt p)")
    if not delta.is_totally_negative():
        raise ValueError("delta must be totally negative")
    s = _rational_square_root(delta.norm() / q)
    if s is None:
        raise ValueError("inconsistent reflex field: N(delta)/q is not a square")
    # d_K = p^2 q requires the relative discriminant of K/F to be the odd
    # squarefree part of (delta), of norm q
    sf_norm = Fraction(1)
    for pr, e in ideal_factor(QuadIdeal.principal(delta)):
        if e % 2:
            sf_norm *= pr.norm()
    if sf_norm != q or not _square_mod4_exists(field, delta):
        raise ValueError(f"d_K != p^2 q for the given delta (squarefree norm {sf_norm})")
    field_tilde = get_field(q)
    delta_tilde = field_tilde.elem(2 * delta.trace(), 4 * s)
    rel = [
        pr
        for pr, e in ideal_factor(QuadIdeal.principal(delta_tilde))
        if pr.ell == p and e % 2
    ]
    if len(rel) != 1 or rel[0].norm() != p:
        raise ValueError("relative discriminant of K~/F~ is not a single prime of norm p")
    w = 10 if p == q == 5 else 2
    return CMFieldData(p, q, field, delta, field_tilde, delta_tilde, rel[0], w)


def _square_mod4_exists(field: QuadField, delta: QuadElem) -> bool:
    """Whether x^2 = delta mod 4 O_F has a solution (so 2 is unramified in K/F)."""
    for sx in range(4):
        for ty in range(4):
            x = field.elem(2 * sx, 0) + ty * field.omega
            if ((x * x - delta) / 4).is_integral():
                return True
    return False


def _uniformizer(field: QuadField, prime: QuadPrime) -> QuadElem:
    """Element of valuation exactly 1 at the prime, valuation 0 at its conjugate."""
    e1, e2 = prime.ideal.basis_elems()
    conj_primes = [
        pr for pr in field.primes_above(prime.ell) if pr != prime
    ]
    for cand in (e2, e1 + e2, e2 + e1 + e1):
        v = QuadIdeal.principal(cand).valuation(prime)
        if v != 1:
            continue
        if conj_primes and QuadIdeal.principal(cand).valuation(conj_primes[0]) != 0:
            continue
        return cand
    raise RuntimeError(f"no uniformizer found for {prime}")


def _lift_root_mod8(field: QuadField, r: int) -> int:
    """Root of the minimal polynomial of omega mod 8 lifting r mod 2."""
    D = field.D
    c0 = D * (D - 1) // 4
    for t in range(r, 8, 2):
        if (t * t - D * t + c0) % 8 == 0:
            return t
    raise RuntimeError("no 2-adic root lift")


def _reduce_deg1(elem: QuadElem, ell_pow: int, root: int) -> int:
    """Image of a field element in Z/ell_pow under omega -> root; denominators
    must be invertible."""
    s, t = elem.module_coords()
    num = s.numerator * t.denominator + t.numerator * s.denominator * root
    den = s.denominator * t.denominator
    if math.gcd(den, ell_pow) != 1:
        raise ValueError("element not integral at this prime")
    return num * pow(den, -1, ell_pow) % ell_pow


def _gf2_square_exists(field: QuadField, elem: QuadElem) -> bool:
    """Brute-force test for x^2 = elem mod 8 O_F (2 inert in the field)."""
    D = field.D
    c0 = D * (D - 1) // 4
    s, t = elem.module_coords()
    den = s.denominator * t.denominator
    inv = pow(den, -1, 8)
    es = s.numerator * t.denominator * inv % 8
    et = t.numerator * s.denominator * inv % 8
    for ws in range(8):
        for wt in range(8):
            rs = (ws * ws - wt * wt * c0) % 8
            rt = (2 * ws * wt + wt * wt * D) % 8
            if rs == es and rt == et:
                return True
    return False


def _splitting(data: CMFieldData, prime: QuadPrime) -> str:
    """Behaviour of a prime of F~ in K~ = F~(sqrt(delta~))."""
    key = (prime.ell, prime.root)
    if key in data._splits:
        return data._splits[key]
    field = data.field_tilde
    if prime == data.rel_disc:
        result = "ramified"
    else:
        v = QuadIdeal.principal(data.delta_tilde).valuation(prime)
        if v % 2:
            raise RuntimeError(f"odd valuation of delta~ at unramified prime {prime}")
        u = data.delta_tilde
        if v:
            pi = _uniformizer(field, prime)
            u = u / pi**v
            # clear conjugate-prime denominators by even uniformizer powers
            conj = [pr for pr in field.primes_above(prime.ell) if pr != prime]
            if conj:
                pic = pi.conj()
                for _ in range(2 * v):
                    s_, t_ = u.module_coords()
                    if s_.denominator % prime.ell and t_.denominator % prime.ell:
                        break
                    u = u * pic * pic
        if prime.ell == 2:
            if prime.f == 1:
                r8 = _lift_root_mod8(field, prime.root)
                result = "split" if _reduce_deg1(u, 8, r8) % 8 == 1 else "inert"
            else:
                result = "split" if _gf2_square_exists(field, u) else "inert"
        elif prime.f == 1:
            val = _reduce_deg1(u, prime.ell, prime.root)
            result = "split" if pow(val, (prime.ell - 1) // 2, prime.ell) == 1 else "inert"
        else:
            result = "split" if _gf2_euler(field, u, prime.ell) else "inert"
    data._splits[key] = result
    return result


def _gf2_euler(field: QuadField, elem: QuadElem, ell: int) -> bool:
    """Euler criterion for a unit in the residue field F_{ell^2}."""
    D = field.D
    c0 = (D * (D - 1) // 4) % ell
    s, t = elem.module_coords()
    den = s.denominator * t.denominator
    inv = pow(den, -1, ell)
    zs = s.numerator * t.denominator * inv % ell
    zt = t.numerator * s.denominator * inv % ell

    def mul(a, b):
        # (a0 + a1 w)(b0 + b1 w) with w^2 = D w - c0
        return (
            (a[0] * b[0] - a[1] * b[1] * c0) % ell,
            (a[0] * b[1] + a[1] * b[0] + a[1] * b[1] * D) % ell,
        )

    result = (1, 0)
    base = (zs, zt)
    e = (ell * ell - 1) // 2
    while e:
        if e & 1:
            result = mul(result, base)
        base = mul(base, base)
        e >>= 1
    return result == (1, 0)


def rho(data: CMFieldData, a: QuadIdeal) -> int:
    """Number of integral ideals of O_K~ with relative norm a."""
    if not a.is_integral():
        return 0
    count = 1
    for prime, e in ideal_factor(a):
        s = _splitting(data, prime)
        if s == "split":
            count *= e + 1
        elif s == "inert":
            if e % 2:
                return 0
        # ramified contributes 1
    return count


def bt(data: CMFieldData, t: QuadElem) -> dict[int, int]:
    """B_t as a map {rational prime l : multiplicity of log l}."""
    if t.is_zero():
        raise ValueError("t must be nonzero")
    t_ideal = QuadIdeal.principal(t)
    td = t_ideal * data.rel_disc.ideal
    if not td.is_integral():
        raise ValueError("t is not in the inverse relative different")
    out: dict[int, int] = {}
    contributing = 0
    for prime, e in ideal_factor(td):
        if _splitting(data, prime) == "split":
            continue
        ord_t = e - (1 if prime == data.rel_disc else 0)
        r = rho(data, td * prime.ideal.inverse())
        if r:
            contributing += 1
            out[prime.ell] = out.get(prime.ell, 0) + (ord_t + 1) * r * prime.f
    if t.sign() * t.conj().sign() < 0 and contributing > 1:
        raise RuntimeError("mixed-sign t with several non-split contributions")
    return out


def by_cm_value(data: CMFieldData, f: PlusForm) -> tuple[dict[int, Fraction], FactoredValue]:
    """log |Psi(CM(K))| = (W_K~/4) sum_m tilde_c(-m) b_m, as exact exponents."""
    if f.weight != 0:
        raise ValueError("weight-0 input required")
    if f.coeff(0) != 0:
        raise NonzeroWeightError("nonzero weight; Petersson-metric variant out of scope")
    p, q = data.p, data.q
    if f.p != p:
        raise ValueError("level mismatch")
    terms: dict[int, Fraction] = {}
    for n, c in f.series.coeffs.items():
        if n < 0:
            ct = 2 * c if n % p == 0 else c
            if ct.denominator != 1:
                raise ValueError(f"tilde_c({n}) not integral")
            terms[-n] = ct
    exps: dict[int, Fraction] = {}
    for m, ct in terms.items():
        bm = _bm(data, m)
        for ell, mult in bm.items():
            exps[ell] = exps.get(ell, Fraction(0)) + Fraction(data.w_ktilde, 4) * ct * mult
    sign = 1 if p == q else None
    value = FactoredValue(sign, exps)
    log_terms = {ell: e for ell, e in value.exponents.items()}
    return log_terms, value


def _bm(data: CMFieldData, m: int) -> dict[int, int]:
    """b_m = sum of B_t over t = (n + m sqrt q)/(2p), |n| < m sqrt(q)."""
    p, q = data.p, data.q
    out: dict[int, int] = {}
    bound = math.isqrt(m * m * q)
    for n in range(-bound, bound + 1):
        if n * n >= m * m * q:
            continue
        t = data.field_tilde.elem(Fraction(n, p), Fraction(m, p))
        td = QuadIdeal.principal(t) * data.rel_disc.ideal
        if not td.is_integral():
            continue
        for ell, mult in bt(data, t).items():
            out[ell] = out.get(ell, 0) + mult
    return out


def prime_bound_check(data: CMFieldData, f: PlusForm) -> tuple[bool, list[int]]:
    """Verify the support bounds: e_l = 0 unless 4pl | m^2 q - n^2 for some
    m with tilde_c(-m) != 0 and |n| < m sqrt(q), and l <= N^2 q / (4p)."""
    p, q = data.p, data.q
    _, value = by_cm_value(data, f)
    ms = [-n for n, c in f.series.coeffs.items() if n < 0 and c != 0]
    if not ms:
        return True, []
    nmax = max(ms)
    bad = []
    for ell in value.exponents:
        if Fraction(nmax * nmax * q, 4 * p) < ell:
            bad.append(ell)
            continue
        ok = any(
            (m * m * q - n * n) % (4 * p * ell) == 0
            for m in ms
            for n in range(-math.isqrt(m * m * q), math.isqrt(m * m * q) + 1)
            if n * n < m * m * q
        )
        if not ok:
            bad.append(ell)
    return not bad, bad
