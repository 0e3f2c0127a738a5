"""Real quadratic fields: elements, units, ideals, and special zeta values.

Elements of F = Q(sqrt(d)) are stored as (x + y*sqrt(D))/2 with rational x, y
and D the field discriminant; ideals as 2-generator Z-modules in Hermite
normal form with respect to the basis (1, omega), omega = (D + sqrt(D))/2.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from ._linalg import solve_unique
from .qseries import QSeries, level1_monomials, sigma

Rat = Fraction


def factor_int(n: int) -> dict[int, int]:
    """Prime factorization by trial division (desk-scale inputs only)."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 5
    while f * f <= n:
        for p in (f, f + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        f += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_prime(n: int) -> bool:
    return n > 1 and factor_int(n) == {n: 1}


def is_squarefree(n: int) -> bool:
    return all(e == 1 for e in factor_int(n).values())


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n)."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    sign = 1
    if n < 0:
        n = -n
        if a < 0:
            sign = -1
    t = 0
    while n % 2 == 0:
        n //= 2
        t += 1
    if t:
        if a % 2 == 0:
            return 0
        if t % 2 and a % 8 in (3, 5):
            sign = -sign
    a %= n
    result = sign
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _sqrt_sign(a: Fraction, b: Fraction, d: int) -> int:
    """Exact sign of a + b*sqrt(d) for rational a, b and non-square d > 0."""
    if b == 0:
        return (a > 0) - (a < 0)
    if a == 0:
        return 1 if b > 0 else -1
    if a > 0 and b > 0:
        return 1
    if a < 0 and b < 0:
        return -1
    if a > 0:  # b < 0
        return 1 if a * a > b * b * d else -1
    return 1 if b * b * d > a * a else -1


def _pell_cf(d: int) -> tuple[int, int, int]:
    """Fundamental solution of x^2 - d y^2 = +-1 from the continued fraction
    of sqrt(d); returns (x, y, norm)."""
    a0 = math.isqrt(d)
    if a0 * a0 == d:
        raise ValueError("d must be non-square")
    m, q, a = 0, 1, a0
    p_prev, p_cur = 1, a0
    q_prev, q_cur = 0, 1
    while True:
        m = q * a - m
        q = (d - m * m) // q
        a = (a0 + m) // q
        if a == 2 * a0 and q == 1:
            break
        p_prev, p_cur = p_cur, a * p_cur + p_prev
        q_prev, q_cur = q_cur, a * q_cur + q_prev
    return p_cur, q_cur, p_cur * p_cur - d * q_cur * q_cur


def _icbrt(n: int) -> int:
    """Integer cube root by Newton iteration (handles huge inputs)."""
    if n < 0:
        raise ValueError
    if n == 0:
        return 0
    x = 1 << ((n.bit_length() + 2) // 3)
    while True:
        y = (2 * x + n // (x * x)) // 3
        if y >= x:
            break
        x = y
    while x**3 > n:
        x -= 1
    while (x + 1) ** 3 <= n:
        x += 1
    return x


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        quo = old_r // r
        old_r, r = r, old_r - quo * r
        old_s, s = s, old_s - quo * s
        old_t, t = t, old_t - quo * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


class QuadField:
    """Real quadratic field Q(sqrt(d)) for squarefree d > 1."""

    def __init__(self, d: int):
        if d <= 1 or not is_squarefree(d):
            raise ValueError("d must be squarefree and > 1")
        self.d = d
        self.D = d if d % 4 == 1 else 4 * d
        self._eps0: QuadElem | None = None
        self._h1: bool | None = None

    def __repr__(self):
        return f"QuadField(d={self.d})"

    def __eq__(self, other):
        return isinstance(other, QuadField) and other.d == self.d

    def __hash__(self):
        return hash(("QuadField", self.d))

    def elem(self, x, y) -> "QuadElem":
        return QuadElem(self, Fraction(x), Fraction(y))

    @property
    def zero(self) -> "QuadElem":
        return self.elem(0, 0)

    @property
    def one(self) -> "QuadElem":
        return self.elem(2, 0)

    @property
    def omega(self) -> "QuadElem":
        """(D + sqrt(D))/2; (1, omega) is a Z-basis of O_F."""
        return self.elem(self.D, 1)

    @property
    def sqrtD(self) -> "QuadElem":
        return self.elem(0, 2)

    @property
    def eps0(self) -> "QuadElem":
        """Fundamental unit > 1 of O_F."""
        if self._eps0 is None:
            self._eps0 = self._fundamental_unit()
        return self._eps0

    def _fundamental_unit(self) -> "QuadElem":
        x1, y1, norm = _pell_cf(self.d)
        if self.d % 4 != 1:
            return self.elem(2 * x1, y1)
        # u = x1 + y1*sqrt(d) generates the units of Z[sqrt(d)] mod sign;
        # the unit group of O_F is at most 3 times larger, so test eps^3 = u.
        u = self.elem(2 * x1, 2 * y1)
        scale = 10**30
        sq = math.isqrt(self.d * scale * scale)
        u_scaled = x1 * scale + y1 * sq
        c = _icbrt(u_scaled * scale * scale)
        if c:
            t_scaled = c + norm * scale * scale // c
            x = (t_scaled + scale // 2) // scale
            rem = x * x - 4 * norm
            if rem > 0 and rem % self.D == 0:
                ysq = rem // self.D
                y = math.isqrt(ysq)
                if y * y == ysq and (x - self.D * y) % 2 == 0:
                    cand = self.elem(x, y)
                    if cand**3 == u:
                        return cand
        return u

    def primes_above(self, ell: int) -> list["QuadPrime"]:
        """Prime ideals of O_F above the rational prime ell."""
        if not is_prime(ell):
            raise ValueError(f"{ell} is not prime")
        D = self.D
        ch = kronecker(D, ell)
        if ch == -1:
            ideal = QuadIdeal.from_elements(self, [self.elem(2 * ell, 0)])
            return [QuadPrime(self, ell, 2, False, None, ideal)]
        c0 = D * (D - 1) // 4
        roots = sorted({r for r in range(ell) if (r * r - D * r + c0) % ell == 0})
        if ch == 0:
            roots = roots[:1]
        result = []
        for r in roots:
            gen = self.omega - r
            ideal = QuadIdeal.from_elements(self, [self.elem(2 * ell, 0), gen])
            result.append(QuadPrime(self, ell, 1, ch == 0, r, ideal))
        return result

    def class_number_is_one(self) -> bool:
        """Check h(F) = 1 by testing principality up to the Minkowski bound."""
        if self._h1 is None:
            bound = math.isqrt(self.D) // 2 + 1
            self._h1 = all(
                pr.ideal.is_principal()
                for ell in range(2, bound + 1)
                if is_prime(ell)
                for pr in self.primes_above(ell)
                if pr.norm() <= bound
            )
        return self._h1


@lru_cache(maxsize=None)
def get_field(d: int) -> QuadField:
    """Shared QuadField instances (caches units and class-number checks)."""
    return QuadField(d)


class QuadElem:
    """Element (x + y*sqrt(D))/2 of a real quadratic field."""

    __slots__ = ("field", "x", "y")

    def __init__(self, field: QuadField, x: Fraction, y: Fraction):
        self.field = field
        self.x = Fraction(x)
        self.y = Fraction(y)

    @classmethod
    def from_dual_coords(cls, field: QuadField, u: int, v: int) -> "QuadElem":
        """The element (u + v*sqrt(D)) / (2*sqrt(D)) of the inverse different."""
        return cls(field, Fraction(v), Fraction(u, field.D))

    def dual_coords(self) -> tuple[int, int]:
        u = self.y * self.field.D
        v = self.x
        if u.denominator != 1 or v.denominator != 1:
            raise ValueError(f"{self!r} is not in the inverse different")
        return int(u), int(v)

    def _coerce(self, other):
        if isinstance(other, int):
            return self.field.elem(2 * other, 0)
        if isinstance(other, Fraction):
            return self.field.elem(2 * other, 0)
        if isinstance(other, QuadElem):
            if self.field != other.field:
                raise ValueError("mixed fields")
            return other
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadElem(self.field, self.x + o.x, self.y + o.y)

    __radd__ = __add__

    def __neg__(self):
        return QuadElem(self.field, -self.x, -self.y)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuadElem(self.field, self.x * other, self.y * other)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        D = self.field.D
        x = (self.x * o.x + D * self.y * o.y) / 2
        y = (self.x * o.y + self.y * o.x) / 2
        return QuadElem(self.field, x, y)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuadElem(self.field, self.x / other, self.y / other)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError
        return self * o.conj() / n

    def __pow__(self, n: int):
        if n < 0:
            return (self.field.one / self) ** (-n)
        acc = self.field.one
        base = self
        while n:
            if n & 1:
                acc = acc * base
            base = base * base
            n >>= 1
        return acc

    def conj(self) -> "QuadElem":
        return QuadElem(self.field, self.x, -self.y)

    def trace(self) -> Fraction:
        return self.x

    def norm(self) -> Fraction:
        return (self.x * self.x - self.field.D * self.y * self.y) / 4

    def sign(self) -> int:
        return _sqrt_sign(self.x, self.y, self.field.D)

    def is_positive(self) -> bool:
        return self.sign() > 0

    def is_totally_positive(self) -> bool:
        return self.sign() > 0 and self.conj().sign() > 0

    def is_totally_negative(self) -> bool:
        return self.sign() < 0 and self.conj().sign() < 0

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def is_integral(self) -> bool:
        return (
            self.x.denominator == 1
            and self.y.denominator == 1
            and (self.x - self.field.D * self.y) % 2 == 0
        )

    def module_coords(self) -> tuple[Fraction, Fraction]:
        """Coordinates (s, t) with self = s + t*omega."""
        return (self.x - self.y * self.field.D) / 2, self.y

    @classmethod
    def from_module_coords(cls, field: QuadField, s, t) -> "QuadElem":
        s, t = Fraction(s), Fraction(t)
        return cls(field, 2 * s + t * field.D, t)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.y == 0 and self.x == 2 * Fraction(other)
        return (
            isinstance(other, QuadElem)
            and self.field == other.field
            and self.x == other.x
            and self.y == other.y
        )

    def __hash__(self):
        return hash((self.field.d, self.x, self.y))

    def __repr__(self):
        return f"({self.x}+{self.y}*sqrt{self.field.D})/2"


class QuadIdeal:
    """Fractional ideal of O_F, stored as (1/den) * (Z*a + Z*(b + c*omega))."""

    __slots__ = ("field", "den", "a", "b", "c")

    def __init__(self, field: QuadField, den: int, a: int, b: int, c: int):
        if den <= 0 or a <= 0 or c <= 0:
            raise ValueError("invalid HNF data")
        g = math.gcd(math.gcd(a, b), math.gcd(c, den))
        self.field = field
        self.den = den // g
        self.a = a // g
        self.b = (b // g) % (a // g)
        self.c = c // g

    @classmethod
    def from_elements(cls, field: QuadField, gens: list[QuadElem]) -> "QuadIdeal":
        """O_F-module generated by the given field elements."""
        pairs: list[tuple[Fraction, Fraction]] = []
        omega = field.omega
        for g in gens:
            if not g.is_zero():
                pairs.append(g.module_coords())
                pairs.append((g * omega).module_coords())
        if not pairs:
            raise ValueError("zero ideal")
        den = 1
        for s, t in pairs:
            den = den * s.denominator // math.gcd(den, s.denominator)
            den = den * t.denominator // math.gcd(den, t.denominator)
        ints = [(int(s * den), int(t * den)) for s, t in pairs]
        c = 0
        bs = 0
        for s, t in ints:
            if t == 0:
                continue
            if c == 0:
                c, bs = abs(t), (s if t > 0 else -s)
            else:
                g, u, v = _xgcd(c, t)
                bs, c = u * bs + v * s, g
        if c == 0:
            raise ValueError("generators span a rank-1 module, not an ideal")
        a = 0
        for s, t in ints:
            a = math.gcd(a, s - (t // c) * bs)
        if a == 0:
            raise ValueError("generators span a rank-1 module, not an ideal")
        return cls(field, den, abs(a), bs, c)

    @classmethod
    def principal(cls, gen: QuadElem) -> "QuadIdeal":
        return cls.from_elements(gen.field, [gen])

    @classmethod
    def ring_of_integers(cls, field: QuadField) -> "QuadIdeal":
        return cls(field, 1, 1, 0, 1)

    def basis_elems(self) -> tuple[QuadElem, QuadElem]:
        f = self.field
        e1 = QuadElem.from_module_coords(f, Fraction(self.a, self.den), 0)
        e2 = QuadElem.from_module_coords(f, Fraction(self.b, self.den), Fraction(self.c, self.den))
        return e1, e2

    def norm(self) -> Fraction:
        return Fraction(self.a * self.c, self.den * self.den)

    def contains(self, elem: QuadElem) -> bool:
        s, t = elem.module_coords()
        s, t = s * self.den, t * self.den
        if s.denominator != 1 or t.denominator != 1:
            return False
        if int(t) % self.c:
            return False
        return (int(s) - (int(t) // self.c) * self.b) % self.a == 0

    def is_integral(self) -> bool:
        e1, e2 = self.basis_elems()
        return e1.is_integral() and e2.is_integral()

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QuadIdeal.principal(self.field.elem(2 * Fraction(other), 0))
        elif isinstance(other, QuadElem):
            other = QuadIdeal.principal(other)
        e1, e2 = self.basis_elems()
        f1, f2 = other.basis_elems()
        return QuadIdeal.from_elements(self.field, [e1 * f1, e1 * f2, e2 * f1, e2 * f2])

    __rmul__ = __mul__

    def conj(self) -> "QuadIdeal":
        e1, e2 = self.basis_elems()
        return QuadIdeal.from_elements(self.field, [e1.conj(), e2.conj()])

    def inverse(self) -> "QuadIdeal":
        n = self.norm()
        e1, e2 = self.conj().basis_elems()
        return QuadIdeal.from_elements(self.field, [e1 / n, e2 / n])

    def __pow__(self, n: int) -> "QuadIdeal":
        if n < 0:
            return self.inverse() ** (-n)
        acc = QuadIdeal.ring_of_integers(self.field)
        base = self
        while n:
            if n & 1:
                acc = acc * base
            base = base * base
            n >>= 1
        return acc

    def __eq__(self, other):
        return (
            isinstance(other, QuadIdeal)
            and self.field == other.field
            and (self.den, self.a, self.b, self.c) == (other.den, other.a, other.b, other.c)
        )

    def __hash__(self):
        return hash((self.field.d, self.den, self.a, self.b, self.c))

    def __repr__(self):
        return f"QuadIdeal(1/{self.den} <{self.a}, {self.b}+{self.c}w>)"

    def valuation(self, prime: "QuadPrime") -> int:
        """Valuation of this fractional ideal at a prime ideal."""
        numerator = self * self.den  # integral part
        v = 0
        cur = numerator
        inv = prime.ideal.inverse()
        while True:
            nxt = cur * inv
            if not nxt.is_integral():
                break
            cur = nxt
            v += 1
        e = 2 if prime.ramified else 1
        vden = 0
        k = self.den
        while k % prime.ell == 0:
            k //= prime.ell
            vden += 1
        return v - e * vden

    def is_principal(self) -> bool:
        """Search for a generator of matching norm, bounded via the unit."""
        if not self.is_integral():
            raise ValueError("integral ideal expected")
        n = int(self.norm())
        eps = self.field.eps0
        eps_f = float(eps.x) / 2 + float(eps.y) / 2 * math.sqrt(self.field.D)
        ybound = int(2 * math.sqrt(n * eps_f / self.field.D)) + 2
        for y in range(ybound + 1):
            for s in (4 * n, -4 * n):
                x2 = self.field.D * y * y + s
                if x2 < 0:
                    continue
                x = math.isqrt(x2)
                if x * x != x2:
                    continue
                for cand in (self.field.elem(x, y), self.field.elem(x, -y)):
                    if cand.is_zero() or not cand.is_integral():
                        continue
                    if QuadIdeal.principal(cand) == self:
                        return True
        return False


class QuadPrime:
    """Prime ideal of O_F with residue data."""

    __slots__ = ("field", "ell", "f", "ramified", "root", "ideal")

    def __init__(self, field, ell, f, ramified, root, ideal):
        self.field = field
        self.ell = ell
        self.f = f
        self.ramified = ramified
        self.root = root  # omega = root mod this prime, for degree-1 primes
        self.ideal = ideal

    def norm(self) -> int:
        return self.ell**self.f

    def __eq__(self, other):
        return isinstance(other, QuadPrime) and self.ideal == other.ideal

    def __hash__(self):
        return hash(("QuadPrime", self.ideal))

    def __repr__(self):
        kind = "ramified" if self.ramified else ("inert" if self.f == 2 else "split")
        return f"QuadPrime({self.ell}, {kind}, root={self.root})"


def fundamental_unit(d: int) -> QuadElem:
    """Fundamental unit of Q(sqrt(d)), from the continued fraction of sqrt(d)."""
    return get_field(d).eps0


def enum_tp_dual(field: QuadField, trace_bound: int) -> list[QuadElem]:
    """All nu in the inverse different with nu >> 0 and tr(nu) <= bound, plus 0.

    Coordinatized as nu = (u + v*sqrt(D))/(2*sqrt(D)): trace v, the
    integrality condition is u = D v mod 2, total positivity is u^2 < D v^2.
    """
    if trace_bound < 0:
        raise ValueError("trace_bound >= 0 required")
    out = [field.zero]
    D = field.D
    for v in range(1, trace_bound + 1):
        bound = math.isqrt(D * v * v)
        for u in range(-bound, bound + 1):
            if u * u < D * v * v and (u - D * v) % 2 == 0:
                out.append(QuadElem.from_dual_coords(field, u, v))
    return out


def ideal_factor(ideal: QuadIdeal) -> list[tuple[QuadPrime, int]]:
    """Factorization of a nonzero fractional ideal over prime ideals."""
    field = ideal.field
    candidates = set(factor_int(ideal.a * ideal.c))
    if ideal.den > 1:
        candidates |= set(factor_int(ideal.den))
    out = []
    for ell in sorted(candidates):
        for pr in field.primes_above(ell):
            v = ideal.valuation(pr)
            if v:
                out.append((pr, v))
    check = Fraction(1)
    for pr, v in out:
        check *= Fraction(pr.norm()) ** v
    if check != abs(ideal.norm()):
        raise RuntimeError("ideal factorization norm mismatch")
    return out


def sigma_ideal(s: int, ideal: QuadIdeal) -> Fraction:
    """sigma_s of an integral ideal: sum of N(c)^s over integral divisors c."""
    if not ideal.is_integral():
        raise ValueError("non-integral ideal")
    if not ideal.field.class_number_is_one():
        raise ValueError("class number 1 required for ideal divisor sums")
    total = Fraction(1)
    for pr, e in ideal_factor(ideal):
        n = pr.norm()
        total *= sum(Fraction(n) ** (s * i) for i in range(e + 1))
    return total


def _is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def is_fundamental_discriminant(D: int) -> bool:
    if D <= 1:
        return False
    if D % 4 == 1:
        return is_squarefree(D) and not _is_square(D)
    if D % 4 == 0:
        d = D // 4
        return d % 4 in (2, 3) and is_squarefree(d)
    return False


def siegel_zeta(D: int, k: int) -> Fraction:
    """zeta_F(1-k) for k in {2,4}: Siegel's finite divisor-sum formula."""
    if not is_fundamental_discriminant(D):
        raise ValueError(f"{D} is not a real quadratic field discriminant")
    if k not in (2, 4):
        raise ValueError("k must be 2 or 4")
    total = Fraction(0)
    for x in range(-math.isqrt(D), math.isqrt(D) + 1):
        if x * x < D and (D - x * x) % 4 == 0:
            total += sigma(k - 1, (D - x * x) // 4)
    return total / (60 if k == 2 else 120)


def zeta_value(field: QuadField, k: int) -> Fraction:
    """zeta_F(1-k) for even k >= 2.

    k = 2, 4 use Siegel's closed formula.  For larger k the diagonal
    restriction of the weight-k Eisenstein series is a level-1 form of weight
    2k whose higher coefficients are explicit ideal divisor sums; matching
    finitely many coefficients determines the constant term, hence the zeta
    value (class number 1 required).
    """
    if k % 2 or k < 2:
        raise ValueError("even k >= 2 required")
    if k in (2, 4):
        return siegel_zeta(field.D, k)
    if not field.class_number_is_one():
        raise ValueError("class number 1 required")
    dim = len(level1_monomials(2 * k, 2))
    prec = dim + 4
    monos = level1_monomials(2 * k, prec)
    avals = {n: Fraction(0) for n in range(1, prec)}
    for nu in enum_tp_dual(field, prec - 1):
        if nu.is_zero():
            continue
        u, v = nu.dual_coords()
        gen = field.elem(u, v)  # sqrt(D) * nu generates the integral ideal d*nu
        avals[int(nu.trace())] += sigma_ideal(k - 1, QuadIdeal.principal(gen))
    rows = [[mono.coeff(n) for mono in monos] for n in range(1, dim + 1)]
    sol = solve_unique(rows, [avals[n] for n in range(1, dim + 1)])
    for n in range(dim + 1, prec):
        if sum(s * mono.coeff(n) for s, mono in zip(sol, monos)) != avals[n]:
            raise RuntimeError("restriction does not match a level-1 form")
    const = sum(s * mono.coeff(0) for s, mono in zip(sol, monos))
    return 4 * const
