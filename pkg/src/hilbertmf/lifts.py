"""Hilbert modular Fourier expansions and additive lifts.

Expansions are indexed by totally positive nu = (u + v*sqrt(D))/(2*sqrt(D))
in the inverse different, keyed by (u, v), truncated by the trace v, plus a
constant term.  Unit invariance a_{eps0^2 nu} = N(eps0)^weight * a_nu and
symmetric/antisymmetric behaviour under conjugation are detected and checked
on construction.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .qseries import QSeries, bernoulli
from .plusspace import PlusForm
from .quadfield import QuadElem, QuadField, QuadIdeal, get_field, sigma_ideal, zeta_value

Rat = Fraction


class HilbertQExpansion:
    """Trace-truncated Fourier expansion of a Hilbert modular form."""

    __slots__ = ("field", "weight", "const", "coeffs", "trace_prec", "parity", "unit_sign")

    def __init__(
        self,
        field: QuadField,
        weight: int,
        const: Fraction,
        coeffs: dict[tuple[int, int], Fraction],
        trace_prec: int,
        validate: bool = True,
    ):
        if trace_prec < 1:
            raise ValueError("trace_prec >= 1 required")
        D = field.D
        clean: dict[tuple[int, int], Fraction] = {}
        for (u, v), c in coeffs.items():
            c = Fraction(c)
            if c == 0:
                continue
            if v < 1 or u * u >= D * v * v or (u - D * v) % 2:
                raise ValueError(f"key ({u},{v}) is not totally positive in the inverse different")
            if v >= trace_prec:
                continue
            clean[(u, v)] = c
        self.field = field
        self.weight = weight
        self.const = Fraction(const)
        self.coeffs = clean
        self.trace_prec = trace_prec
        self.unit_sign = self._check_unit_invariance() if validate else None
        self.parity = self._detect_parity()

    # -- invariants ------------------------------------------------------

    def _check_unit_invariance(self) -> int | None:
        """Verify a_{eps0^2 nu} = s * a_nu on the window; return s."""
        eps2 = self.field.eps0 ** 2
        a, b = int(eps2.x), int(eps2.y)
        D = self.field.D
        expected = int(self.field.eps0.norm()) ** self.weight
        seen: set[int] = set()
        for (u, v), c in self.coeffs.items():
            u2 = (a * u + b * v * D) // 2
            v2 = (a * v + b * u) // 2
            if v2 >= self.trace_prec:
                continue
            other = self.coeffs.get((u2, v2), Fraction(0))
            if other == c and other != 0:
                seen.add(1)
            elif other == -c and other != 0:
                seen.add(-1)
            elif other != c and other != -c:
                raise ValueError(
                    f"unit invariance violated at nu=({u},{v}): {c} vs {other}"
                )
        if len(seen) > 1:
            raise ValueError("inconsistent unit action signs")
        sign = seen.pop() if seen else expected
        if sign != expected:
            raise ValueError(
                f"unit action sign {sign} contradicts N(eps0)^weight = {expected}"
            )
        return sign

    def _detect_parity(self) -> str:
        sym = antisym = True
        for (u, v), c in self.coeffs.items():
            other = self.coeffs.get((-u, v), Fraction(0))
            if other != c:
                sym = False
            if other != -c:
                antisym = False
        if sym and not antisym:
            return "symmetric"
        if antisym and not sym:
            return "antisymmetric"
        if sym and antisym:
            return "symmetric"  # all mirror pairs vanish
        return "unknown"

    # -- arithmetic --------------------------------------------------------

    def _compat(self, other: "HilbertQExpansion"):
        if self.field != other.field:
            raise ValueError("mixed fields")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            return HilbertQExpansion(
                self.field, self.weight, self.const + other, self.coeffs, self.trace_prec
            )
        self._compat(other)
        if self.weight != other.weight:
            raise ValueError("cannot add different weights")
        tp = min(self.trace_prec, other.trace_prec)
        coeffs = {k: c for k, c in self.coeffs.items() if k[1] < tp}
        for k, c in other.coeffs.items():
            if k[1] < tp:
                coeffs[k] = coeffs.get(k, Fraction(0)) + c
        return HilbertQExpansion(self.field, self.weight, self.const + other.const, coeffs, tp)

    def __sub__(self, other):
        return self + (other * -1 if isinstance(other, HilbertQExpansion) else -other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return HilbertQExpansion(
                self.field,
                self.weight,
                self.const * other,
                {k: c * other for k, c in self.coeffs.items()},
                self.trace_prec,
                validate=False,
            )
        self._compat(other)
        tp = min(self.trace_prec, other.trace_prec)
        const = self.const * other.const
        coeffs: dict[tuple[int, int], Fraction] = {}
        for (u1, v1), c1 in self.coeffs.items():
            if v1 < tp and other.const:
                k = (u1, v1)
                coeffs[k] = coeffs.get(k, Fraction(0)) + c1 * other.const
        for (u2, v2), c2 in other.coeffs.items():
            if v2 < tp and self.const:
                k = (u2, v2)
                coeffs[k] = coeffs.get(k, Fraction(0)) + c2 * self.const
        for (u1, v1), c1 in self.coeffs.items():
            for (u2, v2), c2 in other.coeffs.items():
                v = v1 + v2
                if v < tp:
                    k = (u1 + u2, v)
                    coeffs[k] = coeffs.get(k, Fraction(0)) + c1 * c2
        return HilbertQExpansion(self.field, self.weight + other.weight, const, coeffs, tp)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "HilbertQExpansion":
        if n < 1:
            raise ValueError("positive power required")
        acc = self
        for _ in range(n - 1):
            acc = acc * self
        return acc

    def coeff(self, u: int, v: int) -> Fraction:
        if v >= self.trace_prec:
            raise ValueError(f"trace {v} beyond precision {self.trace_prec}")
        return self.coeffs.get((u, v), Fraction(0))

    def restrict_diagonal(self) -> QSeries:
        """g(tau) = f(tau, tau): sums coefficients along fixed trace."""
        coeffs: dict[int, Fraction] = {}
        if self.const:
            coeffs[0] = self.const
        for (u, v), c in self.coeffs.items():
            coeffs[v] = coeffs.get(v, Fraction(0)) + c
        return QSeries(coeffs, 0, self.trace_prec)

    def proportionality(self, other: "HilbertQExpansion") -> Fraction | None:
        """The scalar r with other = r * self on the common window, or None."""
        self._compat(other)
        tp = min(self.trace_prec, other.trace_prec)
        keys = {k for k in self.coeffs if k[1] < tp} | {k for k in other.coeffs if k[1] < tp}
        pairs = [(self.const, other.const)] + [
            (self.coeffs.get(k, Fraction(0)), other.coeffs.get(k, Fraction(0))) for k in sorted(keys)
        ]
        r = None
        for a, b in pairs:
            if a == 0 and b == 0:
                continue
            if a == 0:
                return None
            if r is None:
                r = b / a
            elif b != r * a:
                return None
        return r

    def __eq__(self, other):
        if not isinstance(other, HilbertQExpansion):
            return NotImplemented
        return (
            self.field == other.field
            and self.const == other.const
            and self.trace_prec == other.trace_prec
            and self.coeffs == other.coeffs
        )

    def __repr__(self):
        return (
            f"HilbertQExpansion(D={self.field.D}, weight={self.weight}, "
            f"{len(self.coeffs)} terms, trace_prec={self.trace_prec}, {self.parity})"
        )

    def to_json(self) -> dict:
        return {
            "D": self.field.D,
            "weight": self.weight,
            "trace_prec": self.trace_prec,
            "const": f"{self.const.numerator}/{self.const.denominator}",
            "coeffs": [
                {"u": u, "v": v, "c": f"{c.numerator}/{c.denominator}"}
                for (u, v), c in sorted(self.coeffs.items(), key=lambda kv: (kv[0][1], kv[0][0]))
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "HilbertQExpansion":
        D = data["D"]
        d = D if D % 4 == 1 else D // 4
        coeffs = {(e["u"], e["v"]): Fraction(e["c"]) for e in data["coeffs"]}
        return cls(get_field(d), data["weight"], Fraction(data["const"]), coeffs, data["trace_prec"])


def doi_naganuma(f: PlusForm, trace_prec: int) -> HilbertQExpansion:
    """Doi-Naganuma lift of a holomorphic plus form of even weight k:
    constant term -(B_k/2k) tilde_c(0), coefficient at nu the divisor sum
    sum_{d | nu} d^{k-1} tilde_c(p nu nu' / d^2)."""
    if f.pole_order:
        raise ValueError("holomorphic form required")
    p = f.p
    k = f.weight
    field = get_field(p)
    needed = p * (trace_prec - 1) ** 2 // 4
    if f.prec <= needed:
        raise ValueError(f"insufficient precision: lift needs coefficients up to q^{needed}")
    const = -bernoulli(k) / (2 * k) * f.tilde_c(0)
    coeffs: dict[tuple[int, int], Fraction] = {}
    for v in range(1, trace_prec):
        bound = math.isqrt(p * v * v)
        for u in range(-bound, bound + 1):
            if u * u >= p * v * v or (u - p * v) % 2:
                continue
            acc = Fraction(0)
            g = math.gcd(abs(u), v)
            for d in range(1, g + 1):
                if g % d:
                    continue
                ud, vd = u // d, v // d
                if (ud - p * vd) % 2:
                    continue  # nu/d leaves the inverse different
                acc += Fraction(d) ** (k - 1) * f.tilde_c((p * vd * vd - ud * ud) // 4)
            if acc:
                coeffs[(u, v)] = acc
    return HilbertQExpansion(field, k, const, coeffs, trace_prec)


def hilbert_eisenstein(field: QuadField, k: int, trace_prec: int) -> HilbertQExpansion:
    """Eisenstein series g_k normalized to constant term 1: the coefficient
    at nu is (4 / zeta_F(1-k)) * sigma_{k-1} of the integral ideal d*nu."""
    if k < 2 or k % 2:
        raise ValueError("even k >= 2 required")
    if not field.class_number_is_one():
        raise ValueError("class number 1 required")
    scale = 4 / zeta_value(field, k)
    D = field.D
    coeffs: dict[tuple[int, int], Fraction] = {}
    for v in range(1, trace_prec):
        bound = math.isqrt(D * v * v)
        for u in range(-bound, bound + 1):
            if u * u >= D * v * v or (u - D * v) % 2:
                continue
            ideal = QuadIdeal.principal(field.elem(u, v))
            coeffs[(u, v)] = scale * sigma_ideal(k - 1, ideal)
    return HilbertQExpansion(field, k, Fraction(1), coeffs, trace_prec)


@lru_cache(maxsize=None)
def gundlach(name: str, trace_prec: int) -> HilbertQExpansion:
    """Generators of the graded algebra of Hilbert modular forms for Q(sqrt 5):
    Eisenstein series g2, g6, g10, the cusp forms s6, s10 (exact linear
    combinations), and the Borcherds products s5, s15."""
    field = get_field(5)
    if name == "g2":
        return hilbert_eisenstein(field, 2, trace_prec)
    if name == "g6":
        return hilbert_eisenstein(field, 6, trace_prec)
    if name == "g10":
        return hilbert_eisenstein(field, 10, trace_prec)
    if name == "s6":
        g2 = gundlach("g2", trace_prec)
        g6 = gundlach("g6", trace_prec)
        return Fraction(67, 2**5 * 3**3 * 5**2) * (g2**3 - g6)
    if name == "s10":
        g2 = gundlach("g2", trace_prec)
        g6 = gundlach("g6", trace_prec)
        g10 = gundlach("g10", trace_prec)
        return Fraction(1, 2**10 * 3**5 * 5**5 * 7) * (
            2**2 * 3 * 7 * 4231 * g2**5 - 5 * 67 * 2293 * g2**2 * g6 + 412751 * g10
        )
    if name in ("s5", "s15"):
        from .borcherds import psi_m

        return psi_m(5, 1 if name == "s5" else 5, trace_prec).expansion
    raise ValueError(f"unknown Gundlach generator {name!r} (D=5 only)")
