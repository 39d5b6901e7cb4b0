"""Truncated Laurent/Puiseux series in q with rational exponents.

A series is a finite map {exponent: coefficient} together with a truncation
order O: exponents >= O are unknown, not zero.  Exponents are exact
Fractions whose denominators divide the series' declared ramification D.
Coefficients live in the rational-function field of :mod:`ratfun`.

Ring operations propagate the weakest truncation of the operands, e.g.
multiplication by a series with lowest exponent l keeps information up to
O + l only.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

from .ratfun import RationalFunction

_RF0 = RationalFunction.zero()
_RF1 = RationalFunction.one()


class BadLeadingTerm(ValueError):
    """log requires constant term 1 and no lower terms."""


class BranchMismatch(ValueError):
    """Supplied square root does not square to the leading coefficient."""


class ZeroDivisor(ZeroDivisionError):
    """Division by a series that is zero to its truncation order."""


def _coeff(x) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    return RationalFunction.from_fraction(x)


class PuiseuxSeries:
    """Truncated series sum_e c_e q^e with c_e rational functions in v."""

    __slots__ = ("terms", "order", "ram")

    def __init__(self, terms, order, ram=1):
        order = Fraction(order)
        clean: dict[Fraction, RationalFunction] = {}
        r = ram
        for e, c in terms.items():
            e = Fraction(e)
            c = _coeff(c)
            if c.is_zero() or e >= order:
                continue
            r = lcm(r, e.denominator)
            clean[e] = c
        self.terms = clean
        self.order = order
        self.ram = r

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, order, ram=1):
        return cls({}, order, ram)

    @classmethod
    def one(cls, order, ram=1):
        return cls({Fraction(0): _RF1}, order, ram)

    @classmethod
    def constant(cls, c, order, ram=1):
        return cls({Fraction(0): _coeff(c)}, order, ram)

    @classmethod
    def monomial(cls, c, exponent, order, ram=1):
        return cls({Fraction(exponent): _coeff(c)}, order, ram)

    # -- inspection ----------------------------------------------------------

    def leading(self):
        """(exponent, coefficient) of the lowest term, or None if zero."""
        if not self.terms:
            return None
        e = min(self.terms)
        return e, self.terms[e]

    def coefficient(self, exponent) -> RationalFunction:
        e = Fraction(exponent)
        if e >= self.order:
            raise ValueError(f"coefficient of q^{e} is beyond truncation {self.order}")
        return self.terms.get(e, _RF0)

    def is_zero(self) -> bool:
        return not self.terms

    def support(self):
        return sorted(self.terms)

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction, RationalFunction)):
            other = PuiseuxSeries.constant(other, self.order, self.ram)
        order = min(self.order, other.order)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, _RF0) + c
            if s.is_zero():
                out.pop(e, None)
            else:
                out[e] = s
        return PuiseuxSeries(out, order, lcm(self.ram, other.ram))

    __radd__ = __add__

    def __neg__(self):
        return PuiseuxSeries(
            {e: -c for e, c in self.terms.items()}, self.order, self.ram
        )

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, RationalFunction)):
            other = PuiseuxSeries.constant(other, self.order, self.ram)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "PuiseuxSeries":
        c = _coeff(c)
        return PuiseuxSeries(
            {e: x * c for e, x in self.terms.items()}, self.order, self.ram
        )

    def shift(self, exponent) -> "PuiseuxSeries":
        """Multiply by the monomial q^exponent."""
        a = Fraction(exponent)
        return PuiseuxSeries(
            {e + a: c for e, c in self.terms.items()},
            self.order + a,
            lcm(self.ram, a.denominator),
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, RationalFunction)):
            return self.scale(other)
        la = self._low()
        lb = other._low()
        order = min(self.order + lb, other.order + la)
        out: dict[Fraction, RationalFunction] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = ea + eb
                if e >= order:
                    continue
                s = out.get(e, _RF0) + ca * cb
                if s.is_zero():
                    out.pop(e, None)
                else:
                    out[e] = s
        return PuiseuxSeries(out, order, lcm(self.ram, other.ram))

    __rmul__ = __mul__

    def _low(self) -> Fraction:
        return min(self.terms) if self.terms else self.order

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return PuiseuxSeries.one(self.order - self._low(), self.ram)
        out = None
        base = self
        while True:
            if n & 1:
                out = base if out is None else out * base
            n >>= 1
            if not n:
                return out
            base = base * base

    def truncate(self, order) -> "PuiseuxSeries":
        order = min(Fraction(order), self.order)
        return PuiseuxSeries(
            {e: c for e, c in self.terms.items() if e < order}, order, self.ram
        )

    def map_coefficients(self, fn) -> "PuiseuxSeries":
        return PuiseuxSeries(
            {e: fn(c) for e, c in self.terms.items()}, self.order, self.ram
        )

    # -- division, log, sqrt --------------------------------------------------

    def _normalized(self):
        """Write self = c q^b (1 + t); return (b, c, t)."""
        lead = self.leading()
        if lead is None:
            raise ZeroDivisor("series is zero to its truncation order")
        b, c = lead
        t = PuiseuxSeries(
            {e - b: x / c for e, x in self.terms.items() if e != b},
            self.order - b,
            self.ram,
        )
        return b, c, t

    def inverse(self) -> "PuiseuxSeries":
        """1/self; truncation order drops by twice the leading exponent."""
        b, c, t = self._normalized()
        geo = _geometric(t, lambda k: Fraction((-1) ** k))
        return geo.scale(_RF1 / c).shift(-b)

    def div(self, other: "PuiseuxSeries") -> "PuiseuxSeries":
        return self * other.inverse()

    def log(self) -> "PuiseuxSeries":
        lead = self.leading()
        if lead is None or lead[0] != 0 or not lead[1].is_one():
            raise BadLeadingTerm("log needs constant term 1 and no lower terms")
        t = self - 1
        return _geometric(t, lambda k: Fraction((-1) ** (k + 1), k) if k else Fraction(0))

    def exp(self) -> "PuiseuxSeries":
        """exp of a series with strictly positive support."""
        if self.terms and min(self.terms) <= 0:
            raise BadLeadingTerm("exp needs strictly positive exponents")
        fact = [Fraction(1)]

        def inv_factorial(k):
            while len(fact) <= k:
                fact.append(fact[-1] * len(fact))
            return 1 / fact[k]

        return _geometric(self, inv_factorial)

    def sqrt(self, leading_root) -> "PuiseuxSeries":
        b, c, t = self._normalized()
        root = _coeff(leading_root)
        if root * root != c:
            raise BranchMismatch("leading_root^2 differs from the leading coefficient")
        half = _binomial_series(t, Fraction(1, 2))
        return half.scale(root).shift(b / 2)

    # -- comparison, congruence, serialization --------------------------------

    def __eq__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        order = min(self.order, other.order)
        a = {e: c for e, c in self.terms.items() if e < order}
        b = {e: c for e, c in other.terms.items() if e < order}
        return a == b

    def __hash__(self):
        return hash((tuple(sorted(self.terms.items())), self.order))

    def congruent(self, other: "PuiseuxSeries", modulus_exponent):
        """Multiplicative congruence: self/other in 1 + q^N * (coefficients).

        Returns (ok, first_mismatch) where first_mismatch is None or a dict
        with the offending exponent and the ratio coefficient found there.
        """
        n = Fraction(modulus_exponent)
        ratio = self.div(other)
        if ratio.order < n:
            raise ValueError(
                f"series only determined mod q^{ratio.order}, cannot test mod q^{n}"
            )
        for e in ratio.support():
            c = ratio.terms[e]
            if e == 0 and c.is_one():
                continue
            if e < n:
                return False, {"exponent": e, "ratio_coefficient": c}
        if ratio.coefficient(0) != _RF1:
            lead = ratio.leading()
            return False, {"exponent": lead[0], "ratio_coefficient": lead[1]}
        return True, None

    def to_json(self):
        return {
            "order": [self.order.numerator, self.order.denominator],
            "ramification": self.ram,
            "terms": [
                [e.numerator, e.denominator, c.to_string()]
                for e, c in sorted(self.terms.items())
            ],
        }

    @classmethod
    def from_json(cls, data) -> "PuiseuxSeries":
        order = Fraction(data["order"][0], data["order"][1])
        terms = {
            Fraction(n, d): RationalFunction.parse(s) for n, d, s in data["terms"]
        }
        return cls(terms, order, data.get("ramification", 1))

    def __repr__(self):
        bits = [f"({c}) q^{e}" for e, c in sorted(self.terms.items())[:6]]
        if len(self.terms) > 6:
            bits.append("...")
        body = " + ".join(bits) if bits else "0"
        return f"<PuiseuxSeries {body} + O(q^{self.order})>"


def _geometric(t: PuiseuxSeries, coeff_fn) -> "PuiseuxSeries":
    """sum_k coeff_fn(k) t^k for a series t with positive support."""
    if t.terms and min(t.terms) <= 0:
        raise BadLeadingTerm("series tail must have positive exponents")
    out = PuiseuxSeries.constant(coeff_fn(0), t.order, t.ram)
    if t.is_zero():
        return out
    low = min(t.terms)
    kmax = int(t.order / low) + 1
    power = PuiseuxSeries.one(t.order, t.ram)
    for k in range(1, kmax + 1):
        power = power * t
        c = coeff_fn(k)
        if c:
            out = out + power.scale(c)
        if power.is_zero():
            break
    return out


def _binomial_series(t: PuiseuxSeries, alpha: Fraction) -> "PuiseuxSeries":
    def binom(k):
        num = Fraction(1)
        for i in range(k):
            num *= (alpha - i) / (i + 1)
        return num

    return _geometric(t, binom)


def series_log(s: PuiseuxSeries) -> PuiseuxSeries:
    return s.log()


def series_exp(s: PuiseuxSeries) -> PuiseuxSeries:
    return s.exp()


def series_sqrt(s: PuiseuxSeries, leading_root) -> PuiseuxSeries:
    return s.sqrt(leading_root)


def series_div(a: PuiseuxSeries, b: PuiseuxSeries) -> PuiseuxSeries:
    return a.div(b)
