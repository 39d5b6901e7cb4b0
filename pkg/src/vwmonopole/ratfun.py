"""Exact rational functions in one variable over the rationals.

The variable ``v`` stands for the square root of the refinement variable
``y``; odd powers of v carry half-integer powers of y.  Everything is kept
in a canonical form (monic denominator, numerator and denominator coprime)
so that equality is decidable and usable as a test oracle.

Polynomials are plain tuples of Fractions in ascending exponent order with
no trailing zeros; the zero polynomial is the empty tuple.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm


class PoleAtValue(ArithmeticError):
    """Evaluation point is a zero of the denominator."""


# ---------------------------------------------------------------------------
# dense polynomial helpers (private)

_ZERO = ()
_ONE = (Fraction(1),)


def _trim(c):
    n = len(c)
    while n and not c[n - 1]:
        n -= 1
    return tuple(c[:n])


def _padd(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] += x
    return _trim(out)


def _pneg(a):
    return tuple(-x for x in a)


def _pmul(a, b):
    if not a or not b:
        return _ZERO
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, z in enumerate(b):
                if z:
                    out[i + j] += x * z
    return _trim(out)


def _pdivmod(a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    q = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    db = len(b) - 1
    inv = 1 / b[-1]
    for i in range(len(r) - 1, db - 1, -1):
        c = r[i] * inv
        if c:
            q[i - db] = c
            for j, z in enumerate(b):
                r[i - db + j] -= c * z
    return _trim(q), _trim(r)


def _pgcd(a, b):
    while b:
        a, b = b, _pdivmod(a, b)[1]
    if not a:
        return _ZERO
    inv = 1 / a[-1]
    return tuple(x * inv for x in a)


def _peval(a, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _pshift(a, k: int):
    """Multiply by v^k, k >= 0."""
    if not a:
        return _ZERO
    return (Fraction(0),) * k + tuple(a)


def _pint_scale(a):
    """Smallest positive rational making all coefficients integer."""
    return Fraction(lcm(*(c.denominator for c in a)) if a else 1)


class RationalFunction:
    """Quotient of polynomials in v, canonically normalized."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=_ONE, _normalized=False):
        if _normalized:
            self.num = num
            self.den = den
            return
        num = _trim(num)
        den = _trim(den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            self.num, self.den = _ZERO, _ONE
            return
        g = _pgcd(num, den)
        if len(g) > 1:
            num = _pdivmod(num, g)[0]
            den = _pdivmod(den, g)[0]
        inv = 1 / den[-1]
        self.num = tuple(x * inv for x in num)
        self.den = tuple(x * inv for x in den)

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls):
        return _RF_ZERO

    @classmethod
    def one(cls):
        return _RF_ONE

    @classmethod
    def from_fraction(cls, x) -> "RationalFunction":
        x = Fraction(x)
        if not x:
            return _RF_ZERO
        return cls((x,), _ONE, _normalized=True)

    @classmethod
    def monomial(cls, k: int, coeff=1) -> "RationalFunction":
        """coeff * v^k, any integer k."""
        c = Fraction(coeff)
        if not c:
            return _RF_ZERO
        if k >= 0:
            return cls(_pshift((c,), k), _ONE)
        return cls((c,), _pshift(_ONE, -k))

    @classmethod
    def y_power(cls, k: int, coeff=1) -> "RationalFunction":
        """coeff * y^k with y = v^2."""
        return cls.monomial(2 * k, coeff)

    @classmethod
    def from_y_coeffs(cls, coeffs: dict) -> "RationalFunction":
        """Laurent polynomial in y given as {y-exponent: coefficient}."""
        out = _RF_ZERO
        for k, c in coeffs.items():
            out = out + cls.y_power(k, c)
        return out

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        num = _padd(_pmul(self.num, other.den), _pmul(other.num, self.den))
        return RationalFunction(num, _pmul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(_pneg(self.num), self.den, _normalized=True)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        return RationalFunction(
            _pmul(self.num, other.num), _pmul(self.den, other.den)
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if not other.num:
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction(
            _pmul(self.num, other.den), _pmul(self.den, other.num)
        )

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return (_RF_ONE / self) ** (-n)
        out = _RF_ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def inverse(self) -> "RationalFunction":
        return _RF_ONE / self

    # -- predicates and evaluation ------------------------------------------

    def is_zero(self) -> bool:
        return not self.num

    def is_one(self) -> bool:
        return self.num == _ONE and self.den == _ONE

    def evaluate(self, x) -> Fraction:
        """Exact value at v = x; raises PoleAtValue on a denominator zero."""
        x = Fraction(x)
        d = _peval(self.den, x)
        if not d:
            raise PoleAtValue(f"pole at v = {x}")
        return _peval(self.num, x) / d

    def at_y(self, y) -> Fraction:
        """Value at a rational y that is a perfect square of a rational v."""
        y = Fraction(y)
        v = _fraction_sqrt(y)
        return self.evaluate(v)

    def is_function_of_y(self) -> bool:
        """True iff f(v) == f(-v), i.e. only even v-exponents survive."""
        return self == self.substitute_neg_v()

    def substitute_neg_v(self) -> "RationalFunction":
        flip = lambda p: tuple(c if i % 2 == 0 else -c for i, c in enumerate(p))
        return RationalFunction(flip(self.num), flip(self.den))

    def as_fraction(self) -> Fraction:
        """The constant value, if this is a constant."""
        if not self.num:
            return Fraction(0)
        if len(self.num) == 1 and self.den == _ONE:
            return self.num[0]
        raise ValueError("not a constant rational function")

    # -- comparison / hashing -----------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RationalFunction.from_fraction(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    # -- serialization ------------------------------------------------------

    def to_string(self) -> str:
        """Canonical "p(v)/q(v)" with integer coefficients, ascending."""
        s = _pint_scale(self.num) * _pint_scale(self.den)
        num = tuple(c * s for c in self.num)
        den = tuple(c * s for c in self.den)
        ns = _poly_to_string(num)
        ds = _poly_to_string(den)
        return ns if ds == "1" else f"{ns} / {ds}"

    @classmethod
    def parse(cls, s: str) -> "RationalFunction":
        parts = s.split(" / ")
        if len(parts) == 1:
            return cls(_poly_from_string(parts[0]))
        if len(parts) == 2:
            return cls(_poly_from_string(parts[0]), _poly_from_string(parts[1]))
        raise ValueError(f"cannot parse rational function: {s!r}")

    def __repr__(self):
        return f"RationalFunction({self.to_string()!r})"

    __str__ = to_string


def _coerce(x) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, (int, Fraction)):
        return RationalFunction.from_fraction(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to RationalFunction")


def _fraction_sqrt(y: Fraction) -> Fraction:
    from math import isqrt

    if y < 0:
        raise ValueError("negative y has no rational square root")
    pn, pd = isqrt(y.numerator), isqrt(y.denominator)
    if pn * pn != y.numerator or pd * pd != y.denominator:
        raise ValueError(f"{y} is not a perfect rational square")
    return Fraction(pn, pd)


def _poly_to_string(p) -> str:
    if not p:
        return "0"
    terms = []
    for i, c in enumerate(p):
        if not c:
            continue
        a = abs(c)
        if i == 0:
            body = str(a)
        elif i == 1:
            body = "v" if a == 1 else f"{a}*v"
        else:
            body = f"v^{i}" if a == 1 else f"{a}*v^{i}"
        terms.append(("-" if c < 0 else "+", body))
    sign, body = terms[0]
    out = body if sign == "+" else "-" + body
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def _poly_from_string(s: str):
    s = s.strip()
    if s == "0":
        return _ZERO
    s = s.replace("- ", "+-").replace("+ ", "+").replace(" ", "")
    if s.startswith("-"):
        s = "+-" + s[1:]
    elif not s.startswith("+"):
        s = "+" + s
    coeffs: dict[int, Fraction] = {}
    for tok in s.split("+"):
        if not tok:
            continue
        neg = tok.startswith("-")
        if neg:
            tok = tok[1:]
        if "v" not in tok:
            exp, c = 0, Fraction(tok)
        else:
            head, _, tail = tok.partition("v")
            c = Fraction(head[:-1]) if head else Fraction(1)
            exp = int(tail[1:]) if tail.startswith("^") else 1
        coeffs[exp] = coeffs.get(exp, Fraction(0)) + (-c if neg else c)
    out = [Fraction(0)] * (max(coeffs) + 1)
    for e, c in coeffs.items():
        out[e] = c
    return _trim(out)


_RF_ZERO = RationalFunction(_ZERO, _ONE, _normalized=True)
_RF_ONE = RationalFunction(_ONE, _ONE, _normalized=True)


def ratfun_eval(f: RationalFunction, value) -> Fraction:
    """Exact evaluation of f at y = value (not at v)."""
    return f.at_y(value)
