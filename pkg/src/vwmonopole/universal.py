"""Universal series: closed-form leading factors, extraction, assembly, Z.

The generating series sum_n Q_n(S, beta, y) q^{|n|} factors as a product of
universal series A_N(y), one per Chern-number symbol N.  Taking logs turns
the factorization into a linear system over the extraction basis, whose
Chern-number matrix M is invertible; exponentiating the solved rows gives
the A_N.  The assembled Laurent series A, B, C_ij combine the A_N with the
closed-form leading factor built from quantum integers, and the full
generating series is their SW-weighted product over admissible class
tuples.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .localize import Specialization, compute_Q, q_series
from .puiseux import PuiseuxSeries
from .ratfun import RationalFunction
from .surfaces import (
    AbstractSurface,
    BundleTuple,
    SingularBasis,
    basis_matrix,
    bundle_tuple_from_beta,
    symbols_for_rank,
)


class EmptySum(Warning):
    pass


# ---------------------------------------------------------------------------
# quantum integers and the leading factor


def quantum_integer(i: int) -> RationalFunction:
    """[i]_y = (y^{i/2} - y^{-i/2}) / (y^{1/2} - y^{-1/2}), a Laurent poly in v."""
    if i < 0:
        raise ValueError("quantum integer needs i >= 0")
    out = RationalFunction.zero()
    for j in range(i):
        out = out + RationalFunction.monomial(i - 1 - 2 * j)
    return out


def quantum_binomial(i: int, j: int) -> RationalFunction:
    """[i]! / ([j]! [i-j]!) via the falling product; Laurent polynomial."""
    if not 0 <= j <= i:
        raise ValueError("needs 0 <= j <= i")
    num = RationalFunction.one()
    den = RationalFunction.one()
    for k in range(j):
        num = num * quantum_integer(i - k)
        den = den * quantum_integer(k + 1)
    return num / den


def mu(i: int, k: int, l: int, s: int) -> int:
    """Multiplicity of (t^{i+1} - t^{-i}) b^k b^l in the rank-(s+1) front class."""
    if not (1 <= i <= s and 1 <= k <= l <= s):
        raise ValueError("needs 1 <= i <= s and 1 <= k <= l <= s")
    if k == l:
        return min(i, s - k + 1, k, s - i + 1)
    if l - k <= i < min(l, s - k + 1):
        return -1
    if max(l, s - k + 1) <= i <= s:
        return 1
    return 0


def mu_weight_class(k: int, l: int, s: int):
    """sum_i mu(i,k,l) (t^{i+1} - t^{-i}) as a TorusCharacter."""
    from .characters import TorusCharacter

    out = TorusCharacter.zero()
    for i in range(1, s + 1):
        m = mu(i, k, l, s)
        if m:
            out = out + TorusCharacter({(0, 0, i + 1): m, (0, 0, -i): -m})
    return out


def f_constant_0(rank: int, refined: bool = True):
    """F_0 = (-1)^s / [s+1]: the chi(O)-exponent front constant."""
    s = rank - 1
    if refined:
        return RationalFunction.from_fraction((-1) ** s) / quantum_integer(rank)
    return Fraction((-1) ** s, rank)


def f_constant(k: int, l: int, rank: int, refined: bool = True):
    """F_kl for 1 <= k <= l <= s: the b^k b^l-exponent front constant."""
    s = rank - 1
    if not 1 <= k <= l <= s:
        raise ValueError("needs 1 <= k <= l <= rank-1")
    if refined:
        if k == l:
            sign = (-1) ** (s * k)
            return RationalFunction.from_fraction(sign) / quantum_binomial(rank, k)
        return (quantum_integer(l) * quantum_integer(s + 1 - k)) / (
            quantum_integer(l - k) * quantum_integer(rank)
        )
    if k == l:
        from math import comb

        return Fraction((-1) ** (s * k), comb(rank, k))
    return Fraction(l * (s + 1 - k), (l - k) * rank)


def leading_factor(chi: int, beta_pairings, rank: int, mode: str = "refined"):
    """F = F_0^chi(O) * prod_{k<=l} F_kl^{b^k b^l}.

    beta_pairings maps (k, l) with k <= l to the intersection number
    b^k b^l; only claimed in the SW(beta) != 0 regime.
    """
    refined = mode == "refined"
    out = f_constant_0(rank, refined) ** chi if refined else f_constant_0(rank, False) ** chi
    for (k, l), power in beta_pairings.items():
        if power == 0:
            continue
        out = out * f_constant(k, l, rank, refined) ** power
    return out


def d_shift(beta_pairings, rank: int) -> Fraction:
    """d(beta) = -sum_{i<j} i(r-j)/r b^i b^j - sum_i i(r-i)/(2r) (b^i)^2."""
    total = Fraction(0)
    for (i, j), power in beta_pairings.items():
        if i < j:
            total -= Fraction(i * (rank - j), rank) * power
        else:
            total -= Fraction(i * (rank - i), 2 * rank) * power
    return total


# ---------------------------------------------------------------------------
# extraction


@dataclass
class UniversalSeriesSet:
    rank: int
    n_max: int
    mode: str
    series: dict  # symbol -> PuiseuxSeries

    def __getitem__(self, symbol: str) -> PuiseuxSeries:
        return self.series[symbol]


def _invert_matrix(rows):
    n = len(rows)
    aug = [
        [Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
        for i, row in enumerate(rows)
    ]
    for c in range(n):
        piv = next((r for r in range(c, n) if aug[r][c]), None)
        if piv is None:
            raise SingularBasis("basis matrix is singular")
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [x * inv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


def basis_q_series(rank, n_max, mode, seed=0, workers=1, cache=None):
    """The generating series of every extraction-basis pair, plus (M, basis)."""
    m, basis = basis_matrix(rank)
    series = []
    for surface, betas in basis:
        L = bundle_tuple_from_beta(surface, betas)
        series.append(q_series(L, n_max, mode, seed=seed, workers=workers, cache=cache))
    return m, basis, series

def extract_universal(
    rank: int,
    n_max: int,
    mode: str = "refined",
    seed: int = 0,
    workers: int = 1,
    cache=None,
) -> UniversalSeriesSet:
    """Solve [log series] = M [log A_N] for the universal series A_N."""
    m, basis, series = basis_q_series(rank, n_max, mode, seed, workers, cache)
    logs = [s.log() for s in series]
    m_inv = _invert_matrix(m)
    symbols = symbols_for_rank(rank)
    out = {}
    for row, symbol in zip(m_inv, symbols):
        acc = PuiseuxSeries.zero(n_max + 1)
        for coeff, logser in zip(row, logs):
            if coeff:
                acc = acc + logser.scale(coeff)
        out[symbol] = acc.exp()
    return UniversalSeriesSet(rank=rank, n_max=n_max, mode=mode, series=out)


def predicted_q_series(rank, uset: UniversalSeriesSet, surface, betas) -> PuiseuxSeries:
    """prod_N A_N^{N(S, beta)}: the universality cross-prediction."""
    from .surfaces import chern_vector

    vec = chern_vector(surface, betas)
    out = PuiseuxSeries.one(uset.n_max + 1)
    for symbol, power in zip(symbols_for_rank(rank), vec):
        if power:
            out = out * (uset[symbol] ** power)
    return out


# ---------------------------------------------------------------------------
# assembly of the Laurent series A, B, C_ij


@dataclass
class AssembledSeries:
    rank: int
    mode: str
    A: PuiseuxSeries
    B: PuiseuxSeries
    C: dict  # (i, j) with i <= j -> PuiseuxSeries

    def named(self):
        out = {"A": self.A, "B": self.B}
        for (i, j), s in sorted(self.C.items()):
            out[f"C{i}{j}"] = s
        return out


def assemble(rank: int, uset: UniversalSeriesSet) -> AssembledSeries:
    """A = F_0 A_chi (-1)^(r-1);  B = A_K2;
    C_ij = q^{i(j-r)/r} F_ij A_{bi.bj}          (i < j)
    C_ii = q^{i(i-r)/(2r)} F_ii A_{bi.bi} A_{bi.K}.
    """
    refined = uset.mode == "refined"
    sign = (-1) ** (rank - 1)
    f0 = f_constant_0(rank, refined)
    a = uset["chi"].scale(f0 * sign)
    b = uset["K2"]
    c: dict = {}
    for i in range(1, rank):
        for j in range(i, rank):
            fij = f_constant(i, j, rank, refined)
            if i < j:
                ser = uset[f"b{i}.b{j}"].scale(fij)
                shift = Fraction(i * (j - rank), rank)
            else:
                ser = (uset[f"b{i}.b{i}"] * uset[f"K.b{i}"]).scale(fij)
                shift = Fraction(i * (i - rank), 2 * rank)
            c[(i, j)] = ser.shift(shift)
    return AssembledSeries(rank=rank, mode=uset.mode, A=a, B=b, C=c)


# ---------------------------------------------------------------------------
# the generating series on an abstract surface


def admissible_beta_tuples(surface: AbstractSurface, rank: int, c1):
    """Tuples over the basic classes with c1 = sum_i i b^i mod r, with SW weight."""
    from itertools import product

    c1 = tuple(c1)
    out = []
    classes = [cls for cls, _ in surface.basic_classes]
    for combo in product(classes, repeat=rank - 1):
        residual = [
            c1[t] - sum((i + 1) * b[t] for i, b in enumerate(combo))
            for t in range(len(c1))
        ]
        if all(x % rank == 0 for x in residual):
            sw = 1
            for b in combo:
                sw *= surface.sw(b)
            out.append((combo, sw))
    return out


def evaluate_Z(
    surface: AbstractSurface,
    rank: int,
    c1,
    assembled: AssembledSeries,
):
    """Z = A^chi B^K2 sum_beta SW(b^1)...SW(b^{r-1}) prod C_ij^{b^i b^j}.

    Returns (series, meta); an empty admissible sum yields the zero series
    and meta["empty_sum"] = True.
    """
    tuples = admissible_beta_tuples(surface, rank, c1)
    meta = {
        "surface": surface.name,
        "rank": rank,
        "tuples": len(tuples),
        "empty_sum": not tuples,
        "nonzero_sw_tuples": sum(1 for _, sw in tuples if sw),
    }
    base_order = assembled.A.order
    if not tuples:
        return PuiseuxSeries.zero(base_order), meta
    total = None
    for combo, sw in tuples:
        if sw == 0:
            continue
        term = PuiseuxSeries.one(base_order)
        for i in range(1, rank):
            for j in range(i, rank):
                power = surface.intersect(combo[i - 1], combo[j - 1])
                if power:
                    term = term * (assembled.C[(i, j)] ** power)
        term = term.scale(Fraction(sw))
        total = term if total is None else total + term
    if total is None:
        return PuiseuxSeries.zero(base_order), meta
    out = (assembled.A ** surface.chi) * (assembled.B ** surface.k2) * total
    return out, meta
