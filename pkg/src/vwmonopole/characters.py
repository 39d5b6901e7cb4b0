"""Equivariant character calculus at torus-fixed points.

A TorusCharacter is a finite integer-multiplicity multiset of weights
(a, b, c): (a, b) lives in the character lattice of the surface torus and
c is the exponent of the Higgs C*-character t.  Chart weights substitute
q_k = chi^{w_k}, so a monomial box (i, j) of a partition contributes the
character i*w1 + j*w2 of the corresponding monomial function.

The Hom-deficiency vertex V_{lam,mu} is the chart-local finite character of
Gamma(U, O) - RHom_U(I_lam, I_mu); twisting by a line bundle multiplies it
by the bundle's local generator character.
"""

from __future__ import annotations

from functools import lru_cache

from .fixedpoints import Partition
from .surfaces import BundleTuple, EquivariantLineBundle, canonical_bundle


class TorusCharacter:
    """Finite map (a, b, c) -> multiplicity, zero entries never stored."""

    __slots__ = ("weights",)

    def __init__(self, weights=None):
        w = {}
        if weights:
            for key, mult in weights.items():
                if mult:
                    w[key] = mult
        self.weights = w

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def line(cls, a: int, b: int, c: int, mult: int = 1):
        return cls({(a, b, c): mult})

    def rank(self) -> int:
        return sum(self.weights.values())

    def items(self):
        return sorted(self.weights.items())

    def __bool__(self):
        return bool(self.weights)

    def __eq__(self, other):
        return isinstance(other, TorusCharacter) and self.weights == other.weights

    def __hash__(self):
        return hash(tuple(sorted(self.weights.items())))

    def __add__(self, other):
        out = dict(self.weights)
        for k, m in other.weights.items():
            n = out.get(k, 0) + m
            if n:
                out[k] = n
            else:
                out.pop(k, None)
        return TorusCharacter._raw(out)

    def __neg__(self):
        return TorusCharacter._raw({k: -m for k, m in self.weights.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        """Convolution product of characters."""
        out: dict = {}
        for (a1, b1, c1), m1 in self.weights.items():
            for (a2, b2, c2), m2 in other.weights.items():
                k = (a1 + a2, b1 + b2, c1 + c2)
                n = out.get(k, 0) + m1 * m2
                if n:
                    out[k] = n
                else:
                    out.pop(k, None)
        return TorusCharacter._raw(out)

    def twist(self, a: int, b: int, c: int):
        """Multiply by the single character chi^(a,b) t^c."""
        return TorusCharacter._raw(
            {(x + a, y + b, z + c): m for (x, y, z), m in self.weights.items()}
        )

    def bar_surface(self):
        """Invert the surface-torus part: (a, b, c) -> (-a, -b, c)."""
        return TorusCharacter._raw(
            {(-a, -b, c): m for (a, b, c), m in self.weights.items()}
        )

    def t_exponent_range(self):
        cs = [c for (_, _, c) in self.weights]
        return (min(cs), max(cs)) if cs else (0, 0)

    @classmethod
    def _raw(cls, weights: dict):
        obj = cls.__new__(cls)
        obj.weights = weights
        return obj

    def __repr__(self):
        bits = [f"{m}*({a},{b};{c})" for (a, b, c), m in self.items()]
        return "TorusCharacter{" + ", ".join(bits) + "}"


def partition_character(lam: Partition) -> TorusCharacter:
    """Q_lam = sum over boxes (i, j) of q1^i q2^j, all t-exponents zero."""
    out: dict = {}
    for i, row in enumerate(lam):
        for j in range(row):
            out[(i, j, 0)] = 1
    return TorusCharacter._raw(out)


@lru_cache(maxsize=None)
def hom_vertex(lam: Partition, mu: Partition) -> TorusCharacter:
    """V_{lam,mu} = Q_mu + bar(Q_lam)/(q1 q2) - Q_mu bar(Q_lam)(1-1/q1)(1-1/q2).

    Finite character of rank |lam| + |mu|; for lam = mu = (1) it is the
    tangent character q1^-1 + q2^-1 of the Hilbert scheme of one point.
    """
    q_mu = partition_character(mu)
    q_lam_bar = partition_character(lam).bar_surface()
    envelope = TorusCharacter(
        {(0, 0, 0): 1, (-1, 0, 0): -1, (0, -1, 0): -1, (-1, -1, 0): 1}
    )
    return q_mu + q_lam_bar.twist(-1, -1, 0) - (q_mu * q_lam_bar * envelope)


@lru_cache(maxsize=None)
def _vertex_at_chart(lam: Partition, mu: Partition, w1, w2) -> TorusCharacter:
    """V_{lam,mu}(q1, q2) with q_k = chi^{w_k} substituted; c stays 0."""
    v = hom_vertex(lam, mu)
    out: dict = {}
    for (p, q, _), m in v.weights.items():
        key = (p * w1[0] + q * w2[0], p * w1[1] + q * w2[1], 0)
        n = out.get(key, 0) + m
        if n:
            out[key] = n
        else:
            out.pop(key, None)
    return TorusCharacter._raw(out)


def _deficiency(surface, li, lj, twist_weights, fixed_point, i, j):
    out = TorusCharacter.zero()
    for idx, (w1, w2) in enumerate(surface.charts):
        lam = fixed_point[i][idx]
        mu = fixed_point[j][idx]
        if not lam and not mu:
            continue
        mi = li.weights[idx]
        mj = lj.weights[idx]
        mt = twist_weights[idx]
        v = _vertex_at_chart(lam, mu, w1, w2)
        out = out + v.twist(mj[0] - mi[0] + mt[0], mj[1] - mi[1] + mt[1], 0)
    return out


def deficiency_class(
    li: EquivariantLineBundle,
    lj: EquivariantLineBundle,
    twist: EquivariantLineBundle,
    fixed_point,
    i: int,
    j: int,
) -> TorusCharacter:
    """H_ij(M) = sum_sigma chi^{m_sigma(L_i^* L_j M)} V_{lam^i, lam^j}.

    The chart-local character of chi(L_i^* L_j M) - RHom(I_i, I_j x L_i^* L_j M)
    at the fixed point; rank n_i + n_j.
    """
    return _deficiency(li.surface, li, lj, twist.weights, fixed_point, i, j)


def virtual_tangent(L: BundleTuple, fixed_point) -> TorusCharacter:
    """T at the fixed point: sum_{i,j} t^{i-j} (H_ij(O) - t H_ij(omega)).

    Trace parts cancel between the pointed and unpointed classes, so the
    total rank is 0; t-exponents lie in [-(r-1), r].
    """
    surface = L.surface
    omega_w = canonical_bundle(surface).weights
    zero_w = tuple((0, 0) for _ in surface.charts)
    r = L.rank
    out = TorusCharacter.zero()
    for i in range(r):
        for j in range(r):
            li, lj = L.bundles[i], L.bundles[j]
            h_o = _deficiency(surface, li, lj, zero_w, fixed_point, i, j)
            h_w = _deficiency(surface, li, lj, omega_w, fixed_point, i, j)
            out = out + h_o.twist(0, 0, i - j) - h_w.twist(0, 0, i - j + 1)
    return out


def hilb_tangent_character(surface, factor_assignment) -> TorusCharacter:
    """Tangent character of Hilb^n(S) at a fixed point of one factor."""
    out = TorusCharacter.zero()
    for idx, (w1, w2) in enumerate(surface.charts):
        lam = factor_assignment[idx]
        if not lam:
            continue
        out = out + _vertex_at_chart(lam, lam, w1, w2)
    return out
