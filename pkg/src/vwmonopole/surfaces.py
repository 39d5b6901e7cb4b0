"""Toric chart combinatorics, equivariant line bundles and Chern bookkeeping.

Supported toric surfaces are the projective plane and the quadric
P^1 x P^1.  A chart records the two characters w1, w2 of its affine
coordinate functions; a T-equivariant line bundle records the character of
a distinguished local generator of its sections on every chart.  Divisor
classes are integer vectors: (d,) on P^2 and (a, b) on P^1 x P^1.

Abstract (non-toric) surface descriptors carry only the numerical data
needed to evaluate generating series: chi(O), K^2, a Picard-type lattice
with its intersection form, and Seiberg-Witten basic classes with values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .ratfun import RationalFunction


class UnsupportedSurface(ValueError):
    pass


class SingularBasis(ValueError):
    pass


Vec2 = tuple[int, int]


@dataclass(frozen=True)
class ToricSurface:
    name: str
    charts: tuple[tuple[Vec2, Vec2], ...]
    chi: int
    k2: int
    canonical_class: tuple[int, ...]
    # pairs of adjacent charts with the primitive character of their wall,
    # and the coefficient map from a divisor class to the step across it
    walls: tuple[tuple[int, int, Vec2, tuple[int, ...]], ...]

    @property
    def euler(self) -> int:
        return len(self.charts)

    def intersect(self, a: Sequence[int], b: Sequence[int]) -> int:
        if self.name == "p2":
            return a[0] * b[0]
        return a[0] * b[1] + a[1] * b[0]

    def class_zero(self) -> tuple[int, ...]:
        return (0,) * len(self.canonical_class)

    def parse_class(self, token: str) -> tuple[int, ...]:
        """Class tokens: O, K, -K, or explicit integers 'd' / 'a,b'."""
        t = token.strip()
        if t in ("O", "o", "0", "trivial"):
            return self.class_zero()
        if t in ("K", "k"):
            return self.canonical_class
        if t in ("-K", "-k"):
            return tuple(-x for x in self.canonical_class)
        parts = [int(x) for x in t.split(",")]
        if len(parts) != len(self.canonical_class):
            raise UnsupportedSurface(
                f"class {token!r} has wrong rank for {self.name}"
            )
        return tuple(parts)

    def class_name(self, cls: Sequence[int]) -> str:
        cls = tuple(cls)
        if cls == self.class_zero():
            return "O"
        if cls == self.canonical_class:
            return "K"
        if cls == tuple(-x for x in self.canonical_class):
            return "-K"
        return ",".join(str(x) for x in cls)


_P2 = ToricSurface(
    name="p2",
    charts=(((1, 0), (0, 1)), ((-1, 0), (-1, 1)), ((0, -1), (1, -1))),
    chi=1,
    k2=9,
    canonical_class=(-3,),
    walls=((0, 1, (1, 0), (1,)), (0, 2, (0, 1), (1,)), (1, 2, (-1, 1), (1,))),
)

_P1XP1 = ToricSurface(
    name="p1xp1",
    charts=(
        ((1, 0), (0, 1)),
        ((-1, 0), (0, 1)),
        ((1, 0), (0, -1)),
        ((-1, 0), (0, -1)),
    ),
    chi=1,
    k2=8,
    canonical_class=(-2, -2),
    walls=(
        (0, 1, (1, 0), (1, 0)),
        (2, 3, (1, 0), (1, 0)),
        (0, 2, (0, 1), (0, 1)),
        (1, 3, (0, 1), (0, 1)),
    ),
)

_SURFACES = {"p2": _P2, "p1xp1": _P1XP1}


def p2() -> ToricSurface:
    return _P2


def p1xp1() -> ToricSurface:
    return _P1XP1


def surface_by_name(name: str) -> ToricSurface:
    try:
        return _SURFACES[name.lower()]
    except KeyError:
        raise UnsupportedSurface(f"unknown surface {name!r}") from None


def chart_weights(surface: ToricSurface):
    """The (w1, w2) pair of every chart; these enumerate the T-fixed points."""
    if surface.name not in _SURFACES:
        raise UnsupportedSurface(surface.name)
    return list(surface.charts)


# ---------------------------------------------------------------------------
# equivariant line bundles


@dataclass(frozen=True)
class EquivariantLineBundle:
    surface: ToricSurface
    cls: tuple[int, ...]
    weights: tuple[Vec2, ...]  # section-generator character per chart

    def tensor(self, other: "EquivariantLineBundle") -> "EquivariantLineBundle":
        assert self.surface is other.surface
        return EquivariantLineBundle(
            self.surface,
            tuple(a + b for a, b in zip(self.cls, other.cls)),
            tuple(
                (m[0] + n[0], m[1] + n[1])
                for m, n in zip(self.weights, other.weights)
            ),
        )

    def dual(self) -> "EquivariantLineBundle":
        return EquivariantLineBundle(
            self.surface,
            tuple(-x for x in self.cls),
            tuple((-m[0], -m[1]) for m in self.weights),
        )

    def twist_weights(self, gamma: Vec2) -> "EquivariantLineBundle":
        """Same underlying bundle with the linearization shifted by gamma."""
        return EquivariantLineBundle(
            self.surface,
            self.cls,
            tuple((m[0] + gamma[0], m[1] + gamma[1]) for m in self.weights),
        )


def line_bundle(surface: ToricSurface, cls) -> EquivariantLineBundle:
    """O(cls) with the standard linearization (trivialized at chart 0)."""
    cls = tuple(cls)
    if surface.name == "p2":
        d = cls[0]
        weights = ((0, 0), (d, 0), (0, d))
    elif surface.name == "p1xp1":
        a, b = cls
        weights = ((0, 0), (a, 0), (0, b), (a, b))
    else:
        raise UnsupportedSurface(surface.name)
    return EquivariantLineBundle(surface, cls, weights)


def trivial_bundle(surface: ToricSurface) -> EquivariantLineBundle:
    return line_bundle(surface, surface.class_zero())


def canonical_bundle(surface: ToricSurface) -> EquivariantLineBundle:
    """omega_S with its canonical linearization (du^dv on each chart)."""
    weights = tuple(
        (w1[0] + w2[0], w1[1] + w2[1]) for w1, w2 in surface.charts
    )
    return EquivariantLineBundle(surface, surface.canonical_class, weights)


def bundle_weight(bundle: EquivariantLineBundle, chart: int) -> Vec2:
    return bundle.weights[chart]


def equivariant_chi(bundle: EquivariantLineBundle) -> int:
    """Sheaf Euler characteristic by chart localization.

    Evaluates sum_sigma chi^{m_sigma} / prod_k (1 - chi^{w_k}) along the
    one-parameter subgroup chi^(a,b) -> tau^(a+2b); the per-chart poles at
    tau = 1 cancel in the sum, and the value there is chi(L).
    """
    for pairing in ((1, 2), (1, 3), (2, 5)):
        if all(
            w[0] * pairing[0] + w[1] * pairing[1] != 0
            for chart in bundle.surface.charts
            for w in chart
        ):
            break
    else:
        raise UnsupportedSurface("no non-degenerate pairing found")
    total = RationalFunction.zero()
    one = RationalFunction.one()
    for idx, (w1, w2) in enumerate(bundle.surface.charts):
        m = bundle.weights[idx]
        term = RationalFunction.monomial(m[0] * pairing[0] + m[1] * pairing[1])
        for w in (w1, w2):
            k = w[0] * pairing[0] + w[1] * pairing[1]
            term = term / (one - RationalFunction.monomial(k))
        total = total + term
    value = total.evaluate(1)
    assert value.denominator == 1
    return int(value)


def riemann_roch_chi(surface: ToricSurface, cls) -> int:
    """chi(O(D)) = chi(O) + D(D - K)/2."""
    d = tuple(cls)
    k = surface.canonical_class
    dd = surface.intersect(d, d)
    dk = surface.intersect(d, k)
    val = Fraction(dd - dk, 2) + surface.chi
    assert val.denominator == 1
    return int(val)


def check_wall_compatibility(bundle: EquivariantLineBundle) -> bool:
    """Support-function condition: across each wall the weights differ by
    (class coefficient along the wall) times the wall's primitive character."""
    s = bundle.surface
    for i, j, prim, coeff in s.walls:
        c = sum(a * b for a, b in zip(coeff, bundle.cls))
        mi, mj = bundle.weights[i], bundle.weights[j]
        diff = (mi[0] - mj[0], mi[1] - mj[1])
        if diff != (-c * prim[0], -c * prim[1]) and diff != (
            c * prim[0],
            c * prim[1],
        ):
            return False
    return True


# ---------------------------------------------------------------------------
# bundle tuples L = (L_0, ..., L_s)


@dataclass(frozen=True)
class BundleTuple:
    surface: ToricSurface
    bundles: tuple[EquivariantLineBundle, ...]
    beta_upper: tuple[tuple[int, ...], ...]  # beta^i = c1(L_{i-1} x L_i^*)

    @property
    def rank(self) -> int:
        return len(self.bundles)

    def beta_lower(self):
        """beta_i = K - beta^i."""
        k = self.surface.canonical_class
        return tuple(
            tuple(ka - ba for ka, ba in zip(k, b)) for b in self.beta_upper
        )

    def key(self):
        return (
            self.surface.name,
            tuple(b.cls for b in self.bundles),
            tuple(b.weights for b in self.bundles),
        )


def bundle_tuple_from_beta(surface: ToricSurface, betas) -> BundleTuple:
    """Lift beta^1..beta^s to L with L_0 = O and L_i = L_{i-1} x O(-beta^i)."""
    betas = tuple(tuple(b) for b in betas)
    bundles = [trivial_bundle(surface)]
    for b in betas:
        prev = bundles[-1]
        bundles.append(prev.tensor(line_bundle(surface, [-x for x in b])))
    return BundleTuple(surface, tuple(bundles), betas)


def chern_c2(L: BundleTuple, n) -> int:
    """c2 of a fibre: |n| + sum_{i<j} c1(L_i) c1(L_j)."""
    assert len(n) == L.rank
    s = L.surface
    total = sum(n)
    cls = [b.cls for b in L.bundles]
    for i in range(len(cls)):
        for j in range(i + 1, len(cls)):
            total += s.intersect(cls[i], cls[j])
    return total


def chern_c2_beta_form(L: BundleTuple, n) -> Fraction:
    """Equivalent form: |n| + (r-1)/(2r) c1^2 - sum i(r-j)/r b^i b^j - sum i(r-i)/(2r) (b^i)^2."""
    s = L.surface
    r = L.rank
    c1 = tuple(sum(b.cls[k] for b in L.bundles) for k in range(len(s.canonical_class)))
    total = Fraction(sum(n)) + Fraction(r - 1, 2 * r) * s.intersect(c1, c1)
    bu = L.beta_upper
    for i in range(1, r):
        for j in range(i, r):
            pair = s.intersect(bu[i - 1], bu[j - 1])
            if i < j:
                total -= Fraction(i * (r - j), r) * pair
            else:
                total -= Fraction(i * (r - i), 2 * r) * pair
    return total


# ---------------------------------------------------------------------------
# Chern-number vectors and extraction bases


def symbols_for_rank(rank: int) -> list[str]:
    """Column order: chi, K2, then (K.bi, bi.bi) per i, then bi.bj for i<j."""
    out = ["chi", "K2"]
    for i in range(1, rank):
        out += [f"K.b{i}", f"b{i}.b{i}"]
    for i in range(1, rank):
        for j in range(i + 1, rank):
            out.append(f"b{i}.b{j}")
    return out


def chern_vector(surface: ToricSurface, betas) -> list[int]:
    betas = [tuple(b) for b in betas]
    k = surface.canonical_class
    out = [surface.chi, surface.k2]
    for b in betas:
        out += [surface.intersect(k, b), surface.intersect(b, b)]
    for i in range(len(betas)):
        for j in range(i + 1, len(betas)):
            out.append(surface.intersect(betas[i], betas[j]))
    return out


def _candidate_rows(rank: int):
    """Deterministic pool of (surface, beta-tuple) pairs over {O, K, -K}."""
    s = rank - 1
    yield _P1XP1, tuple(_P1XP1.class_zero() for _ in range(s))
    yield _P2, tuple(_P2.class_zero() for _ in range(s))
    k = _P2.canonical_class
    mk = tuple(-x for x in k)
    choices = (_P2.class_zero(), k, mk)
    from itertools import product

    for combo in product(range(3), repeat=s):
        if all(c == 0 for c in combo):
            continue
        yield _P2, tuple(choices[c] for c in combo)


def _paper_basis(rank: int):
    z2 = _P1XP1.class_zero()
    z = _P2.class_zero()
    k = _P2.canonical_class
    mk = tuple(-x for x in k)
    if rank == 2:
        return [
            (_P1XP1, (z2,)),
            (_P2, (z,)),
            (_P2, (k,)),
            (_P2, (mk,)),
        ]
    if rank == 3:
        return [
            (_P1XP1, (z2, z2)),
            (_P2, (z, z)),
            (_P2, (k, z)),
            (_P2, (mk, z)),
            (_P2, (z, k)),
            (_P2, (z, mk)),
            (_P2, (k, k)),
        ]
    return None


def _rank_of_rows(rows) -> int:
    mat = [list(map(Fraction, r)) for r in rows]
    rank = 0
    cols = len(mat[0]) if mat else 0
    for c in range(cols):
        piv = None
        for r in range(rank, len(mat)):
            if mat[r][c]:
                piv = r
                break
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = 1 / mat[rank][c]
        mat[rank] = [x * inv for x in mat[rank]]
        for r in range(len(mat)):
            if r != rank and mat[r][c]:
                f = mat[r][c]
                mat[r] = [x - f * y for x, y in zip(mat[r], mat[rank])]
        rank += 1
    return rank


def basis_matrix(rank: int):
    """(M, basis) with M[i] = chern_vector(basis[i]); M invertible over Q.

    Ranks 2 and 3 use the fixed bases; higher ranks search the {O, K, -K}
    pool greedily for an invertible square matrix.
    """
    if rank < 1:
        raise SingularBasis("rank must be at least 1")
    dim = len(symbols_for_rank(rank))
    fixed = _paper_basis(rank)
    if fixed is not None:
        basis = fixed
        m = [chern_vector(s, b) for s, b in basis]
        if _rank_of_rows(m) != dim:
            raise SingularBasis(f"fixed rank-{rank} basis is singular")
        return m, basis
    basis = []
    rows = []
    for s, b in _candidate_rows(rank):
        row = chern_vector(s, b)
        if _rank_of_rows(rows + [row]) > len(rows):
            rows.append(row)
            basis.append((s, b))
            if len(rows) == dim:
                return rows, basis
    raise SingularBasis(f"no invertible basis found for rank {rank}")


# ---------------------------------------------------------------------------
# abstract surfaces for Z-evaluation


@dataclass(frozen=True)
class AbstractSurface:
    """Numerical surface data: classes are integer vectors in a fixed basis
    of (the relevant part of) H^2, with intersection numbers given by gram."""

    name: str
    chi: int
    k2: int
    canonical: tuple[int, ...]
    gram: tuple[tuple[int, ...], ...]
    basic_classes: tuple[tuple[tuple[int, ...], int], ...]  # (class, SW value)

    def __post_init__(self):
        for row, col in zip(self.gram, zip(*self.gram)):
            if tuple(row) != tuple(col):
                raise ValueError("intersection table must be symmetric")
        if self.intersect(self.canonical, self.canonical) != self.k2:
            raise ValueError("K.K must equal K2")
        for cls, _ in self.basic_classes:
            if self.intersect(cls, cls) != self.intersect(cls, self.canonical):
                raise ValueError(
                    "basic class fails beta^2 = beta.K (SW adjunction)"
                )

    def intersect(self, a, b) -> int:
        return sum(
            a[i] * self.gram[i][j] * b[j]
            for i in range(len(a))
            for j in range(len(b))
        )

    def sw(self, cls) -> int:
        for c, val in self.basic_classes:
            if tuple(cls) == tuple(c):
                return val
        return 0


def k3_surface() -> AbstractSurface:
    return AbstractSurface(
        name="k3",
        chi=2,
        k2=0,
        canonical=(0,),
        gram=((0,),),
        basic_classes=(((0,), 1),),
    )


def canonical_curve_surface(chi: int = 5, k2: int = 5) -> AbstractSurface:
    """Minimal general-type model with Pic = Z[C], C a very ample canonical
    curve: basic classes 0 and K with SW(0) = 1, SW(K) = (-1)^chi."""
    if k2 <= 0:
        raise ValueError("needs K2 > 0")
    return AbstractSurface(
        name=f"canonical-curve(chi={chi},K2={k2})",
        chi=chi,
        k2=k2,
        canonical=(1,),
        gram=((k2,),),
        basic_classes=(((0,), 1), ((1,), (-1) ** chi)),
    )
