"""Fixed-point localization: per-point contributions and the invariants Q_n.

Unrefined mode specializes the surface torus to exact rational additive
weights (s1, s2) with the Higgs weight kappa = 1; the contribution of a
virtual character is prod (a s1 + b s2 + c)^(-mult).

Refined mode draws multiplicative parameters E_k = e_k^2 (squares, so the
half powers demanded by the square-rooted canonical class stay rational)
and keeps the Higgs character symbolic as y; the contribution is
prod (x^(1/2) - x^(-1/2))^(-mult) with x^(1/2) = e1^a e2^b v^c.

The sum over fixed points is independent of the draw; a structural zero
weight (0,0,0) of negative multiplicity kills a contribution exactly (the
chart-local shadow of the empty-nested-Hilbert-scheme vanishing), while a
positive one would invalidate the formula and raises.

Q_n(y) is a rational function of y, so the fixed-point sum is evaluated at
deterministic sample values of v and reconstructed exactly by rational
interpolation in y = v^2; sample primes are disjoint from the draw primes,
so no evaluation can hit a pole.  Validation points, an evenness check at
-v, and the two-seed property guard the reconstruction.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .characters import virtual_tangent
from .fixedpoints import count_fixed_points, factor_assignments, fixed_points
from .puiseux import PuiseuxSeries
from .ratfun import RationalFunction
from .surfaces import BundleTuple, EquivariantLineBundle, surface_by_name

SCHEMA_VERSION = 1

# primes for refined multiplicative draws; disjoint from _SAMPLE_PRIMES
_E_PAIRS = ((2, 3), (7, 13), (19, 29), (37, 43), (53, 61), (71, 79))
_SAMPLE_PRIMES = (5, 11, 17, 23, 31, 41, 47, 59, 67, 73, 83, 89, 97, 101, 103, 107)


class ZeroWeight(ArithmeticError):
    """A drawn linear form vanished; redraw the specialization."""


class StructuralZeroWeight(ArithmeticError):
    """A (0,0,0) weight with positive multiplicity: localization invalid."""


class ReconstructionError(ArithmeticError):
    """Rational reconstruction failed up to the structural degree cap."""


@dataclass(frozen=True)
class Specialization:
    mode: str
    seed: int = 0
    attempt: int = 0
    s1: Optional[Fraction] = None
    s2: Optional[Fraction] = None
    e1: Optional[int] = None
    e2: Optional[int] = None

    @classmethod
    def draw(cls, mode: str, seed: int = 0, attempt: int = 0) -> "Specialization":
        if mode == "unrefined":
            rng = random.Random(f"vwmono-unrefined-{seed}-{attempt}")
            while True:
                s1 = Fraction(rng.randint(-19, 19), rng.randint(1, 9))
                s2 = Fraction(rng.randint(-19, 19), rng.randint(1, 9))
                if s1 and s2 and s1 != s2:
                    return cls("unrefined", seed, attempt, s1=s1, s2=s2)
        if mode == "refined":
            e1, e2 = _E_PAIRS[(seed + attempt) % len(_E_PAIRS)]
            return cls("refined", seed, attempt, e1=e1, e2=e2)
        raise ValueError(f"unknown mode {mode!r}")


@dataclass
class QResult:
    surface: str
    n: tuple[int, ...]
    seed: int
    bundle_classes: tuple
    unrefined: Optional[Fraction] = None
    refined: Optional[RationalFunction] = None

    def to_json(self):
        return {
            "schema": SCHEMA_VERSION,
            "surface": self.surface,
            "n": list(self.n),
            "seed": self.seed,
            "bundle_classes": [list(c) for c in self.bundle_classes],
            "unrefined": None
            if self.unrefined is None
            else f"{self.unrefined.numerator}/{self.unrefined.denominator}",
            "refined": None if self.refined is None else self.refined.to_string(),
        }

    @classmethod
    def from_json(cls, data) -> "QResult":
        unref = data.get("unrefined")
        ref = data.get("refined")
        return cls(
            surface=data["surface"],
            n=tuple(data["n"]),
            seed=data["seed"],
            bundle_classes=tuple(tuple(c) for c in data["bundle_classes"]),
            unrefined=None if unref is None else Fraction(unref),
            refined=None if ref is None else RationalFunction.parse(ref),
        )


# ---------------------------------------------------------------------------
# per-character contributions


def _scan_structural_zero(T) -> int:
    """0 if clean, -1 if the contribution is exactly zero, raise if invalid."""
    m = T.weights.get((0, 0, 0), 0)
    if m > 0:
        raise StructuralZeroWeight(
            "zero weight with positive multiplicity in the virtual class"
        )
    return -1 if m < 0 else 0


def euler_contribution(T, spec: Specialization) -> Fraction:
    """e(-T) as a number: prod over weights of (a s1 + b s2 + c)^(-mult)."""
    if _scan_structural_zero(T):
        return Fraction(0)
    s1, s2 = spec.s1, spec.s2
    val = Fraction(1)
    for (a, b, c), mult in T.weights.items():
        form = a * s1 + b * s2 + c
        if form == 0:
            raise ZeroWeight(f"drawn zero for weight ({a},{b},{c})")
        val *= form ** (-mult)
    return val


def refined_contribution(T, spec: Specialization) -> RationalFunction:
    """prod (x^(1/2) - x^(-1/2))^(-mult), x^(1/2) = e1^a e2^b v^c, symbolic in v."""
    if _scan_structural_zero(T):
        return RationalFunction.zero()
    e1, e2 = spec.e1, spec.e2
    val = RationalFunction.one()
    for (a, b, c), mult in T.weights.items():
        r = Fraction(e1) ** a * Fraction(e2) ** b
        factor = RationalFunction.monomial(c, r) - RationalFunction.monomial(-c, 1 / r)
        val = val * factor ** (-mult)
    return val


def _compile_weights(T, e1: int, e2: int):
    """[(e1^a e2^b, c, mult)] with the structural-zero contribution removed."""
    if _scan_structural_zero(T):
        return None
    out = []
    for (a, b, c), mult in T.weights.items():
        out.append((Fraction(e1) ** a * Fraction(e2) ** b, c, mult))
    return out


def _eval_compiled(compiled, v: Fraction) -> Fraction:
    val = Fraction(1)
    for r, c, mult in compiled:
        x_half = r * v**c
        f = x_half - 1 / x_half
        if f == 0:
            raise ZeroWeight(f"sample {v} hit a weight pole")
        val *= f ** (-mult)
    return val


# ---------------------------------------------------------------------------
# fixed-point sweeps (serial and parallel chunks)


def _sweep_refined(L: BundleTuple, n, e1, e2, v_list, start, stop):
    sums = [Fraction(0)] * len(v_list)
    for fp in fixed_points(L.surface, n, start, stop):
        compiled = _compile_weights(virtual_tangent(L, fp), e1, e2)
        if compiled is None:
            continue
        for i, v in enumerate(v_list):
            sums[i] += _eval_compiled(compiled, v)
    return sums


def _sweep_unrefined(L: BundleTuple, n, spec, start, stop):
    total = Fraction(0)
    for fp in fixed_points(L.surface, n, start, stop):
        total += euler_contribution(virtual_tangent(L, fp), spec)
    return total


def _rebuild_bundle_tuple(surface_name, classes, weights, betas) -> BundleTuple:
    surface = surface_by_name(surface_name)
    bundles = tuple(
        EquivariantLineBundle(surface, tuple(c), tuple(tuple(w) for w in ws))
        for c, ws in zip(classes, weights)
    )
    return BundleTuple(surface, bundles, tuple(tuple(b) for b in betas))


def _refined_chunk(args):
    surface_name, classes, weights, betas, n, e1, e2, v_list, start, stop = args
    L = _rebuild_bundle_tuple(surface_name, classes, weights, betas)
    return _sweep_refined(L, n, e1, e2, v_list, start, stop)


def _unrefined_chunk(args):
    surface_name, classes, weights, betas, n, spec, start, stop = args
    L = _rebuild_bundle_tuple(surface_name, classes, weights, betas)
    return _sweep_unrefined(L, n, spec, start, stop)


def _chunk_ranges(total, workers):
    chunk = max(64, -(-total // (workers * 4)))
    return [(a, min(a + chunk, total)) for a in range(0, total, chunk)]


def _run_chunks(fn, arg_list, workers):
    if workers <= 1 or len(arg_list) <= 1:
        return [fn(a) for a in arg_list]
    import multiprocessing as mp

    with mp.Pool(processes=min(workers, len(arg_list))) as pool:
        return pool.map(fn, arg_list)


# ---------------------------------------------------------------------------
# rational reconstruction in y


def _kernel_vector(rows, cols):
    """One kernel vector of the row system, by exact Gauss-Jordan."""
    mat = [list(r) for r in rows]
    pivots = []
    rank = 0
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
        pivots.append(c)
        rank += 1
    free = [c for c in range(cols) if c not in pivots]
    if not free:
        return None
    fc = free[-1]
    vec = [Fraction(0)] * cols
    vec[fc] = Fraction(1)
    for r, pc in enumerate(pivots):
        vec[pc] = -mat[r][fc]
    return vec

def _try_reconstruct(samples, degree):
    """Fit p/q with deg <= degree to (y, value) samples; None on failure."""
    m = 2 * degree + 2
    if len(samples) < m:
        return None
    rows = []
    for y, f in samples[:m]:
        ypow = [Fraction(1)]
        for _ in range(degree):
            ypow.append(ypow[-1] * y)
        rows.append(ypow + [-f * yp for yp in ypow])
    vec = _kernel_vector(rows, 2 * (degree + 1))
    if vec is None:
        return None
    num = vec[: degree + 1]
    den = vec[degree + 1 :]
    while num and not num[-1]:
        num.pop()
    while den and not den[-1]:
        den.pop()
    if not den:
        return None
    for y, f in samples:
        dv = Fraction(0)
        for c in reversed(den):
            dv = dv * y + c
        if dv == 0:
            return None
        nv = Fraction(0)
        for c in reversed(num):
            nv = nv * y + c
        if nv / dv != f:
            return None
    return num, den


def _rf_from_y_polys(num, den) -> RationalFunction:
    def interleave(coeffs):
        out = []
        for c in coeffs:
            out.append(c)
            out.append(Fraction(0))
        return tuple(out[:-1]) if out else ()

    return RationalFunction(interleave(num), interleave(den))


def _sample_v_values(count: int) -> list[Fraction]:
    """Deterministic pole-free evaluation points built from _SAMPLE_PRIMES."""
    out = []
    primes = _SAMPLE_PRIMES
    for p in primes:
        out.append(Fraction(p))
        if len(out) >= count:
            return out
    for i, p in enumerate(primes):
        for q in primes[i + 1 :]:
            out.append(Fraction(p, q))
            if len(out) >= count:
                return out
            out.append(Fraction(q, p))
            if len(out) >= count:
                return out
    raise ReconstructionError("sample pool exhausted")


# ---------------------------------------------------------------------------
# Q_n and its generating series


_VALIDATION_POINTS = 4


def compute_Q(
    L: BundleTuple,
    n,
    spec: Specialization,
    workers: int = 1,
    cache=None,
) -> QResult:
    """Sum the fixed-point contributions for Hilb^{n}; draw-independent."""
    n = tuple(n)
    assert len(n) == L.rank
    key = None
    if cache is not None:
        key = cache_key(L, n, spec.mode, spec.seed)
        hit = cache.get(key)
        if hit is not None:
            return QResult.from_json(hit)
    if spec.mode == "unrefined":
        result = _compute_unrefined(L, n, spec, workers)
    elif spec.mode == "refined":
        result = _compute_refined(L, n, spec, workers)
    else:
        raise ValueError(f"unknown mode {spec.mode!r}")
    if cache is not None:
        cache.put(key, result.to_json())
    return result


def cache_key(L: BundleTuple, n, mode, seed):
    return {
        "schema": SCHEMA_VERSION,
        "surface": L.surface.name,
        "classes": [list(b.cls) for b in L.bundles],
        "weights": [[list(w) for w in b.weights] for b in L.bundles],
        "n": list(n),
        "mode": mode,
        "seed": seed,
    }


def _meta(L: BundleTuple, n, spec) -> QResult:
    return QResult(
        surface=L.surface.name,
        n=tuple(n),
        seed=spec.seed,
        bundle_classes=tuple(b.cls for b in L.bundles),
    )


def _compute_unrefined(L, n, spec, workers) -> QResult:
    total_points = count_fixed_points(L.surface, n)
    for attempt in range(spec.attempt, spec.attempt + 8):
        draw = Specialization.draw("unrefined", spec.seed, attempt)
        args = [
            (L.surface.name, [b.cls for b in L.bundles],
             [b.weights for b in L.bundles], L.beta_upper, n, draw, a, b)
            for a, b in _chunk_ranges(total_points, max(1, workers))
        ]
        try:
            parts = _run_chunks(_unrefined_chunk, args, workers)
        except ZeroWeight:
            continue
        out = _meta(L, n, spec)
        out.unrefined = sum(parts, Fraction(0))
        return out
    raise ZeroWeight(f"no valid unrefined draw after 8 attempts (seed {spec.seed})")


def _compute_refined(L, n, spec, workers) -> QResult:
    total_points = count_fixed_points(L.surface, n)
    total_n = sum(n)
    degree_cap = 8 * L.rank * (total_n + 2) + 16
    degree = max(6, 3 * total_n + 4)
    samples: list[tuple[Fraction, Fraction]] = []
    v_used: list[Fraction] = []

    def extend_to(count):
        nonlocal samples, v_used
        if count <= len(samples):
            return
        v_new = _sample_v_values(count)[len(samples) :]
        args = [
            (L.surface.name, [b.cls for b in L.bundles],
             [b.weights for b in L.bundles], L.beta_upper, n,
             spec.e1, spec.e2, v_new, a, b)
            for a, b in _chunk_ranges(total_points, max(1, workers))
        ]
        parts = _run_chunks(_refined_chunk, args, workers)
        sums = [Fraction(0)] * len(v_new)
        for part in parts:
            for i, x in enumerate(part):
                sums[i] += x
        samples = samples + [(v * v, s) for v, s in zip(v_new, sums)]
        v_used = v_used + v_new

    while True:
        extend_to(2 * degree + 2 + _VALIDATION_POINTS)
        fit = _try_reconstruct(samples, degree)
        if fit is not None:
            break
        if degree >= degree_cap:
            raise ReconstructionError(
                f"reconstruction failed up to degree {degree} for n={n}"
            )
        degree = min(2 * degree, degree_cap)

    # evenness guard: the sum must be a function of y, i.e. equal at -v
    v0 = v_used[0]
    args = [
        (L.surface.name, [b.cls for b in L.bundles],
         [b.weights for b in L.bundles], L.beta_upper, n,
         spec.e1, spec.e2, [-v0], 0, total_points)
    ]
    neg = _run_chunks(_refined_chunk, args, 1)[0][0]
    if neg != samples[0][1]:
        raise ReconstructionError("fixed-point sum is not a function of y")

    out = _meta(L, n, spec)
    out.refined = _rf_from_y_polys(*fit)
    return out


def q_series(
    L: BundleTuple,
    n_max: int,
    mode: str,
    seed: int = 0,
    workers: int = 1,
    cache=None,
) -> PuiseuxSeries:
    """sum over |n| <= n_max of Q_n q^{|n|}, truncation order n_max + 1."""
    spec = Specialization.draw(mode, seed)
    r = L.rank
    coeffs: dict[int, RationalFunction] = {}
    from .fixedpoints import _compositions

    for k in range(n_max + 1):
        total = RationalFunction.zero()
        for n in _compositions(k, r):
            res = compute_Q(L, n, spec, workers=workers, cache=cache)
            if mode == "refined":
                total = total + res.refined
            else:
                total = total + RationalFunction.from_fraction(res.unrefined)
        coeffs[k] = total
    return PuiseuxSeries(coeffs, n_max + 1)
