"""Half-plane transforms of measures.

Cauchy transform ``G(z) = int 1/(z - x) dmu(x)``, its reciprocal F-transform,
the R-transform obtained by numerically inverting G, density recovery by
Stieltjes-Perron inversion, and mean/variance extraction from the F-transform
asymptotics at large imaginary heights.

Branch rule: every square root ``sqrt((z - c)^2 - r^2)`` is taken with the
branch cut on ``[c - r, c + r]`` and asymptotics ``~ z - c``, realized as the
product of principal square roots of the two linear factors.  That branch maps
the upper half-plane into itself, which is what every closed form here needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    DomainMismatchError,
    MassDeficitError,
    NoConvergenceError,
    UnstableFitError,
    ValidationError,
)
from .measures import Arcsine, Dirac, Empirical, Measure, Semicircle, mean_variance

CAUCHY = "cauchy"
F = "f"
R = "r"
_KINDS = (CAUCHY, F, R)

#: eps * |G| above this value flags an atom during Stieltjes inversion
ATOM_THRESHOLD = 0.1

#: heights used for the large-z moment fit
ASYMPTOTIC_LEVELS = (50.0, 100.0, 200.0)


@dataclass(frozen=True)
class AnalyticMap:
    """An evaluable holomorphic map on the upper half-plane.

    ``kind`` is one of ``"cauchy"``, ``"f"``, ``"r"``; ``mean``/``variance``
    are optional asymptotic metadata.  For ``kind="r"`` the optional ``domain``
    records the radius interval on the imaginary test segment where the map is
    known to evaluate.
    """

    kind: str
    fn: Callable[[complex], complex]
    mean: float | None = None
    variance: float | None = None
    domain: tuple | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValidationError(f"unknown transform kind {self.kind!r}")

    def __call__(self, z: complex) -> complex:
        return self.fn(z)


def halfplane_sqrt(z: complex, radius: float, center: float = 0.0) -> complex:
    """``sqrt((z - center)**2 - radius**2)`` with the half-plane branch.

    Cut on ``[center - radius, center + radius]``; asymptotic to ``z - center``
    far away; maps the open upper half-plane into itself.
    """
    w = complex(z) - center
    return complex(np.sqrt(w - radius) * np.sqrt(w + radius))


def _empirical_cauchy_fn(m: Empirical) -> Callable[[complex], complex]:
    atoms = m.atoms
    if m.values is None:
        def fn(z: complex) -> complex:
            z = complex(z)
            return sum(w / (z - x) for x, w in atoms)

        return fn

    xs = m.grid()
    rho = np.asarray(m.values, dtype=float)
    h = xs[1] - xs[0]
    slopes = np.diff(rho) / h
    edge = rho[-1] - rho[0]

    def fn(z: complex) -> complex:
        # exact integral of the piecewise-linear density against 1/(z - x)
        z = complex(z)
        logs = np.log(z - xs)
        seg = logs[:-1] - logs[1:]
        out = complex(np.sum((rho[:-1] + slopes * (z - xs[:-1])) * seg)) - edge
        out += sum(w / (z - x) for x, w in atoms)
        return out

    return fn


def cauchy(m: Measure) -> AnalyticMap:
    """Cauchy transform of ``m`` as an ``AnalyticMap(kind="cauchy")``.

    Closed forms: ``1/(z - a)`` for a point mass, ``2/(z + sqrt(z^2 - 4v))``
    for the semicircle law, ``1/sqrt(z^2 - 2v)`` for the arcsine law (each
    recentered when the family carries a center).  Empirical measures use the
    exact per-segment antiderivative of the gridded density.
    """
    mean, var = mean_variance(m)
    if isinstance(m, Dirac):
        a = m.location
        fn = lambda z: 1.0 / (complex(z) - a)
    elif isinstance(m, Semicircle):
        c, r = m.center, m.radius
        fn = lambda z: 2.0 / ((complex(z) - c) + halfplane_sqrt(z, r, c))
    elif isinstance(m, Arcsine):
        c, r = m.center, m.radius
        fn = lambda z: 1.0 / halfplane_sqrt(z, r, c)
    elif isinstance(m, Empirical):
        fn = _empirical_cauchy_fn(m)
    else:
        raise ValidationError(f"not a measure: {m!r}")
    return AnalyticMap(CAUCHY, fn, mean=mean, variance=var)


def f_transform(m: Measure) -> AnalyticMap:
    """F-transform ``1/G`` of ``m`` with mean/variance metadata."""
    g = cauchy(m)
    return AnalyticMap(F, lambda z: 1.0 / g.fn(z), mean=g.mean, variance=g.variance)


def as_f(g: AnalyticMap) -> AnalyticMap:
    """Pointwise reciprocal, relabeling a Cauchy transform as an F-transform."""
    if g.kind != CAUCHY:
        raise ValidationError("as_f expects a cauchy-kind map")
    return AnalyticMap(F, lambda z: 1.0 / g.fn(z), mean=g.mean, variance=g.variance)


def as_cauchy(f: AnalyticMap) -> AnalyticMap:
    """Pointwise reciprocal, relabeling an F-transform as a Cauchy transform."""
    if f.kind != F:
        raise ValidationError("as_cauchy expects an f-kind map")
    return AnalyticMap(CAUCHY, lambda z: 1.0 / f.fn(z), mean=f.mean, variance=f.variance)


def _damped_newton(fun, x0: complex, scale: float, max_iter: int = 100) -> complex:
    """Solve ``fun(x) = 0`` by Newton with residual-based step halving.

    The derivative is a central difference (legitimate for holomorphic
    functions).  Steps that increase the residual or push the iterate across
    the real axis are halved; running out of halvings or iterations raises
    ``NoConvergenceError``.
    """
    x = x0
    fx = fun(x)
    side = 1.0 if x.imag > 0 else -1.0
    for _ in range(max_iter):
        if abs(fx) <= 1e-13 * scale:
            return x
        h = 1e-6 * (1.0 + abs(x))
        deriv = (fun(x + h) - fun(x - h)) / (2.0 * h)
        if deriv == 0:
            raise NoConvergenceError("no convergence: flat derivative")
        step = fx / deriv
        lam = 1.0
        for _ in range(60):
            cand = x - lam * step
            if cand.imag * side <= 0:
                lam *= 0.5
                continue
            fc = fun(cand)
            if abs(fc) < abs(fx):
                x, fx = cand, fc
                break
            lam *= 0.5
        else:
            raise NoConvergenceError("no convergence: residual stalled")
    if abs(fx) <= 1e-13 * scale:
        return x
    raise NoConvergenceError("no convergence after iteration limit")


def invert_cauchy(g: AnalyticMap, w: complex, max_iter: int = 100) -> complex:
    """Right inverse ``V`` of a Cauchy transform: solves ``G(V) = w``.

    Seeded at ``mean + 1/w`` (the exact inverse for a point mass); valid for
    ``w`` in the image of ``{Im z sufficiently large}``.  Out-of-domain points
    fail loudly with ``NoConvergenceError``.
    """
    if g.kind != CAUCHY:
        raise ValidationError("invert_cauchy expects a cauchy-kind map")
    w = complex(w)
    if w == 0:
        raise ValidationError("cannot invert the Cauchy transform at w = 0")
    seed = (g.mean or 0.0) + 1.0 / w
    return _damped_newton(lambda v: g.fn(v) - w, seed, max(1.0, abs(w)), max_iter)


def r_transform(g: AnalyticMap, max_iter: int = 100) -> AnalyticMap:
    """R-transform ``V(w) - 1/w`` where ``V`` right-inverts ``g``.

    The returned map is reliable on the image of ``{i y : y >= 0.05}`` under
    ``g`` and on the imaginary test segment of radius 0.5 recorded in
    ``domain``; elsewhere the Newton inversion may raise.
    """
    if g.kind != CAUCHY:
        raise ValidationError("r_transform expects a cauchy-kind map")

    def fn(w: complex) -> complex:
        w = complex(w)
        return invert_cauchy(g, w, max_iter) - 1.0 / w

    return AnalyticMap(R, fn, mean=g.mean, variance=g.variance, domain=(0.0, 0.5))


def cauchy_from_r(r: AnalyticMap, max_iter: int = 100) -> AnalyticMap:
    """Cauchy transform recovered from an R-transform.

    Solves ``R(w) + 1/w = z`` for ``w = G(z)`` by the same damped Newton used
    for :func:`r_transform`, seeded at ``1/z``.
    """
    if r.kind != R:
        raise ValidationError("cauchy_from_r expects an r-kind map")

    def fn(z: complex) -> complex:
        z = complex(z)
        return _damped_newton(lambda w: r.fn(w) + 1.0 / w - z, 1.0 / z, max(1.0, abs(z)), max_iter)

    return AnalyticMap(CAUCHY, fn, mean=r.mean, variance=r.variance)


def _refine_atom_location(g, lo: float, hi: float, eps: float) -> float:
    # Re G(x + i eps) changes sign from - to + across a pole on the real line.
    f_lo = g(complex(lo, eps)).real
    f_hi = g(complex(hi, eps)).real
    if not (f_lo < 0 < f_hi):
        xs = np.linspace(lo, hi, 65)
        vals = [abs(g(complex(x, eps))) for x in xs]
        return float(xs[int(np.argmax(vals))])
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if g(complex(mid, eps)).real < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _atom_mass(g, x0: float, eps: float) -> float:
    est = lambda e: -e * g(complex(x0, e)).imag
    return 2.0 * est(eps / 4.0) - est(eps / 2.0)


def invert_stieltjes(g: AnalyticMap, grid, eps: float,
                     atom_threshold: float = ATOM_THRESHOLD,
                     deficit_tol: float = 1e-3) -> Empirical:
    """Recover a measure from its Cauchy transform on a grid.

    Density estimate ``-(1/pi) Im g(x + i eps)`` Richardson-extrapolated over
    ``eps`` and ``eps/2`` (the smoothing error is linear in ``eps``).  Grid
    points where ``eps * |g|`` exceeds ``atom_threshold`` flag an atom; each
    atom's location is refined by bisection, its mass by shrinking ``eps``, and
    its Cauchy kernel is subtracted before the density pass so pole tails do
    not leak into the density.

    The recovered mass must reach ``1 - deficit_tol`` (otherwise
    ``MassDeficitError``); the result is renormalized to total mass one.
    Non-uniform grids are resampled onto a uniform grid of the same size.
    """
    if g.kind != CAUCHY:
        raise ValidationError("invert_stieltjes expects a cauchy-kind map")
    xs = np.asarray(grid, dtype=float)
    if xs.ndim != 1 or xs.size < 2 or np.any(np.diff(xs) <= 0):
        raise ValidationError("grid must be strictly increasing")
    if not (1e-8 <= eps <= 1e-2):
        raise ValidationError("eps must lie in [1e-8, 1e-2]")

    g1 = np.array([g(complex(x, eps)) for x in xs])
    g2 = np.array([g(complex(x, eps / 2.0)) for x in xs])

    flagged = eps * np.abs(g1) > atom_threshold
    atoms = []
    idx = np.nonzero(flagged)[0]
    if idx.size:
        runs = np.split(idx, np.nonzero(np.diff(idx) > 1)[0] + 1)
        for run in runs:
            lo = xs[max(run[0] - 1, 0)]
            hi = xs[min(run[-1] + 1, xs.size - 1)]
            x0 = _refine_atom_location(g.fn, float(lo), float(hi), eps)
            mass = _atom_mass(g.fn, x0, eps)
            atoms.append((x0, mass))
        for x0, mass in atoms:
            g1 -= mass / (xs + 1j * eps - x0)
            g2 -= mass / (xs + 1j * eps / 2.0 - x0)

    dens = -(2.0 * g2.imag - g1.imag) / math.pi
    np.clip(dens, 0.0, None, out=dens)

    spacings = np.diff(xs)
    uniform = np.allclose(spacings, spacings[0], rtol=1e-9, atol=0.0)
    if not uniform:
        even = np.linspace(xs[0], xs[-1], xs.size)
        dens = np.interp(even, xs, dens)
        xs = even

    total = sum(m for _, m in atoms) + float(np.trapezoid(dens, xs))
    if total < 1.0 - deficit_tol:
        raise MassDeficitError(f"mass deficit: recovered {total:.6f} of 1")

    return Empirical(
        atoms=tuple((x0, m / total) for x0, m in atoms),
        a=float(xs[0]),
        b=float(xs[-1]),
        values=dens / total,
    )


def asymptotic_moments(f: AnalyticMap, levels=ASYMPTOTIC_LEVELS):
    """Mean and variance from ``f(iy) ~ iy - mean - variance/(iy)``.

    Least-squares fit over the probe heights; raises ``UnstableFitError`` when
    the per-height estimates disagree by more than 1% of the fitted scale.
    """
    if f.kind != F:
        raise ValidationError("asymptotic_moments expects an f-kind map")
    ys = np.asarray(levels, dtype=float)
    deltas = np.array([complex(f.fn(1j * y)) - 1j * y for y in ys])
    means = -deltas.real
    variances = ys * deltas.imag
    mean_hat = float(np.mean(means))
    var_hat = float(np.sum(variances / ys**2) / np.sum(1.0 / ys**2))
    scale = max(1.0, abs(mean_hat), abs(var_hat))
    if np.ptp(means) > 0.01 * scale or np.ptp(variances) > 0.01 * scale:
        raise UnstableFitError(
            f"unstable fit: means {means.tolist()}, variances {variances.tolist()}"
        )
    return mean_hat, var_hat


def merge_domains(a: tuple | None, b: tuple | None) -> tuple | None:
    """Intersection of two evaluation-domain intervals (``None`` = unknown)."""
    if a is None:
        return b
    if b is None:
        return a
    lo, hi = max(a[0], b[0]), min(a[1], b[1])
    if lo >= hi:
        raise DomainMismatchError(f"domain mismatch: {a} and {b} are disjoint")
    return (lo, hi)
