"""The three convolutions of probability measures on the line.

Monotone convolution composes F-transforms (``F_{a > b} = F_a o F_b``), the
anti-monotone convolution composes them in the reversed order, and the free
convolution adds R-transforms.  A second, independent route to the free
convolution goes through the subordination fixed point; keeping both lets each
serve as the other's oracle.

Results stay symbolic (:class:`~loewner.transforms.AnalyticMap`) until
:func:`materialize` inverts them back to a gridded measure, so long
composition chains accumulate no gridding error.
"""

from __future__ import annotations

import re

from .errors import NoConvergenceError, ValidationError
from .measures import Arcsine, Dirac, Semicircle
from .transforms import (
    CAUCHY,
    F,
    R,
    AnalyticMap,
    as_cauchy,
    as_f,
    cauchy,
    invert_stieltjes,
    merge_domains,
)

SUBORDINATION_TOL = 1e-12
SUBORDINATION_MAX_ITER = 500


def _sum_meta(a: AnalyticMap, b: AnalyticMap):
    mean = None if a.mean is None or b.mean is None else a.mean + b.mean
    var = None if a.variance is None or b.variance is None else a.variance + b.variance
    return mean, var


def monotone(fa: AnalyticMap, fb: AnalyticMap) -> AnalyticMap:
    """Monotone convolution on the transform side: ``fa o fb``.

    Mean/variance metadata is propagated only for mean-zero factors, where the
    additivity of both is valid.
    """
    if fa.kind != F or fb.kind != F:
        raise ValidationError("monotone convolution needs two f-kind maps")
    mean = var = None
    if fa.mean == 0.0 and fb.mean == 0.0:
        mean, var = _sum_meta(fa, fb)
    return AnalyticMap(F, lambda z: fa.fn(fb.fn(z)), mean=mean, variance=var)


def anti_monotone(fa: AnalyticMap, fb: AnalyticMap) -> AnalyticMap:
    """Anti-monotone convolution: composition in the reversed order."""
    return monotone(fb, fa)


def free_r(ra: AnalyticMap, rb: AnalyticMap) -> AnalyticMap:
    """Free convolution on the R-transform side: pointwise sum."""
    if ra.kind != R or rb.kind != R:
        raise ValidationError("free_r needs two r-kind maps")
    dom = merge_domains(ra.domain, rb.domain)
    mean, var = _sum_meta(ra, rb)
    return AnalyticMap(R, lambda w: ra.fn(w) + rb.fn(w), mean=mean, variance=var, domain=dom)


def free_subordination(ga: AnalyticMap, gb: AnalyticMap,
                       tol: float = SUBORDINATION_TOL,
                       max_iter: int = SUBORDINATION_MAX_ITER) -> AnalyticMap:
    """Free convolution via the subordination fixed point.

    For each ``z`` the first subordinator ``omega_1(z)`` is the attracting
    fixed point of ``w -> z + H_b(z + H_a(w))`` with ``H = F - id``; the result
    is the Cauchy transform ``z -> G_a(omega_1(z))``.  Picard iteration is
    damped by 0.5 once it stops contracting; exceeding ``max_iter`` raises
    ``NoConvergenceError`` (typical for probes too close to the real axis).
    """
    if ga.kind != CAUCHY or gb.kind != CAUCHY:
        raise ValidationError("free_subordination needs two cauchy-kind maps")

    def h_a(w):
        return 1.0 / ga.fn(w) - w

    def h_b(w):
        return 1.0 / gb.fn(w) - w

    def omega1(z: complex) -> complex:
        z = complex(z)
        w = z
        prev_delta = None
        damped = False
        for _ in range(max_iter):
            nxt = z + h_b(z + h_a(w))
            delta = nxt - w
            if abs(delta) < tol:
                return nxt
            if prev_delta is not None and abs(delta) >= prev_delta:
                damped = True
            w = w + 0.5 * delta if damped else nxt
            prev_delta = abs(delta)
        raise NoConvergenceError(f"no convergence in subordination at z = {z}")

    mean, var = _sum_meta(ga, gb)
    return AnalyticMap(CAUCHY, lambda z: ga.fn(omega1(z)), mean=mean, variance=var)


def materialize(g: AnalyticMap, grid, eps: float):
    """Invert a Cauchy transform back to a gridded measure."""
    return invert_stieltjes(g, grid, eps)


# ---------------------------------------------------------------------------
# Tiny prefix expression language, e.g. "mono(arcsine:1, dirac:0.5)" or
# "free(sc:1, sc:1)".  Operators return f-kind maps for mono/anti and a
# cauchy-kind map for free; a bare leaf parses to its Cauchy transform.

_TOKEN = re.compile(r"\s*([A-Za-z_]+|[(),:]|[-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)")

_LEAVES = {
    "dirac": lambda p: Dirac(p),
    "semicircle": lambda p: Semicircle(p),
    "sc": lambda p: Semicircle(p),
    "arcsine": lambda p: Arcsine(p),
    "arc": lambda p: Arcsine(p),
}


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValidationError(f"bad expression near {text[pos:pos + 12]!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expect=None):
        tok = self.peek()
        if tok is None or (expect is not None and tok != expect):
            raise ValidationError(f"expected {expect!r}, found {tok!r}")
        self.pos += 1
        return tok

    def expr(self) -> AnalyticMap:
        head = self.take()
        if head in ("mono", "anti", "free"):
            self.take("(")
            args = [self.expr()]
            while self.peek() == ",":
                self.take(",")
                args.append(self.expr())
            self.take(")")
            if len(args) < 2:
                raise ValidationError(f"{head} needs at least two arguments")
            return _apply(head, args)
        if head in _LEAVES:
            self.take(":")
            param = float(self.take())
            return cauchy(_LEAVES[head](param))
        raise ValidationError(f"unknown name {head!r} in expression")


def _to_f(m: AnalyticMap) -> AnalyticMap:
    return m if m.kind == F else as_f(m)


def _to_cauchy(m: AnalyticMap) -> AnalyticMap:
    return m if m.kind == CAUCHY else as_cauchy(m)


def _apply(head: str, args) -> AnalyticMap:
    if head == "mono":
        out = _to_f(args[0])
        for nxt in args[1:]:
            out = monotone(out, _to_f(nxt))
        return out
    if head == "anti":
        out = _to_f(args[0])
        for nxt in args[1:]:
            out = anti_monotone(out, _to_f(nxt))
        return out
    out = _to_cauchy(args[0])
    for nxt in args[1:]:
        out = free_subordination(out, _to_cauchy(nxt))
    return out


def parse_expression(text: str) -> AnalyticMap:
    """Parse a convolution expression into an :class:`AnalyticMap`.

    Leaves are ``dirac:a``, ``semicircle:v`` (alias ``sc``), ``arcsine:v``
    (alias ``arc``); operators are ``mono(...)``, ``anti(...)``, ``free(...)``
    with two or more arguments.  ``:`` separates a leaf name from its
    parameter.
    """
    parser = _Parser(_tokenize(text))
    out = parser.expr()
    if parser.peek() is not None:
        raise ValidationError(f"trailing input {parser.peek()!r} in expression")
    return out
