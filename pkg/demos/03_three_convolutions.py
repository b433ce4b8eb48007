"""Free, monotone, and anti-monotone convolutions.

Monotone convolution composes F-transforms; the arcsine family is stable
under it.  Free convolution adds R-transforms; the semicircle family is
stable under it, and the subordination fixed point gives a second,
independent route to the same measure.
"""

import numpy as np

from loewner import (
    Arcsine,
    Empirical,
    Semicircle,
    cauchy,
    cauchy_from_r,
    f_transform,
    free_r,
    free_subordination,
    monotone,
    parse_expression,
    r_transform,
)

probes = (2j, 1 + 2j, 3j)

print("Arcsine stability under monotone convolution: A(1) > A(1) = A(2)")
f = monotone(f_transform(Arcsine(1.0)), f_transform(Arcsine(1.0)))
want = f_transform(Arcsine(2.0))
for z in probes:
    print(f"  z={z!s:>6}: composed {f(z):.10f}  closed {want(z):.10f}")

print()
print("Semicircle stability under free convolution, two routes:")
g_sub = free_subordination(cauchy(Semicircle(1.0)), cauchy(Semicircle(1.0)))
g_r = cauchy_from_r(free_r(r_transform(cauchy(Semicircle(1.0))),
                           r_transform(cauchy(Semicircle(1.0)))))
g_closed = cauchy(Semicircle(2.0))
for z in probes:
    print(f"  z={z!s:>6}: subordination {g_sub(z):.10f}  R-addition {g_r(z):.10f}"
          f"  closed {g_closed(z):.10f}")

print()
print("A two-point law freely convolved with itself gives the arcsine shape:")
bern = Empirical(atoms=((-1.0, 0.5), (1.0, 0.5)))
g = free_subordination(cauchy(bern), cauchy(bern))
for z in probes:
    closed = 1.0 / (np.sqrt(complex(z * z - 4.0)))
    closed = closed if closed.imag < 0 else -closed
    print(f"  z={z!s:>6}: G {g(z):.10f}  1/sqrt(z^2-4) {closed:.10f}")

print()
print("The same computations through the expression language:")
amap = parse_expression("mono(arcsine:1, arcsine:1)")
print('  mono(arcsine:1, arcsine:1) at 2i ->', amap(2j), ' (expect i*sqrt(8))')
amap = parse_expression("free(sc:1, sc:1)")
print('  free(sc:1, sc:1) at 2i       ->', amap(2j), ' (expect G of W(2))')
