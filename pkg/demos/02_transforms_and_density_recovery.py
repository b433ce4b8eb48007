"""The transform stack: Cauchy, F, R, and back to a density.

Every measure has a Cauchy transform G on the upper half-plane; 1/G is the
F-transform, and inverting G near zero gives the R-transform.  The density is
recovered from boundary values of G by Stieltjes-Perron inversion.
"""

import numpy as np

from loewner import (
    Arcsine,
    Semicircle,
    asymptotic_moments,
    cauchy,
    density_at,
    f_transform,
    invert_stieltjes,
    r_transform,
)

print("Transforms of the semicircle law (variance 1) at z = 2i:")
print("  G:", cauchy(Semicircle(1.0))(2j))
print("  F:", f_transform(Semicircle(1.0))(2j))
r = r_transform(cauchy(Semicircle(1.0)))
print("  R(-0.2i) / (-0.2i):", r(-0.2j) / -0.2j, " (the R-transform is v*z)")

print()
print("Mean and variance read off the F-transform at large heights:")
for m in (Semicircle(1.0), Arcsine(2.0)):
    mean, var = asymptotic_moments(f_transform(m))
    print(f"  {m}: mean {mean:+.5f}, variance {var:.5f}")

print()
print("Stieltjes inversion of the arcsine transform, sup error on |x| <= 1.3:")
rec = invert_stieltjes(cauchy(Arcsine(1.0)), np.linspace(-2.0, 2.0, 8001), 1e-3)
xs = rec.grid()
vals = np.asarray(rec.values)
inner = np.abs(xs) <= 1.3
closed = 1.0 / (np.pi * np.sqrt(2.0 - xs[inner] ** 2))
print("  max |recovered - closed| =", float(np.max(np.abs(vals[inner] - closed))))

print()
print("Recovered density vs closed form at a few points:")
for x in (0.0, 0.7, 1.2):
    print(f"  x = {x:4.1f}: recovered {density_at(rec, x):.6f},"
          f" closed {1.0 / (np.pi * np.sqrt(2.0 - x * x)):.6f}")
