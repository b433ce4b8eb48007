"""The semicircle family as the fixed point of the Loewner correspondence.

Feeding the flow the semicircle family nu_t = W(t) returns the very same
family: 1/f_t is the semicircle Cauchy transform of variance t, and it
solves the complex inviscid Burgers equation dG/dt + G dG/dz = 0.  Any other
driver leaves a visible residual.
"""

import numpy as np

from loewner import (
    SemicircleFamily,
    burgers_residual,
    burgers_residual_of,
    constant_driver,
    inverse_map,
)

d = SemicircleFamily()

print("1/f_t matches the closed semicircle transform (t = 1):")
for z in (2j, 1 + 2j, 3j):
    got = 1.0 / inverse_map(d, 1.0, z)
    root = np.sqrt(complex(z * z - 4.0))
    root = root if root.imag > 0 else -root
    print(f"  z={z!s:>6}: 1/f_1 {got:.12f}   2/(z+sqrt(z^2-4)) {2.0 / (z + root):.12f}")

ts = np.linspace(0.2, 1.0, 5)
zs = np.linspace(-1.0, 1.0, 5) + 1.0j

print()
print("Burgers residual through the flow:", burgers_residual(d, ts, zs))


def closed_g(t, z):
    if t <= 0:
        return 1.0 / z
    root = np.sqrt(complex(z * z - 4.0 * t))
    root = root if root.imag > 0 else -root
    return 2.0 / (z + root)


print("Burgers residual of the closed form:", burgers_residual_of(closed_g, ts, zs))
print("Residual for a non-fixed-point driver (constant at 0):",
      burgers_residual(constant_driver(0.0), [0.5], [1.2j]))
