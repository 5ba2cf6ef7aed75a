"""Walk through exact transport norms on a three-point ultrametric space.

Run:  python demos/transport_norms.py
"""

from fractions import Fraction

from ultrafree import (
    FiniteMetricSpace,
    dirac,
    free_norm,
    free_norm_certificate,
    lip_norm,
    molecule,
    validate,
)

s = Fraction(1, 2)
space = FiniteMetricSpace(
    ("0", "x", "y"),
    ((0, 1, 1), (1, 0, s), (1, s, 0)),
)

print("Space:", dict(zip(space.labels, [list(map(str, row)) for row in space.dist])))
print("Validation:", validate(space))
print()

dx, dy = dirac(space, 1), dirac(space, 2)
print("Norms of evaluation combinations (all exact rationals):")
for name, v in [("dx", dx), ("dy", dy), ("dx - dy", dx - dy), ("dx + dy", dx + dy)]:
    print(f"  |{name}| = {free_norm(space, v)}")
print()

print("Every norm comes with a flow and a matching dual potential:")
cert = free_norm_certificate(space, dx - 2 * dy)
print(f"  |dx - 2 dy| = {cert.value}")
for i, j, amount in cert.flow:
    print(f"    ship {amount} from {space.labels[i]} to {space.labels[j]}")
print(f"  potential: {dict(zip(space.labels, map(str, cert.potential.values)))}")
print(f"  potential Lipschitz norm: {lip_norm(space, cert.potential)} (must be <= 1)")
print()

print("Molecules (normalized evaluation differences) all have norm exactly 1:")
for i in range(3):
    for j in range(i + 1, 3):
        m = molecule(space, i, j)
        print(f"  molecule({space.labels[i]}, {space.labels[j]}): norm {free_norm(space, m)}")
