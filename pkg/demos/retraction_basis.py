"""Build the nearest-point retraction chain and its monotone basis.

Run:  python demos/retraction_basis.py
"""

from fractions import Fraction

from ultrafree import (
    FiniteMetricSpace,
    basis_constant,
    basis_vectors,
    build_chain,
    expand_in_basis,
    dirac,
    random_ultrametric,
    verify_chain,
    verify_projection_algebra,
)

s = Fraction(1, 2)
space = FiniteMetricSpace(("0", "x", "y"), ((0, 1, 1), (1, 0, s), (1, s, 0)))

chain = build_chain(space)
print("Nearest-position table (stage n keeps the first n ordered points):")
for n, row in enumerate(chain.ranks, start=1):
    images = [space.labels[chain.retract(n, x)] for x in range(len(space))]
    print(f"  stage {n}: {dict(zip(space.labels, images))}")
print()

report = verify_chain(chain)
print("Chain identities (1-Lipschitz, commutation, locality):", "all hold" if report.passed else report)
algebra = verify_projection_algebra(chain, include_norms=True)
print("Projection algebra P_n P_m = P_min and unit norms:", "all hold" if algebra.passed else algebra)
print()

family = basis_vectors(chain)
print("Basis vectors (telescoped evaluation differences) and norms:")
for vec, norm in zip(family.vectors, family.norms):
    print(f"  coeffs {tuple(map(str, vec.coeffs))}  norm {norm}")
print("Expansion of dy in the basis:", expand_in_basis(family, dirac(space, 2)))
print("Basis constant (1 = monotone):", basis_constant(space, family))
print()

print("On a larger random ultrametric space the constant is still exactly 1:")
big = random_ultrametric(9, seed=3)
big_chain = build_chain(big)
print("  chain identities:", "all hold" if verify_chain(big_chain).passed else "violated")
print("  basis constant:", basis_constant(big, basis_vectors(big_chain)))
print()

print("Without ultrametricity the same construction can fail; the reports")
print("record violations instead of asserting their absence:")
line = FiniteMetricSpace(("0", "1", "2"), ((0, 1, 2), (1, 0, 1), (2, 1, 0)))
bad_chain = build_chain(line, (0, 2, 1))
bad_report = verify_chain(bad_chain)
print("  1-Lipschitz violations:", bad_report.one_lipschitz)
print("  basis constant:", basis_constant(line, basis_vectors(bad_chain)))
