"""Embed an ultrametric space into its quotient tree and retract back.

Run:  python demos/tree_embedding.py
"""

from fractions import Fraction

from ultrafree import (
    FiniteMetricSpace,
    TreePoint,
    branching_points,
    dendrogram,
    four_point_check,
    retract_to_space,
    round_to_dyadic,
    segment_point,
    tree_distance,
    verify_branching_witnesses,
    verify_retraction_claims,
    verify_segment_axioms,
)

s = Fraction(1, 2)
space = FiniteMetricSpace(("0", "x", "y"), ((0, 1, 1), (1, 0, s), (1, s, 0)))

print("Leaves embed isometrically at height 0:")
for i in range(3):
    for j in range(i + 1, 3):
        rho = tree_distance(space, TreePoint(i, 0), TreePoint(j, 0))
        print(f"  rho({space.labels[i]}, {space.labels[j]}) = {rho} = d")
print()

print("Branching points (anchor, height):")
branching = branching_points(space)
for p in branching:
    witness = verify_branching_witnesses(space, p)
    print(f"  <{space.labels[p.anchor]}, {p.height}>  witnesses pass: {witness.passed}")
print()

apex = segment_point(space, TreePoint(1, 0), TreePoint(2, 0), s / 2)
print(f"Midpoint of the segment from x to y is the apex <x, {apex.height}>")
print("Segment axioms on sampled grids:", "hold" if verify_segment_axioms(space).passed else "violated")
nodes = [TreePoint(i, 0) for i in range(3)] + branching
print("Four-point condition over all node quadruples:", "holds" if four_point_check(space, nodes).passed else "violated")
print()

tree = dendrogram(space)
print("Dendrogram (node -> parent, edge length):")
for k, node in enumerate(tree.nodes):
    parent = tree.parent[k]
    target = "-" if parent < 0 else f"<{space.labels[tree.nodes[parent].anchor]}, {tree.nodes[parent].height}>"
    print(f"  <{space.labels[node.anchor]}, {node.height}> -> {target}   edge {tree.edge_length[k]}")
print()

claims = verify_retraction_claims(space)
print("Retraction bounds (leaf-branch factor 2, branch-branch factor 4): pass =", claims.passed)
print("Attained Lipschitz constant of the retraction:", claims.attained_constant)
print("  (this instance attains the worst case exactly)")
print()

print("A rounded random space goes through the same machinery:")
from ultrafree import random_ultrametric

rounded = round_to_dyadic(random_ultrametric(7, seed=1))
print("  branching points:", len(branching_points(rounded)))
print("  retraction constant:", verify_retraction_claims(rounded).attained_constant)
print("  retraction of the top branching point:",
      rounded.labels[retract_to_space(rounded, branching_points(rounded)[-1])])
