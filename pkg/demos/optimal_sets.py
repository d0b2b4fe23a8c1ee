"""
Optimal sets and how they grow
==============================

Every optimal set of n-means is built from the level set alpha(l), with
2**l <= n < 2**(l+1). Exactly n - 2**l of its points are split in two.
"""

from cantor_quant import (
    build_level_set,
    build_optimal_set,
    count_optimal_sets,
    enumerate_optimal_sets,
    set_distortion,
    split_step,
    voronoi_boundaries,
)

# alpha(2): each point is a Cell (centroid of a piece) or a Tail (centroid
# of everything to the right of a piece's last sibling)
level = build_level_set(2)
for pt in level:
    print(f"{pt.label:12s} {pt.position}")

# splitting slot 1 (Tail[1,1]) gives one of the four optimal 5-sets
five = build_optimal_set(5, [1])
print([str(x) for x in five.positions], set_distortion(five))
print("boundaries", [str(b) for b in voronoi_boundaries(five)])

# all of them, and how many there are in general
print(len(enumerate_optimal_sets(5)), "optimal 5-sets")
for n in (6, 12, 24, 48):
    print(n, count_optimal_sets(n))

# splitting greedily from alpha(1) walks along optimal sets
current = build_level_set(1)
for n in range(3, 9):
    current = split_step(current)[0]
    print(n, current.labels, set_distortion(current))
