"""Optimal quantization of the Cantor measure generated by infinitely many similitudes.

The measure P on [0, 1] satisfies ``P = sum_j 2**-j P o S_j^-1`` with
``S_j(x) = x/3**j + 1 - 1/3**(j-1)``.  This package builds its optimal sets of
n-means and exact n-th quantization errors in rational arithmetic, and checks
them against exact 1-D k-means on a certified discretisation of P.
"""

from .measure import (
    Interval,
    apply_similitude,
    apply_word_map,
    cell_centroid,
    cell_distortion,
    cell_error,
    cell_interval,
    moments,
    self_similar_integral_check,
    tail_centroid,
    tail_centroid_level,
    tail_distortion,
)
from .oracle import DiscreteMeasure, compare, discretize, kmeans_exact_dp, lloyd
from .quantizer import (
    LabeledPoint,
    QuantizerSet,
    build_level_set,
    build_optimal_set,
    centroid_condition_check,
    count_optimal_sets,
    enumerate_optimal_sets,
    level_index,
    quantization_error,
    set_distortion,
    split_step,
    voronoi_boundaries,
)
from .words import (
    concat,
    contraction_ratio,
    drop_last,
    prob_weight,
    tail_mass,
    tail_representative,
)

__version__ = "0.1.0"
