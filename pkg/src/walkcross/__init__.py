"""Discrete potential theory and loop-erased walk crossings on lattice domains."""

from .continuum import (
    ConformalData,
    conformal_data,
    continuum_green,
    covariance_check,
    disk_excursion_kernel,
    disk_green,
    interior_map_angle,
    lambda_disk,
    lambda_rect_exact,
    map_deriv_at_0,
    mobius_disk,
    prop15_leading,
    rect_excursion_kernel,
    rect_interior_kernel,
    theta_boundary,
)
from .experiments import (
    angular_gap_threshold,
    conditional_det,
    conditional_det_experiment,
    crossing_det,
    det_perturbation_bound,
    excursion_ratio_experiment,
    green_conformal_experiment,
    interior_green_ratio_experiment,
    rect_lambda_experiment,
)
from .harmonic import (
    HarmonicField,
    HittingMatrix,
    discrete_laplacian,
    exact_excursion,
    exact_green_matrix,
    exact_poisson_row,
    excursion_kernel,
    excursion_matrix,
    green_row,
    green_via_potential,
    poisson_kernel,
    sample_exit_walk,
)
from .lattice import (
    BoundaryData,
    LatticeDomain,
    boundary,
    build_domain,
    inradius,
    lattice_disk,
    load_domain,
    plus_domain,
    radius,
    save_domain,
    square_domain,
)
from .lerw import (
    CrossingConfig,
    SawPath,
    WalkPath,
    crossing_event_sample,
    crossing_probability_mc,
    loop_erase,
    sample_lerw,
)
from .potential import K0, PotentialConstants, k_x, potential_a
from .report import ExperimentReport, read_csv, render_figure, write_csv

__version__ = "0.1.0"
