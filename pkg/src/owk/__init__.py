"""One-way half-plane lattice walk: Green functions, hitting laws and
Martin kernels by Fourier quadrature and seeded Monte Carlo."""

from .analytic import (NumericError, death_chain_pgf, embedded_cf,
                       embedded_cf_closed, excursion_cf, extract_singularity,
                       first_return_pgf, geom_cf, level_cf)
from .green import (QuadratureSpec, gamma, green_embedded, green_halfplane,
                    hitting_distribution, mu_x)
from .lattice import (HALF_PLANE, DriftProfile, LatticeError, LatticePoint,
                      Orientation, WalkParams, out_neighbors, transition_kernel)
from .martin import (DirectionSpec, averaged_axis_kernel,
                     boundary_triviality_report, martin_kernel_axis,
                     martin_kernel_embedded, martin_kernel_full)
from .rng import SeededStream
from .simulate import (empirical_cf, estimate_green, run_excursion,
                       sample_excursions)

__version__ = "0.1.0"

__all__ = [
    "DirectionSpec", "DriftProfile", "HALF_PLANE", "LatticeError",
    "LatticePoint", "NumericError", "Orientation", "QuadratureSpec",
    "SeededStream", "WalkParams", "averaged_axis_kernel",
    "boundary_triviality_report", "death_chain_pgf", "embedded_cf",
    "embedded_cf_closed", "empirical_cf", "estimate_green", "excursion_cf",
    "extract_singularity", "first_return_pgf", "gamma", "geom_cf",
    "green_embedded", "green_halfplane", "hitting_distribution", "level_cf",
    "martin_kernel_axis", "martin_kernel_embedded", "martin_kernel_full",
    "mu_x", "out_neighbors", "run_excursion", "sample_excursions",
    "transition_kernel",
]
