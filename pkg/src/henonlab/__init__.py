"""Radial least-energy solutions of the Hénon problem on the unit disc.

The package computes positive and nodal radial solutions, their singular
eigenvalue spectra and Morse indices, and the Liouville-type limit objects
that describe them as the exponent ``p`` grows.
"""

from henonlab.constants import (
    ELL,
    ProblemParams,
    UniversalConstants,
    alpha_resonances,
    delta1_of_alpha,
    delta2_of_alpha,
    delta_of_ell,
    ell_alpha,
    gamma_of_ell,
    mu_limits,
    root_tbar,
    universal_constants,
)
from henonlab.shooting import (
    IntegrationError,
    RadialSolution,
    Trajectory,
    integrate_ivp,
    rescale,
    scaling_report,
    solve_radial,
    to_henon,
)
from henonlab.spectral import (
    SpectralResult,
    finite_spectrum,
    henon_side_oracle,
    limit_spectrum,
)
from henonlab.morse import (
    MorseReport,
    asymptotic_morse,
    asymptotic_sym_morse,
    full_report,
    morse_index,
    morse_index_sym,
    multiplicity,
)

__version__ = "0.1.0"
