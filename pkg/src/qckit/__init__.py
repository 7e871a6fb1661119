"""Almost periodic point multisets, their diffraction spectra, and almost
periodic entire functions with a prescribed real zero set."""
from .almost_periodic import (
    alpha0,
    decompose,
    estimate_density,
    find_almost_periods,
    is_almost_period,
    krein_levin_sum,
    phi_almost_periods,
)
from .entire import (
    EvalConfig,
    check_almost_periodicity_on_line,
    check_type_criterion,
    eval_F,
    eval_f,
    eval_g,
    eval_logderiv_direct,
    eval_logderiv_spectral,
)
from .errors import QCKitError
from .generators import LatticeSpec, TrigPolySpec, gen_lattice, gen_trig_poly_zeros, gen_union
from .multiset import PointMultiset, Window, build_multiset, count_in_window, discrepancy_stats
from .poisson import GaussianTest, poisson_residual
from .spectrum import Spectrum, bohr_coefficient, lattice_spectrum, mass_growth, union_spectrum

__version__ = "0.1.0"
