"""Multi-frequency far-field imaging of pulsed moving sources.

Synthesizes band-limited far-field data for a source that emits pulses while
moving, assembles the discrete band operator per observation direction, and
reconstructs emission instants, enclosing strips, direction-limited convex
hulls and trajectories from spectral-series indicators.
"""

from . import backends
from .errors import (ConfigError, ConvergenceError, DimensionError, MfsiError,
                     NoSupportError)
from .forward import (Constant, FarFieldBand, FrequencyGrid, GaussianBlob,
                      Polynomial2D, SourceScene, far_field, far_field_band,
                      make_profile, receiver_signal)
from .geometry import (Ball, Kite, ProjectionInterval, RoundedSquare,
                       SamplingGrid, convex_hull, direction,
                       distance_outside_hull, in_strip, make_shape,
                       make_trajectory)
from .imaging import (IndicatorField, PulseEstimate, TestVector,
                      estimate_pulse, moment_profile, normalize,
                      picard_indicator, scan_field, strip_field, test_vector,
                      w_indicator)
from .operators import (NoiseSpec, ToeplitzMatrix, add_noise,
                        assemble_toeplitz, spectral_norm)
from .scenario import Scenario, load_scenario, load_scenario_file
from .spectral import (EigenSystem, SharpOperator, hermitian_eigen,
                       sharpen, spectral_abs)

__version__ = "0.1.0"
