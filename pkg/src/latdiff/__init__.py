"""Sampling, correlation estimates and diffraction spectra for planar lattice systems.

Four systems are covered: i.i.d. (Bernoulli) weights, the Ledrappier shift, the
(x2,x3) shift on the circle and a Rudin-Shapiro product comb.
"""

__version__ = "0.1.0"

from .lattice import (  # noqa: E402
    Alphabet,
    ComplexWindow,
    FiniteCircle,
    LatticeError,
    LatticeVector,
    OutOfWindowError,
    Rademacher,
    UniformCircle,
    WeightWindow,
    comb_weights,
    lookup,
    translate,
)
from .samplers import (  # noqa: E402
    Bernoulli,
    Ledrappier,
    PhaseFixedPoint,
    RudinShapiro2D,
    SamplerSpec,
    Times23,
    sample,
)
from .correlations import (  # noqa: E402
    CorrelationQuery,
    CorrelationTable,
    autocorr_coefficient,
    autocorr_table,
    correlation,
    correlation_convergence,
)
