"""Signal reconstruction from uniform samples through the Koopman generator."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AliasingBoundaryError,
    BasisDegeneracyError,
    BranchCutError,
    InconsistencyError,
    InsufficientDataError,
    KoopmanSamplingError,
    NumericalFailure,
    PreconditionError,
    RangeError,
    UndefinedSNRError,
    UnsupportedKindError,
)
from .signals import (  # noqa: E402
    PRESETS,
    CardinalSine,
    SignalTerm,
    SpectrumReport,
    TermSum,
    Verdict,
    evaluate,
    koopman_spectrum,
    load_signal,
    min_space_dimension,
)
from .sampling import (  # noqa: E402
    HankelPair,
    SampleSet,
    add_white_noise,
    build_hankel,
    sample,
    select_dimension,
)
from .koopman import (  # noqa: E402
    KoopmanModel,
    ReconstructionSeries,
    estimate_spectrum,
    fit,
    identify,
    propagate,
    reconstruct,
    reconstruct_windowed,
)
from .closed_form import (  # noqa: E402
    ExpSincConfig,
    PolyExpStructure,
    build_poly_exp_koopman_block,
    exp_sinc_reconstruct,
    pbh_time_delay_test,
    poly_exp_closed_form,
    sinc_reconstruct,
    truncation_bound,
)
from .baselines import BaselineMethod, baseline_reconstruct  # noqa: E402
