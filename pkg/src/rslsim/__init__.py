"""Resource speed limits and relative-entropy QSLs for small open quantum systems."""

from .bounds import (
    BoundReport,
    bound_qsl,
    bound_Td,
    bound_Tg,
    bound_TM,
    bound_Ttilde,
    evaluate_bounds,
    min_time_mu,
    time_average,
)
from .dynamics import (
    ChannelSpec,
    Trajectory,
    entropy_rate,
    integrate_lindblad,
    liouvillian_at,
    make_trajectory,
    state_at,
    thermal_generator,
    unitary_trajectory,
)
from .qcore import (
    DensityMatrix,
    HermitianOperator,
    IntegrationError,
    InvalidStateError,
    UnsupportedStateError,
    dephase,
    matrix_log_floor,
    partial_trace,
    relative_entropy,
    tensor,
    von_neumann_entropy,
)
from .resources import (
    FixedStateOracle,
    FreeStateOracle,
    GibbsOracle,
    IncoherentOracle,
    SearchConfig,
    SearchResult,
    WernerSeparableOracle,
    separable_search,
)
from .states import bell_phi_plus, gibbs_state, maximally_mixed, plus_y, werner

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "ChannelSpec",
    "DensityMatrix",
    "FixedStateOracle",
    "FreeStateOracle",
    "GibbsOracle",
    "HermitianOperator",
    "IncoherentOracle",
    "IntegrationError",
    "InvalidStateError",
    "SearchConfig",
    "SearchResult",
    "Trajectory",
    "UnsupportedStateError",
    "WernerSeparableOracle",
    "bell_phi_plus",
    "bound_TM",
    "bound_Td",
    "bound_Tg",
    "bound_Ttilde",
    "bound_qsl",
    "dephase",
    "entropy_rate",
    "evaluate_bounds",
    "gibbs_state",
    "integrate_lindblad",
    "liouvillian_at",
    "make_trajectory",
    "matrix_log_floor",
    "maximally_mixed",
    "min_time_mu",
    "partial_trace",
    "plus_y",
    "relative_entropy",
    "separable_search",
    "state_at",
    "tensor",
    "thermal_generator",
    "time_average",
    "unitary_trajectory",
    "von_neumann_entropy",
    "werner",
]
