"""Remote Wigner-negativity by photon subtraction in multimode Gaussian states."""

__version__ = "0.1.0"

from .errors import (
    NoPhotonError,
    SteerwigError,
    UndefinedMinimumError,
)
from .factories import Graph, db_to_ratio, epr_state, graph_state, load_graph, parse_graph
from .state import (
    GaussianState,
    ModePair,
    apply_local_symplectic,
    beamsplitter,
    displace,
    extract_pair,
    purity_factor,
    validate_state,
)
from .subtraction import (
    SteeringReport,
    WignerGrid,
    analyze,
    reduced_subtracted_wigner,
    w_min,
    wigner_grid,
)
from .symplectic import is_symplectic, reorder, schur_conditional, williamson_2x2
