"""Phase-space representations of quantum states and bipartite entanglement."""

from .gaussian import (
    GaussianState,
    epr_state,
    gaussian_from_ground,
    partial_trace,
    propagate,
    uncertainty_delta,
)
from .grid import (
    Axis,
    PhaseGrid,
    chord_section,
    moments_from_chord,
    project_marginal,
    read_grid,
    sample,
    symplectic_fourier,
    write_grid,
)
from .states import (
    AnalyticState,
    Cat,
    Coherent,
    Fock,
    GaussianPure,
    Product,
    Transformed,
    eval_chord,
    eval_position_wavefunction,
    eval_wigner,
    fock_wigner_asymptotic,
    laguerre,
)
from .symplectic import (
    AffineMap,
    PhasePoint,
    apply_affine,
    coupling_rotation,
    is_symplectic,
    skew_product,
)

__version__ = "0.1.0"
