"""covsys: exact numerics for covariance systems.

Multiplier validation, covariant states, the generalized GNS construction,
twisted crossed products, the nonrelativistic worked examples, and the
quasifree quantum-spacetime kernel; `covctl` exposes all of it on the command
line.
"""

__version__ = "0.1.0"

from .algebra import (
    Algebra,
    AlgebraElement,
    Automorphism,
    apply_automorphism,
    is_positive,
    make_function_algebra,
    make_matrix_algebra,
)
from .errors import (
    ConstructionError,
    CovsysError,
    DomainError,
    InputError,
    IntertwinerError,
    QuadratureError,
)
from .groups import (
    FiniteGroup,
    GalileiElement,
    finite_group,
    galilei_compose,
    product_cyclic,
    rotation_about,
    so3_section,
    su2_to_so3,
)
from .multipliers import (
    Action,
    MultiplierTable,
    ValidationReport,
    galilei_cocycle,
    heisenberg_multiplier,
    left_to_right,
    right_to_left,
    spin_cocycle,
    trivial_multiplier,
    validate_left,
    validate_right,
)
from .states import (
    CovariantState,
    CovarianceSystem,
    delta_state,
    gram_matrix,
    state_from_rep,
    validate_state,
)
from .gns import GnsRep, find_intertwiner, gns_build, verify_reconstruction
from .crossed import (
    CrossedElement,
    CrossedProduct,
    extend_state,
    integrated_rep,
    twisted_convolve,
    twisted_involution,
)
from .qst import (
    QstParams,
    SigmaPoint,
    commutator_forms,
    epsilon_matrix,
    eta_matrix,
    gram_positivity,
    moments_via_kernel,
    qst_multiplier,
    quasifree_kernel,
    second_moments,
    transport_T,
)
