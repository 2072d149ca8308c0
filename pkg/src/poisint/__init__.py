"""Structure-preserving one-step integrators for finite-dimensional Poisson systems.

The package splits into five concerns: generic Poisson-system plumbing
(``poisson``), classical one-step methods (``integrators``), composition
methods over exactly integrable flows (``splitting``), the symmetric free
rigid body specialization with its trajectory kernels (``rigidbody``), and
numerical certification of structural properties (``verify``).  The
``poisint`` console script exposes all of it on the command line.
"""

from ._backend import BACKEND, HAVE_COMPILED
from .integrators import (
    ButcherTableau,
    ConvergenceError,
    ImplicitSolverConfig,
    TABLEAUX,
    VectorField,
    explicit_euler_step,
    gauss_legendre_step,
    modified_euler_step,
    rk_step,
    ruth_step,
    symplectic_condition_residual,
    trapezoid_step,
)
from .poisson import (
    PoissonSystem,
    ScalarField,
    canonical_structure,
    fd_gradient,
    hamiltonian_vector_field,
    poisson_bracket,
    structure_matrix,
)
from .rigidbody import (
    RigidBodyParams,
    StepPropagator,
    casimir,
    characteristic_roots,
    coefficient_a1,
    euler_rhs,
    evolve,
    exact_solution,
    flow_axis1,
    flow_axis2,
    flow_axis3,
    hamiltonian,
    kks_form,
    lie_trotter_rigid_step,
    one_step_map,
    orbit_of,
    poisson_system,
    split_scheme,
    step_propagator,
)
from .splitting import (
    CompositionCoefficients,
    ExactFlow,
    SplitScheme,
    composition_coefficients,
    composition_step_count,
    lie_trotter_step,
    strang_application_count,
    strang_step,
    yoshida_step,
)
from .verify import (
    BlowUpError,
    DriftReport,
    OneStepMap,
    OrderEstimate,
    affine_plane_system,
    convergence_order,
    drift,
    fd_jacobian,
    poisson_residual,
    rk1_poisson_condition,
    symplectic_residual_2d,
)

__version__ = "0.1.0"
