"""Admittance control through an entry port with forbidden-region barriers."""

from ._kernels import BACKEND as KERNEL_BACKEND
from .admittance import (
    AdmittanceConfig,
    AdmittanceState,
    DampingParams,
    WrenchSample,
    admittance_step,
    transform_human_wrench,
    variable_damping,
)
from .constraint import (
    RcmFrame,
    alignment_error,
    constraint_jacobians,
    decoupling_maps,
    null_basis,
    rcm_error,
    rcm_frame,
    split_velocity,
)
from .errors import (
    AlignmentError,
    ConfigError,
    ConstraintViolationError,
    FaultStopError,
    SingularityError,
)
from .kinematics import (
    KinematicChain,
    JointState,
    ToolPose,
    default_chain,
    forward_kinematics,
    geometric_jacobian,
    port_on_tool_axis,
    redundancy_null_base,
)
from .potential import (
    ForbiddenRegion,
    RepulsionResult,
    capsule_nearest,
    capsule_repulsion,
    covering_radius,
    load_point_cloud,
    potential_at,
    tip_repulsion,
)

__version__ = "0.1.0"
