"""Five-finger grasp synthesis and stability validation toolkit."""

from .config import (
    ConfigError,
    ScenarioConfig,
    default_scenario_path,
    load_scenario,
)
from .contact import ContactPoint, closest_point_box, detect_contacts
from .controller import (
    LogStep,
    RunConfig,
    RunConfigError,
    TrajectoryLog,
    execute_grasp,
    step_servo,
    write_trajectory_csv,
)
from .grasp_validation import (
    GraspAssessment,
    ValidationConfig,
    ValidationConfigError,
    grasp_center,
    validate_grasp,
)
from .ik_solver import (
    IkConfig,
    IkConfigError,
    IkResult,
    merge_hand_results,
    solve_finger_ik,
    solve_hand_ik,
)
from .kinematics import (
    JointState,
    KinematicsError,
    Pose,
    clamp_to_limits,
    forward_kinematics,
    jacobian,
    link_transform,
    mid_range_state,
    neutral_state,
    within_limits,
    zero_state,
)
from .metrics import (
    FingerMetrics,
    MetricsError,
    RunSummary,
    movement_efficiency,
    path_length,
    positional_error,
    summarize_run,
    write_metrics_csv,
)
from .perturbation import (
    PerturbConfig,
    PerturbConfigError,
    PerturbationReport,
    object_response,
    perturb_contacts,
    perturbation_test,
    write_samples_csv,
)
from .robot_model import (
    BoxGeometry,
    CapsuleGeometry,
    Finger,
    JointSpec,
    KinematicChain,
    LinkSpec,
    RobotDescriptionError,
    SphereGeometry,
    UnknownFingerError,
    ValidationError,
    bundled_hand_path,
    load_robot_description,
    parse_robot_description,
    serialize_robot_description,
)
from .scene import (
    PhysicalParams,
    Scene,
    SceneError,
    SceneObject,
    base_from_world,
    default_grasp_targets,
    default_scene,
    make_box_object,
    world_from_base,
)
from .transforms import Transform

__version__ = "0.1.0"

__all__ = [
    "BoxGeometry",
    "CapsuleGeometry",
    "ConfigError",
    "ContactPoint",
    "Finger",
    "FingerMetrics",
    "GraspAssessment",
    "IkConfig",
    "IkConfigError",
    "IkResult",
    "JointSpec",
    "JointState",
    "KinematicChain",
    "KinematicsError",
    "LinkSpec",
    "LogStep",
    "MetricsError",
    "PerturbConfig",
    "PerturbConfigError",
    "PerturbationReport",
    "PhysicalParams",
    "Pose",
    "RobotDescriptionError",
    "RunConfig",
    "RunConfigError",
    "RunSummary",
    "Scene",
    "SceneError",
    "SceneObject",
    "ScenarioConfig",
    "SphereGeometry",
    "Transform",
    "TrajectoryLog",
    "UnknownFingerError",
    "ValidationConfig",
    "ValidationConfigError",
    "ValidationError",
    "base_from_world",
    "bundled_hand_path",
    "clamp_to_limits",
    "closest_point_box",
    "default_grasp_targets",
    "default_scenario_path",
    "default_scene",
    "detect_contacts",
    "execute_grasp",
    "forward_kinematics",
    "grasp_center",
    "jacobian",
    "link_transform",
    "load_robot_description",
    "load_scenario",
    "make_box_object",
    "merge_hand_results",
    "mid_range_state",
    "movement_efficiency",
    "neutral_state",
    "object_response",
    "path_length",
    "perturb_contacts",
    "perturbation_test",
    "positional_error",
    "serialize_robot_description",
    "solve_finger_ik",
    "solve_hand_ik",
    "step_servo",
    "summarize_run",
    "validate_grasp",
    "within_limits",
    "world_from_base",
    "write_metrics_csv",
    "write_samples_csv",
    "write_trajectory_csv",
    "zero_state",
]
