"""Damped-least-squares inverse kinematics for single fingers and the hand.

Position-only: targets are fingertip positions in the chain root frame;
orientation components of the target pose are accepted but ignored (the
fingertip is a ball, its orientation is not actuated independently).

The update is dq = J^T (J J^T + lambda^2 I)^-1 e.  The damping adapts
Levenberg-Marquardt style around the configured value: a step that lowers
the residual is accepted and relaxes the damping, a step that does not is
retried with the damping doubled, so the residual never increases across
accepted iterations.  A configuration where no damping level helps (a fold
local minimum or a pinned limit) triggers a deterministic re-seed of the
finger at fixed posture fractions; the best state seen is what is reported.
On unreachable targets the loop still runs to max_iterations (no early
give-up) and reports the plateaued residual with converged = False.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kinematics import JointState, Pose, clamp_to_limits, link_transform, jacobian
from .robot_model import KinematicChain

# damping retries per iteration before declaring the state stationary
_MAX_RETRIES = 12
_MIN_LAMBDA = 1e-6
# finger re-seed fractions cycled on stationary states (escapes fold minima)
_RESTART_FRACTIONS = (0.25, 0.75, 0.1, 0.9, 0.5)


class IkConfigError(ValueError):
    """Non-positive iteration budget, threshold, or damping."""


@dataclass
class IkConfig:
    max_iterations: int = 100
    residual_threshold: float = 1e-5
    damping_lambda: float = 0.05
    step_scale: float = 1.0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise IkConfigError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if not self.residual_threshold > 0.0:
            raise IkConfigError("residual_threshold must be positive")
        if not self.damping_lambda > 0.0:
            raise IkConfigError("damping_lambda must be positive")
        if not 0.0 < self.step_scale <= 1.0:
            raise IkConfigError("step_scale must lie in (0, 1]")


@dataclass
class IkResult:
    state: JointState
    residual: float
    iterations: int
    converged: bool


def _target_position(target) -> np.ndarray:
    if isinstance(target, Pose):
        return np.asarray(target.position, dtype=float)
    return np.asarray(target, dtype=float).reshape(3)


def solve_finger_ik(chain: KinematicChain, finger: str, target,
                    seed: JointState, config: IkConfig | None = None) -> IkResult:
    """Solve one finger's joints so its end effector reaches `target`.

    Only the finger's own joints move; all other values in `seed` are
    carried through untouched.  Every iterate is clamped to joint limits, so
    the result is always a feasible posture.
    """
    cfg = config or IkConfig()
    f = chain.finger(finger)
    ee = f.end_effector
    target_p = _target_position(target)

    state = clamp_to_limits(chain, seed.copy())

    def residual_of(s: JointState) -> float:
        _, p = link_transform(chain, s, ee)
        return float(np.linalg.norm(target_p - p))

    residual = residual_of(state)
    iterations = 0
    lam = cfg.damping_lambda
    cols = [list(chain.movable).index(ji) for ji in f.joints]
    best_state, best_residual = state, residual
    restarts = 0

    for it in range(1, cfg.max_iterations + 1):
        if residual <= cfg.residual_threshold:
            break
        iterations = it
        _, p = link_transform(chain, state, ee)
        e = target_p - p
        J = jacobian(chain, state, ee)[:, cols]

        accepted = False
        trial_lam = lam
        for _ in range(_MAX_RETRIES + 1):
            A = J @ J.T + trial_lam ** 2 * np.eye(3)
            dq = cfg.step_scale * (J.T @ np.linalg.solve(A, e))
            trial = state.copy()
            for ji, d in zip(f.joints, dq):
                trial.values[ji] = trial.values[ji] + float(d)
            trial = clamp_to_limits(chain, trial)
            trial_residual = residual_of(trial)
            if trial_residual < residual:
                state, residual = trial, trial_residual
                lam = max(trial_lam / 1.5, _MIN_LAMBDA)
                accepted = True
                break
            trial_lam *= 2.0
        if not accepted:
            # stationary at every damping level: remember the best posture and
            # re-seed the finger to hunt for the other solution branch
            if residual < best_residual:
                best_state, best_residual = state, residual
            restarts += 1
            frac = _RESTART_FRACTIONS[restarts % len(_RESTART_FRACTIONS)]
            state = state.copy()
            for ji in f.joints:
                j = chain.joints[ji]
                state.values[ji] = j.lower_limit + frac * (j.upper_limit - j.lower_limit)
            residual = residual_of(state)
            lam = cfg.damping_lambda

    if residual < best_residual:
        best_state, best_residual = state, residual
    return IkResult(state=best_state, residual=best_residual, iterations=iterations,
                    converged=best_residual <= cfg.residual_threshold)


def solve_hand_ik(chain: KinematicChain, targets: dict, seed: JointState,
                  config: IkConfig | None = None) -> dict[str, IkResult]:
    """Independent per-finger solves from a shared seed.

    Fingers do not interact mechanically (separate serial chains off the
    palm), so each solve only touches its own joints.
    """
    return {finger: solve_finger_ik(chain, finger, target, seed, config)
            for finger, target in targets.items()}


def merge_hand_results(chain: KinematicChain, seed: JointState,
                       results: dict[str, IkResult]) -> JointState:
    """Fold per-finger solutions into one full state on top of `seed`."""
    merged = clamp_to_limits(chain, seed.copy())
    for finger, result in results.items():
        for ji in chain.finger(finger).joints:
            merged.values[ji] = result.state.values[ji]
    return merged
