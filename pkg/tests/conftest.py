"""Shared fixtures: the bundled hand/scenario and one full controller run.

The controller run takes a few seconds, so it is computed once per session
and treated as read-only by every test that inspects it.
"""

import pytest

try:
    from hypothesis import settings
except ImportError:  # hypothesis is an optional test dependency
    settings = None

from graspforge.config import default_scenario_path, load_scenario
from graspforge.controller import execute_grasp
from graspforge.robot_model import bundled_hand_path, load_robot_description

if settings is not None:
    # numerical property tests on the 21-joint chain can outrun the default
    # per-example deadline on slow runners; wall-clock is bounded by max_examples
    settings.register_profile("graspforge", deadline=None)
    settings.load_profile("graspforge")


TWO_LINK_ARM = """
<robot name="planar_arm">
  <link name="base"/>
  <link name="upper"/>
  <link name="fore"/>
  <link name="tip"/>
  <joint name="arm_shoulder" type="revolute">
    <parent link="base"/>
    <child link="upper"/>
    <origin xyz="0 0 0"/>
    <axis xyz="0 0 1"/>
    <limit lower="-3.1415926535897931" upper="3.1415926535897931"/>
  </joint>
  <joint name="arm_elbow" type="revolute">
    <parent link="upper"/>
    <child link="fore"/>
    <origin xyz="1 0 0"/>
    <axis xyz="0 0 1"/>
    <limit lower="-3.1415926535897931" upper="3.1415926535897931"/>
  </joint>
  <joint name="arm_tip" type="fixed">
    <parent link="fore"/>
    <child link="tip"/>
    <origin xyz="1 0 0"/>
  </joint>
</robot>
"""


@pytest.fixture(scope="session")
def chain():
    return load_robot_description(bundled_hand_path())


@pytest.fixture(scope="session")
def scenario():
    return load_scenario(default_scenario_path())


@pytest.fixture(scope="session")
def grasp_run(scenario):
    """(final state, trajectory log, assessment) for the bundled scenario."""
    return execute_grasp(scenario.scene, scenario.targets, scenario.run,
                         scenario.ik, scenario.validation)


@pytest.fixture()
def two_link():
    from graspforge.robot_model import parse_robot_description
    return parse_robot_description(TWO_LINK_ARM)
