import numpy as np
import pytest

from rcmadmit import (
    default_chain,
    forward_kinematics,
    geometric_jacobian,
    port_on_tool_axis,
    redundancy_null_base,
)

Q0_DEG = [20.0, 50.0, 0.0, -70.0, 0.0, 60.0, 0.0]


@pytest.fixture(scope="session")
def chain():
    return default_chain()


@pytest.fixture(scope="session")
def q0():
    return np.deg2rad(Q0_DEG)


@pytest.fixture(scope="session")
def pose0(chain, q0):
    return forward_kinematics(chain, q0)


@pytest.fixture(scope="session")
def p_c(pose0):
    """Entry port recorded on the tool axis at table height."""
    return port_on_tool_axis(pose0, z=0.0)


@pytest.fixture(scope="session")
def W(chain):
    return 1.5 * np.eye(chain.dof)


def sample_configurations(chain, q0, count, seed=0, spread=0.45, min_sv=1e-3):
    """Random reachable configurations around the working pose.

    Rejects near-singular samples so the constraint maps are well defined,
    matching the assumption of motion away from singularities.
    """
    rng = np.random.default_rng(seed)
    lo, hi = chain.lower_limits(), chain.upper_limits()
    out = []
    while len(out) < count:
        q = np.clip(q0 + rng.uniform(-spread, spread, chain.dof), lo, hi)
        J = geometric_jacobian(chain, q)
        if np.linalg.svd(J, compute_uv=False)[-1] > min_sv:
            out.append(q)
    return out


@pytest.fixture(scope="session")
def random_configs(chain, q0):
    return sample_configurations(chain, q0, 200, seed=7)


def frame_at(chain, q, p_c, W):
    from rcmadmit import rcm_frame

    pose = forward_kinematics(chain, q)
    J = geometric_jacobian(chain, q)
    G = redundancy_null_base(chain, J)
    return pose, J, G, rcm_frame(pose, J, G, p_c, W)
