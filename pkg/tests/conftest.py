"""Shared fixtures: the two reference maps and their derived objects.

Everything heavy is session-scoped; all tests treat these as read-only.
"""

import pytest

from poincarelab import (
    QuadMap,
    RotationAngle,
    build_poincare_map,
    build_siegel_map,
    find_base_preimage,
)


@pytest.fixture(scope="session")
def golden_angle():
    return RotationAngle.golden()


@pytest.fixture(scope="session")
def golden_map(golden_angle):
    return QuadMap(kind="lambda", param=golden_angle.lam)


@pytest.fixture(scope="session")
def golden_siegel(golden_angle):
    return build_siegel_map(golden_angle, N=256)


@pytest.fixture(scope="session")
def golden_poincare(golden_map):
    return build_poincare_map(golden_map, N=64)


@pytest.fixture(scope="session")
def golden_branch(golden_poincare, golden_siegel):
    return find_base_preimage(golden_poincare, golden_siegel)


@pytest.fixture(scope="session")
def cheb_map():
    return QuadMap(kind="c", param=complex(-2.0, 0.0))


@pytest.fixture(scope="session")
def cheb_poincare(cheb_map):
    return build_poincare_map(cheb_map, N=64)
