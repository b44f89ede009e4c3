import pytest
from hypothesis import settings

from sbp_fdec.mesh import build_mesh
from sbp_fdec.operators import assemble
from sbp_fdec.sbp import get_operator

settings.register_profile("default", max_examples=30, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def ops_24():
    return assemble(build_mesh(2, 2, 11), get_operator("sbp_24", 12))


@pytest.fixture(scope="session")
def ops_36():
    return assemble(build_mesh(2, 2, 11), get_operator("sbp_36", 12))


@pytest.fixture(scope="session")
def ops_rect():
    """Non-square, non-symmetric mesh to catch x/y mixups."""
    return assemble(build_mesh(3, 2, 7, (0.0, 3.0), (-1.0, 0.5)), get_operator("sbp_24", 8))
