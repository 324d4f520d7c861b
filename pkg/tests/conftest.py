import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def central_difference(f, z, h=1e-6):
    """Central difference oracle for ``f`` at ``z``."""
    return (f(z + h) - f(z - h)) / (2 * h)


@pytest.fixture
def fd():
    return central_difference
