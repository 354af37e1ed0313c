import pytest

from nodal_theta.curve import NodalCurveSpec


@pytest.fixture(scope="session")
def spec_a() -> NodalCurveSpec:
    """Square lattice instance; z0, p2, p1 are collinear with p1 - p2 = 0.31 + 0.17i."""
    return NodalCurveSpec(
        tau=1j,
        p1=0.76 + 0.52j,
        p2=0.45 + 0.35j,
        z0=0.14 + 0.18j,
        q0=0.0,
        delta=0.06,
        eps=0.06,
    )


@pytest.fixture(scope="session")
def spec_b() -> NodalCurveSpec:
    """Oblique lattice instance, same collinear placement idea."""
    return NodalCurveSpec(
        tau=0.3 + 0.8j,
        p1=0.745 + 0.23j,
        p2=0.535 + 0.36j,
        z0=0.304 + 0.503j,
        q0=0.0,
        delta=0.06,
        eps=0.06,
    )


@pytest.fixture(scope="session", params=["a", "b"])
def spec_ab(request, spec_a, spec_b) -> NodalCurveSpec:
    return spec_a if request.param == "a" else spec_b
