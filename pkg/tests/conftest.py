import pytest

from quasivar import ExponentConfig


@pytest.fixture(scope="session")
def coupled_cfg() -> ExponentConfig:
    """Coupled supercritical reference configuration (N=2, p=1.5, s=1)."""
    return ExponentConfig(N=2, p1=1.5, p2=1.5, s1=1.0, s2=1.0,
                          q1=8.0, q2=8.0, gamma1=4.0, gamma2=4.0,
                          theta1=0.125, theta2=0.125, c_star=1.0)


@pytest.fixture(scope="session")
def decoupled_cfg() -> ExponentConfig:
    """Decoupled subcritical reference configuration (N=2, p=2, s=0)."""
    return ExponentConfig(N=2, p1=2.0, p2=2.0, s1=0.0, s2=0.0,
                          q1=4.0, q2=4.0, theta1=0.25, theta2=0.25,
                          c_star=0.0)


@pytest.fixture(scope="session")
def decoupled_cfg_1d() -> ExponentConfig:
    """One-dimensional variant of the decoupled config for BVP oracles."""
    return ExponentConfig(N=1, p1=2.0, p2=2.0, s1=0.0, s2=0.0,
                          q1=4.0, q2=4.0, theta1=0.25, theta2=0.25,
                          c_star=0.0)
