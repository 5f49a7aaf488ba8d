import random

import pytest

from drinfeld_periods.cinf import Context
from drinfeld_periods.drinfeld import DrinfeldModule
from drinfeld_periods.ffield import FiniteField
from drinfeld_periods.periods import compute_lattice


@pytest.fixture(scope="session")
def ctx():
    return Context(FiniteField(3, 1, 4), 8)


@pytest.fixture(scope="session")
def theta(ctx):
    return ctx.theta()


@pytest.fixture(scope="session")
def rho(ctx):
    """The default CM module rho_t = theta + tau^2."""
    return DrinfeldModule(ctx, ctx.zero(), ctx.one())


@pytest.fixture(scope="session")
def carlitz(ctx):
    return DrinfeldModule.carlitz(ctx)


@pytest.fixture(scope="session")
def lattice(rho):
    return compute_lattice(rho, 3, 3)


@pytest.fixture(scope="session")
def rho_theta(ctx, theta):
    """rho_t = theta + theta tau^2, handled through the monic twist."""
    return DrinfeldModule(ctx, ctx.zero(), theta)


@pytest.fixture(scope="session")
def lattice_theta(rho_theta):
    return compute_lattice(rho_theta, 3, 3)


@pytest.fixture
def rng():
    return random.Random(20240611)
