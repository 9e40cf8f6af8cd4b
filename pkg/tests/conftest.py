import numpy as np
import pytest

from ltisec import Tol, aircraft_path, load_scenario


@pytest.fixture(scope="session")
def tol():
    return Tol()


@pytest.fixture(scope="session")
def aircraft():
    return load_scenario(aircraft_path())


@pytest.fixture(scope="session")
def aircraft_sys(aircraft):
    return aircraft.system


@pytest.fixture(scope="session")
def aircraft_side(aircraft):
    return aircraft.side


@pytest.fixture(scope="session")
def aircraft_attack(aircraft):
    # The bundled attack: scale 10, decay base 0.9779, horizon 30.
    return aircraft.attack


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
