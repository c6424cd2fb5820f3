import numpy as np
import pytest

from double_lambda import (Detunings, LevelScheme, MediumSpec,
                           PhysicalConstants, resonant_scheme)

# model atom used throughout: energies in a.u., both upper widths 2.4e-9,
# lower coherence undamped
ENERGIES = {"a": -0.10, "b": -0.20, "c": -0.18, "d": -0.05}
GAMMA_UPPER = 2.4e-9
DENSITY = 3e-13


@pytest.fixture(scope="session")
def constants() -> PhysicalConstants:
    return PhysicalConstants.atomic_units()


@pytest.fixture(scope="session")
def scheme(constants) -> LevelScheme:
    return resonant_scheme(
        E_a=ENERGIES["a"], E_b=ENERGIES["b"], E_c=ENERGIES["c"],
        E_d=ENERGIES["d"], Gamma_a=GAMMA_UPPER, Gamma_d=GAMMA_UPPER,
        gamma_bc=0.0, constants=constants)


@pytest.fixture(scope="session")
def detunings(scheme, constants) -> Detunings:
    return Detunings.from_scheme(scheme, constants)


@pytest.fixture(scope="session")
def medium(scheme, constants) -> MediumSpec:
    return MediumSpec.from_scheme(scheme, DENSITY, 1e7, constants)


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
