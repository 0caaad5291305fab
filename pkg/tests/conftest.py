"""Shared fixtures: the headline-parameter system and its static basis."""

import numpy as np
import pytest

from mzm_braiding.evolution import IntegratorConfig, static_basis
from mzm_braiding.lattice import ChainParams, SystemSpec


@pytest.fixture(scope="session")
def paper_chain() -> ChainParams:
    return ChainParams(n_sites=100, mu=0.02, hopping=0.1, pairing=0.1)


@pytest.fixture(scope="session")
def paper_spec(paper_chain) -> SystemSpec:
    return SystemSpec(chain1=paper_chain, chain2=paper_chain, defect_energy=3.0)


@pytest.fixture(scope="session")
def paper_basis(paper_spec):
    return static_basis(paper_spec)


@pytest.fixture(scope="session")
def small_spec() -> SystemSpec:
    """A 30-site-per-chain system: same gap/physics, faster to evolve."""
    chain = ChainParams(n_sites=30, mu=0.02, hopping=0.1, pairing=0.1)
    return SystemSpec(chain1=chain, chain2=chain, defect_energy=3.0)


@pytest.fixture(scope="session")
def integrator() -> IntegratorConfig:
    return IntegratorConfig()


def phase_aligned_error(g: np.ndarray, target: np.ndarray) -> float:
    """max-abs entrywise error after optimally phase-aligning g to target.

    Unlike gate_distance (whose sqrt halves the number of significant
    digits near zero), this retains full precision for tight tolerances.
    """
    tr = np.trace(np.asarray(target).conj().T @ np.asarray(g))
    alpha = 1.0 if tr == 0 else np.exp(-1j * np.angle(tr))
    return float(np.max(np.abs(alpha * g - target)))
