import numpy as np
import pytest

from chancert import DEFAULT_TOLERANCES


@pytest.fixture
def cfg():
    return DEFAULT_TOLERANCES


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    g = complex_gaussian(rng, (n, n))
    return (g + g.conj().T) / 2.0


def random_psd(rng: np.random.Generator, n: int, rank: int | None = None) -> np.ndarray:
    k = n if rank is None else rank
    g = complex_gaussian(rng, (n, k))
    return g @ g.conj().T
