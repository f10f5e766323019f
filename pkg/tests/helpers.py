import numpy as np

from fidelium.core.haar import SampleStream, sample_pure_state, sample_unitary
from fidelium.core.tensor_core import outer

SX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SY = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SZ = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def random_pure(d: int, index: int, seed: int = 11):
    return sample_pure_state(SampleStream(seed, index, d))


def random_rho(d: int, index: int, seed: int = 11):
    return outer(random_pure(d, index, seed))


def random_unitary(d: int, index: int, seed: int = 23):
    return sample_unitary(SampleStream(seed, index, d))
