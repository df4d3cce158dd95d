"""Complex banded LU factorization through LAPACK ``gbtrf``/``gbtrs``."""

from __future__ import annotations

import numpy as np
from scipy import sparse
from scipy.linalg import get_lapack_funcs

from thresholdlab.core.errors import InvalidArgumentError, NumericalFailureError
from thresholdlab.core.logger import get_logger

LOGGER = get_logger(__name__)

# Smallest |U_ii| relative to the largest before the factorization counts as singular.
PIVOT_FLOOR = 1e-14


def to_lapack_band(matrix: sparse.spmatrix | np.ndarray, kl: int, ku: int) -> np.ndarray:
    """Band storage with ``kl`` extra rows for pivoting fill: ``ab[kl + ku + i - j, j] = A[i, j]``."""

    coo = sparse.coo_matrix(matrix)
    n = coo.shape[0]
    if coo.shape[1] != n:
        raise InvalidArgumentError(f"Expected a square matrix, got {coo.shape}")
    offsets = coo.row - coo.col
    if offsets.size and (offsets.max() > kl or -offsets.min() > ku):
        raise InvalidArgumentError(f"Matrix has entries outside the band kl={kl}, ku={ku}")
    ab = np.zeros((2 * kl + ku + 1, n), dtype=complex)
    np.add.at(ab, (kl + ku + offsets, coo.col), coo.data)
    return ab


class BandedLU:
    """Partial-pivoting LU of a banded complex matrix; fill stays within ``2 kl + ku``."""

    def __init__(self, matrix: sparse.spmatrix | np.ndarray, kl: int, ku: int) -> None:
        self.kl = kl
        self.ku = ku
        self.n = int(matrix.shape[0])
        ab = to_lapack_band(matrix, kl, ku)
        gbtrf, self._gbtrs = get_lapack_funcs(("gbtrf", "gbtrs"), (ab,))
        self._lu, self._piv, info = gbtrf(ab, kl, ku, overwrite_ab=True)
        if info < 0:
            raise InvalidArgumentError(f"gbtrf rejected argument {-info}")
        diagonal = np.abs(self._lu[kl + ku])
        if info > 0 or diagonal.min() <= PIVOT_FLOOR * diagonal.max():
            raise NumericalFailureError(
                f"Banded LU is singular to working precision (info={info}, min pivot {diagonal.min():.3e})"
            )
        LOGGER.debug("Banded LU factorized", extra={"n": self.n, "kl": kl, "ku": ku})

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        rhs = np.asarray(rhs, dtype=complex)
        columns = rhs.reshape(self.n, -1)
        x, info = self._gbtrs(self._lu, self.kl, self.ku, columns, self._piv)
        if info != 0:
            raise NumericalFailureError(f"gbtrs failed with info={info}")
        return np.asarray(x).reshape(rhs.shape)


__all__ = ["BandedLU", "PIVOT_FLOOR", "to_lapack_band"]
