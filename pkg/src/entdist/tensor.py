"""Dense complex linear algebra on tensor-product spaces.

Matrices are plain C-ordered ``numpy`` arrays of ``complex128``; kets are
1-d arrays. Everything here is a pure function of its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

HERMITICITY_RTOL = 1e-12
PSD_MEMBERSHIP_RTOL = 1e-9


@dataclass(frozen=True)
class SubsystemLayout:
    """Ordered factor dimensions of a tensor-product space.

    ``cut`` splits the factors into party A (prefix) and party B (suffix),
    so the A:B bipartition of a four-factor space [d,d,d,d] with cut=2 has
    A = factors 0,1 and B = factors 2,3.
    """

    factor_dims: tuple[int, ...]
    cut: int = 1

    def __post_init__(self):
        dims = tuple(int(d) for d in self.factor_dims)
        object.__setattr__(self, "factor_dims", dims)
        if any(d < 1 for d in dims):
            raise ValueError(f"factor dimensions must be positive, got {dims}")
        if not 1 <= self.cut < len(dims):
            raise ValueError(
                f"cut must satisfy 1 <= cut < {len(dims)}, got {self.cut}"
            )

    @property
    def dim(self) -> int:
        return math.prod(self.factor_dims)

    @property
    def dim_a(self) -> int:
        return math.prod(self.factor_dims[: self.cut])

    @property
    def dim_b(self) -> int:
        return math.prod(self.factor_dims[self.cut :])

    @property
    def party_a(self) -> tuple[int, ...]:
        """Indices of the factors held by party A."""
        return tuple(range(self.cut))

    def check_matrix(self, M: np.ndarray) -> None:
        if M.shape != (self.dim, self.dim):
            raise ValueError(
                f"matrix shape {M.shape} does not match layout dimension {self.dim}"
            )

    def check_ket(self, v: np.ndarray) -> None:
        if v.shape != (self.dim,):
            raise ValueError(
                f"ket shape {v.shape} does not match layout dimension {self.dim}"
            )


def frobenius(M: np.ndarray) -> float:
    return float(np.linalg.norm(M))


def hermiticity_defect(M: np.ndarray) -> float:
    """max |M - M^dagger|, the absolute deviation from Hermitian symmetry."""
    return float(np.max(np.abs(M - M.conj().T))) if M.size else 0.0


def is_hermitian(M: np.ndarray, rtol: float = HERMITICITY_RTOL) -> bool:
    return hermiticity_defect(M) <= rtol * (1.0 + frobenius(M))


def require_hermitian(M: np.ndarray, rtol: float = HERMITICITY_RTOL) -> None:
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    defect = hermiticity_defect(M)
    bound = rtol * (1.0 + frobenius(M))
    if defect > bound:
        raise ValueError(
            f"matrix is not Hermitian: defect {defect:.3e} exceeds {bound:.3e}"
        )


def kron(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Kronecker product, (A⊗B)[i*rB+k, j*cB+l] = A[i,j] B[k,l]."""
    return np.kron(A, B)


def partial_transpose(
    M: np.ndarray, layout: SubsystemLayout, factors: Iterable[int]
) -> np.ndarray:
    """Transpose the listed factors of M, leaving the others untouched."""
    layout.check_matrix(M)
    dims = layout.factor_dims
    n = len(dims)
    factors = set(int(f) for f in factors)
    if any(not 0 <= f < n for f in factors):
        raise ValueError(f"factor indices must lie in [0, {n}), got {sorted(factors)}")
    if not factors:
        return M.copy()
    axes = list(range(2 * n))
    for f in factors:
        axes[f], axes[n + f] = axes[n + f], axes[f]
    return M.reshape(dims * 2).transpose(axes).reshape(M.shape)


def transpose_party_a(M: np.ndarray, layout: SubsystemLayout) -> np.ndarray:
    """Partial transpose over every factor on party A's side of the cut."""
    return partial_transpose(M, layout, layout.party_a)


def permute_factors(
    M: np.ndarray, layout: SubsystemLayout, perm: Iterable[int]
) -> np.ndarray:
    """Conjugate M by the permutation unitary reordering the tensor factors.

    ``perm[t]`` is the source factor placed at position t, so the result
    lives on the layout with dims ``[factor_dims[p] for p in perm]``.
    """
    layout.check_matrix(M)
    dims = layout.factor_dims
    n = len(dims)
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{perm} is not a permutation of {n} factors")
    axes = list(perm) + [n + p for p in perm]
    return M.reshape(dims * 2).transpose(axes).reshape(M.shape)


def permute_ket(v: np.ndarray, dims: Iterable[int], perm: Iterable[int]) -> np.ndarray:
    """Apply the factor-permutation unitary to a ket."""
    dims = tuple(int(d) for d in dims)
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(len(dims))):
        raise ValueError(f"{perm} is not a permutation of {len(dims)} factors")
    if v.shape != (math.prod(dims),):
        raise ValueError(f"ket shape {v.shape} does not match dims {dims}")
    return v.reshape(dims).transpose(perm).reshape(-1)


def herm_eig(M: np.ndarray, rtol: float = HERMITICITY_RTOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues ascending, eigenvector columns) with M = V diag(w) V†.
    Raises ValueError when the input fails the Hermiticity tolerance.
    """
    require_hermitian(M, rtol)
    w, V = np.linalg.eigh(M)
    return w, V


def min_eigenvalue(M: np.ndarray, rtol: float = HERMITICITY_RTOL) -> float:
    """Smallest eigenvalue; M is PSD iff this is >= -tol."""
    require_hermitian(M, rtol)
    return float(np.linalg.eigvalsh(M)[0])


def is_psd(M: np.ndarray, rtol: float = PSD_MEMBERSHIP_RTOL) -> bool:
    return min_eigenvalue(M) >= -rtol * (1.0 + frobenius(M))


def psd_project(M: np.ndarray, rtol: float = HERMITICITY_RTOL) -> np.ndarray:
    """Frobenius-nearest PSD matrix: clip negative eigenvalues at zero."""
    w, V = herm_eig(M, rtol)
    wc = np.maximum(w, 0.0)
    return (V * wc) @ V.conj().T
