"""Dense complex linear algebra primitives: tensor products, Hermitian
eigendecomposition, spectral projectors, PSD square roots, and tensor-factor
permutation operators.

The global basis convention used everywhere in this package: the index of a
basis vector of a tensor-product space is the mixed-radix number over the
factors in declared order, most significant first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

HERMITIAN_RTOL = 1e-12
PSD_EIG_FLOOR = -1e-10
CLASSIFY_TOL = 1e-9


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return a.conj().T


def hermiticity_defect(h: np.ndarray) -> float:
    """Max entrywise |H - H^dag| relative to the largest entry magnitude."""
    scale = np.abs(h).max()
    if scale == 0.0:
        return 0.0
    return float(np.abs(h - dagger(h)).max() / scale)


def is_hermitian(h: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    return hermiticity_defect(h) <= rtol


def assert_hermitian(h: np.ndarray, rtol: float = HERMITIAN_RTOL) -> None:
    defect = hermiticity_defect(h)
    if defect > rtol:
        raise ValueError(f"matrix is not hermitian (relative defect {defect:.3e})")


def kron(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of one or more operators, leftmost most significant."""
    out = np.asarray(ops[0])
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


@dataclass(frozen=True)
class Spectrum:
    """Eigendecomposition of a Hermitian operator.

    eigenvalues are real and sorted descending; eigenvectors[:, k] is the
    orthonormal eigenvector paired with eigenvalues[k].
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def hermitian_eig(h: np.ndarray) -> Spectrum:
    """Full eigendecomposition of a Hermitian matrix, eigenvalues descending."""
    assert_hermitian(h)
    w, v = np.linalg.eigh(h)
    return Spectrum(eigenvalues=w[::-1].copy(), eigenvectors=v[:, ::-1].copy())


def positive_part_projector(h: np.ndarray, tol: float = CLASSIFY_TOL) -> np.ndarray:
    """Orthogonal projector onto the span of eigenvectors with eigenvalue > tol.

    Raises if any eigenvalue falls in the ambiguous band [tol/10, tol]: the
    caller must then pick a tolerance that cleanly separates the spectrum.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    spec = hermitian_eig(h)
    w = spec.eigenvalues
    in_band = (w >= tol / 10) & (w <= tol)
    if in_band.any():
        raise ValueError(
            f"eigenvalues {w[in_band]} fall in the classification band "
            f"[{tol / 10:.1e}, {tol:.1e}]; adjust tol"
        )
    cols = spec.eigenvectors[:, w > tol]
    p = cols @ dagger(cols)
    return (p + dagger(p)) / 2


def psd_sqrt(e: np.ndarray) -> np.ndarray:
    """Principal square root of a PSD Hermitian matrix.

    Eigenvalues in [-1e-10, 0) are clamped to zero; anything below raises.
    """
    spec = hermitian_eig(e)
    w = spec.eigenvalues
    if w.min(initial=0.0) < PSD_EIG_FLOOR:
        raise ValueError(f"matrix is not PSD (min eigenvalue {w.min():.3e})")
    v = spec.eigenvectors
    k = (v * np.sqrt(np.clip(w, 0.0, None))) @ dagger(v)
    return (k + dagger(k)) / 2


def permutation_operator(dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Unitary 0/1 matrix reordering tensor factors.

    Maps |i_0,...,i_{k-1}> to |j_0,...,j_{k-1}> with j_p = i_{perm[p]}:
    output factor p carries what input factor perm[p] held.  The output
    factor dims are the permuted ones; the total dimension is unchanged.
    """
    dims = tuple(int(d) for d in dims)
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(len(dims))):
        raise ValueError(f"perm {perm} is not a bijection on {len(dims)} factors")
    n = math.prod(dims)
    source = np.transpose(np.arange(n).reshape(dims), perm).reshape(n)
    op = np.zeros((n, n))
    op[np.arange(n), source] = 1.0
    return op


PARTY_WHOLE = "whole"
PARTY_ALICE = "alice"
PARTY_BOB = "bob"


@dataclass(frozen=True)
class Factor:
    system: int
    party: str
    dim: int


@dataclass(frozen=True)
class SpaceLayout:
    """Tensor-factor structure of the three-system space.

    Each of systems 0, 1, 2 appears either whole or split into an Alice and a
    Bob factor.  The basis index is mixed-radix over the factors in list
    order, most significant first.
    """

    factors: tuple[Factor, ...]

    def __post_init__(self) -> None:
        by_system: dict[int, list[str]] = {}
        for f in self.factors:
            if f.dim < 1:
                raise ValueError(f"factor dim must be >= 1, got {f.dim}")
            by_system.setdefault(f.system, []).append(f.party)
        if sorted(by_system) != [0, 1, 2]:
            raise ValueError("layout must contain exactly systems 0, 1, 2")
        for system, parties in by_system.items():
            if parties not in ([PARTY_WHOLE], [PARTY_ALICE, PARTY_BOB]):
                raise ValueError(
                    f"system {system} must appear whole or as alice+bob, got {parties}"
                )

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(f.dim for f in self.factors)

    @property
    def dim(self) -> int:
        return math.prod(self.dims)

    @classmethod
    def single(cls, d: int) -> "SpaceLayout":
        """Three whole systems of local dimension d."""
        return cls(tuple(Factor(s, PARTY_WHOLE, d) for s in range(3)))

    @classmethod
    def split(cls, d_a: int, d_b: int) -> "SpaceLayout":
        """Three systems, each split into Alice/Bob factors, system-major order."""
        factors = []
        for s in range(3):
            factors.append(Factor(s, PARTY_ALICE, d_a))
            factors.append(Factor(s, PARTY_BOB, d_b))
        return cls(tuple(factors))


# system-major (0a,0b,1a,1b,2a,2b) -> party-major (0a,1a,2a,0b,1b,2b)
PARTY_MAJOR_PERM = (0, 2, 4, 1, 3, 5)


def factor_permutation(layout: SpaceLayout, perm: Sequence[int]) -> np.ndarray:
    """Permutation operator reordering the layout's factors (see permutation_operator)."""
    return permutation_operator(layout.dims, perm)


def regroup_operator(d_a: int, d_b: int) -> np.ndarray:
    """Unitary mapping the system-major split basis to the party-major one."""
    return factor_permutation(SpaceLayout.split(d_a, d_b), PARTY_MAJOR_PERM)
