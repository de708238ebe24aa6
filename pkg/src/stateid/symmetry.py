"""Permutation-symmetry operator algebra on the triple tensor space (C^d)^x3.

The space splits into the totally symmetric subspace (dimension d(d+1)(d+2)/6),
the totally antisymmetric one (d(d-1)(d-2)/6) and the mixed-symmetry remainder
(2d(d^2-1)/3, carrying the two-dimensional irrep of the order-3 symmetric group
with multiplicity half its dimension).  The toolkit materializes the pairwise
swaps and (anti)symmetrizers, the three subspace projectors, and the two
combinations swap_diff = (T01 - T02)/2 and swap_sum = (T01 + T02)/2 whose
algebra drives every measurement construction downstream:

    swap_diff^2 = (3/4) * mixed3
    swap_diff * swap_sum + swap_sum * swap_diff = 0
    swap_sum^2 = 1 - swap_diff^2
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from .linalg import kron, permutation_operator, regroup_operator

# the six permutations of three positions, with their signs
_S3_GROUP = (
    ((0, 1, 2), +1),
    ((1, 0, 2), -1),  # swap systems 0,1
    ((2, 1, 0), -1),  # swap systems 0,2
    ((0, 2, 1), -1),  # swap systems 1,2
    ((1, 2, 0), +1),
    ((2, 0, 1), +1),
)


@dataclass(frozen=True)
class DimensionTable:
    """Subspace dimensions of (C^d)^x3 and the n-copy symmetric dimensions.

    sym2/sym3 are the dimensions of the totally symmetric subspaces of 2 and 3
    copies (binomials C(d+1,2) and C(d+2,3)); antisym3 = C(d,3); mixed3 is the
    remainder 2d(d^2-1)/3.  All exact integers.
    """

    d: int
    sym2: int
    sym3: int
    antisym3: int
    mixed3: int

    @property
    def total(self) -> int:
        return self.d**3


def dimension_table(d: int) -> DimensionTable:
    if d < 1:
        raise ValueError(f"local dimension must be >= 1, got {d}")
    sym3 = comb(d + 2, 3)
    antisym3 = comb(d, 3)
    return DimensionTable(
        d=d,
        sym2=comb(d + 1, 2),
        sym3=sym3,
        antisym3=antisym3,
        mixed3=d**3 - sym3 - antisym3,
    )


@dataclass(frozen=True)
class DimRelationReport:
    """Both sides of the mixed-subspace dimension identity for a split d = d_a*d_b."""

    d_a: int
    d_b: int
    lhs: int
    rhs: int

    @property
    def residual(self) -> int:
        return self.lhs - self.rhs


def check_dim_relation(d_a: int, d_b: int) -> DimRelationReport:
    """Mixed-subspace dimension at d_a*d_b vs the five-term sum over local tables.

    The identity: mixed3(d_a*d_b) = sym3_a*mixed3_b + mixed3_a*sym3_b
    + antisym3_a*mixed3_b + mixed3_a*antisym3_b + mixed3_a*mixed3_b/2,
    evaluated in exact integer arithmetic (mixed3 is always even).
    """
    ta, tb = dimension_table(d_a), dimension_table(d_b)
    rhs = (
        ta.sym3 * tb.mixed3
        + ta.mixed3 * tb.sym3
        + ta.antisym3 * tb.mixed3
        + ta.mixed3 * tb.antisym3
        + ta.mixed3 * tb.mixed3 // 2
    )
    return DimRelationReport(d_a=d_a, d_b=d_b, lhs=dimension_table(d_a * d_b).mixed3, rhs=rhs)


@dataclass(frozen=True)
class SymmetryToolkit:
    """All permutation-algebra operators on (C^d)^x3, as real dense matrices.

    Arrays are read-only; toolkits are cached per d and shared.
    """

    d: int
    dims: DimensionTable
    swap01: np.ndarray
    swap02: np.ndarray
    swap12: np.ndarray
    sym01: np.ndarray
    sym02: np.ndarray
    antisym01: np.ndarray
    antisym02: np.ndarray
    sym3: np.ndarray
    antisym3: np.ndarray
    mixed3: np.ndarray
    swap_diff: np.ndarray
    swap_sum: np.ndarray

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.d**3)


def _freeze(*arrays: np.ndarray) -> None:
    for a in arrays:
        a.flags.writeable = False


@lru_cache(maxsize=None)
def _toolkit(d: int) -> SymmetryToolkit:
    dims = (d, d, d)
    n = d**3
    swaps = {perm: permutation_operator(dims, perm) for perm, _ in _S3_GROUP}
    sym3 = sum(swaps[perm] for perm, _ in _S3_GROUP) / 6
    antisym3 = sum(sign * swaps[perm] for perm, sign in _S3_GROUP) / 6
    mixed3 = np.eye(n) - sym3 - antisym3
    t01, t02, t12 = swaps[(1, 0, 2)], swaps[(2, 1, 0)], swaps[(0, 2, 1)]
    eye = np.eye(n)
    tk = SymmetryToolkit(
        d=d,
        dims=dimension_table(d),
        swap01=t01,
        swap02=t02,
        swap12=t12,
        sym01=(eye + t01) / 2,
        sym02=(eye + t02) / 2,
        antisym01=(eye - t01) / 2,
        antisym02=(eye - t02) / 2,
        sym3=sym3,
        antisym3=antisym3,
        mixed3=mixed3,
        swap_diff=(t01 - t02) / 2,
        swap_sum=(t01 + t02) / 2,
    )
    _freeze(tk.swap01, tk.swap02, tk.swap12, tk.sym01, tk.sym02, tk.antisym01,
            tk.antisym02, tk.sym3, tk.antisym3, tk.mixed3, tk.swap_diff, tk.swap_sum)
    return tk


def build_toolkit(d: int) -> SymmetryToolkit:
    """Cached symmetry toolkit on (C^d)^x3; rejects d < 2."""
    if d < 2:
        raise ValueError(f"local dimension must be >= 2, got {d}")
    return _toolkit(d)


@dataclass(frozen=True)
class BipartiteToolkit:
    """Local toolkits for a d = d_a*d_b split plus the regrouping unitary.

    regroup maps the system-major basis |0a 0b 1a 1b 2a 2b> to the party-major
    one |0a 1a 2a>|0b 1b 2b>; conjugating any joint permutation operator with
    it factorizes the operator into kron(alice_op, bob_op).
    """

    d_a: int
    d_b: int
    alice: SymmetryToolkit
    bob: SymmetryToolkit
    regroup: np.ndarray

    @property
    def d(self) -> int:
        return self.d_a * self.d_b

    def to_party_major(self, op: np.ndarray) -> np.ndarray:
        """Conjugate a system-major operator into the party-major basis."""
        return self.regroup @ op @ self.regroup.T

    def to_system_major(self, op: np.ndarray) -> np.ndarray:
        """Conjugate a party-major operator into the system-major basis."""
        return self.regroup.T @ op @ self.regroup

    def local_to_global(self, alice_op: np.ndarray, bob_op: np.ndarray) -> np.ndarray:
        """kron(alice_op, bob_op) expressed on the system-major joint space."""
        return self.to_system_major(kron(alice_op, bob_op))


@lru_cache(maxsize=None)
def bipartite_toolkit(d_a: int, d_b: int) -> BipartiteToolkit:
    """Toolkits on both local triple spaces plus the regrouping operator.

    A trivial party with local dimension 1 is allowed as long as the other
    side is at least 2.
    """
    if d_a < 1 or d_b < 1 or d_a * d_b < 2:
        raise ValueError(f"invalid split ({d_a}, {d_b}); need d_a*d_b >= 2")
    r = regroup_operator(d_a, d_b)
    r.flags.writeable = False
    return BipartiteToolkit(d_a=d_a, d_b=d_b, alice=_toolkit(d_a), bob=_toolkit(d_b), regroup=r)
