"""Labeled positive-operator-valued measures with completeness validation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable

import numpy as np

from .linalg import PSD_EIG_FLOOR, assert_hermitian

COMPLETENESS_ATOL = 1e-10


@dataclass(frozen=True)
class Povm:
    """A labeled set of PSD operators summing to a declared support projector.

    The support defaults to the identity; sub-measurements inside protocol
    trees declare the projector their elements resolve.
    """

    elements: tuple[tuple[Hashable, np.ndarray], ...]
    support: np.ndarray = field(repr=False, default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if not self.elements:
            raise ValueError("POVM needs at least one element")
        labels = [label for label, _ in self.elements]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate outcome labels: {labels}")
        if self.support is None:
            dim = self.elements[0][1].shape[0]
            object.__setattr__(self, "support", np.eye(dim))

    @property
    def labels(self) -> tuple[Hashable, ...]:
        return tuple(label for label, _ in self.elements)

    @property
    def dim(self) -> int:
        return self.elements[0][1].shape[0]

    def element(self, label: Hashable) -> np.ndarray:
        for lab, op in self.elements:
            if lab == label:
                return op
        raise KeyError(f"no element labeled {label!r}")

    def validate(self, atol: float = COMPLETENESS_ATOL) -> None:
        """Check hermiticity and positivity of each element and completeness."""
        total = np.zeros_like(self.support, dtype=complex)
        for label, op in self.elements:
            if op.shape != self.support.shape:
                raise ValueError(f"element {label!r} has shape {op.shape}")
            assert_hermitian(op)
            low = np.linalg.eigvalsh(op).min()
            if low < PSD_EIG_FLOOR:
                raise ValueError(f"element {label!r} is not PSD (min eigenvalue {low:.3e})")
            total = total + op
        defect = np.abs(total - self.support).max()
        if defect > atol:
            raise ValueError(f"elements do not sum to the support (max defect {defect:.3e})")


def povm_from_dict(elements: dict | Iterable[tuple[Hashable, np.ndarray]],
                   support: np.ndarray | None = None) -> Povm:
    items = elements.items() if isinstance(elements, dict) else elements
    return Povm(tuple((label, op) for label, op in items), support)
