"""Finite trees of local measurements with classical communication.

A protocol node holds one party's local POVM (operators on that party's own
triple space) and a child per outcome; leaves carry the final label
(1 or 2 for the two identification answers, 0 for inconclusive).  Flattening a
tree composes the Kraus operators along every path, which yields the effective
global POVM the protocol implements — the object the closed-form separable
constructions are checked against.

Kraus convention: each outcome applies the PSD square root of its element
(for projective elements that is the projector itself, kept exact).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Mapping, Union

import numpy as np

from .linalg import dagger, kron, psd_sqrt
from .povm import COMPLETENESS_ATOL, Povm, povm_from_dict
from .symmetry import bipartite_toolkit

ALICE = "alice"
BOB = "bob"

_PROJECTOR_ATOL = 1e-10


def _kraus_of(element: np.ndarray) -> np.ndarray:
    # projective elements keep their exact matrix as the update operator
    if np.abs(element @ element - element).max() <= _PROJECTOR_ATOL:
        return element
    return psd_sqrt(element)


@dataclass(frozen=True)
class Leaf:
    label: int

    def __post_init__(self) -> None:
        if self.label not in (0, 1, 2):
            raise ValueError(f"final label must be 0, 1 or 2, got {self.label}")


@dataclass(frozen=True)
class MeasurementStep:
    """One party's local measurement, with a child node per outcome."""

    party: str
    measurement: Povm
    children: Mapping[Hashable, Union["MeasurementStep", Leaf]]

    def __post_init__(self) -> None:
        if self.party not in (ALICE, BOB):
            raise ValueError(f"party must be {ALICE!r} or {BOB!r}, got {self.party!r}")
        if set(self.children) != set(self.measurement.labels):
            raise ValueError("children keys must match measurement outcome labels")

    def kraus(self, outcome: Hashable) -> np.ndarray:
        return _kraus_of(self.measurement.element(outcome))


def step(party: str, elements: dict, children: dict,
         support: np.ndarray | None = None) -> MeasurementStep:
    """Build a validated MeasurementStep from outcome->operator dicts."""
    measurement = povm_from_dict(elements, support)
    measurement.validate()
    return MeasurementStep(party=party, measurement=measurement, children=children)


@dataclass
class LoccProtocol:
    """A measurement tree over the party-major split space.

    Local operators live on each party's own triple space (dim d_p^3); the
    executor and flattener lift them to the joint space as kron(op, 1) or
    kron(1, op).  States enter in party-major order (regroup with the
    bipartite toolkit first).
    """

    d_a: int
    d_b: int
    root: Union[MeasurementStep, Leaf]
    _lift_cache: dict = field(default_factory=dict, repr=False)

    def __getstate__(self):
        # the cache is keyed by object ids, which do not survive pickling
        state = self.__dict__.copy()
        state["_lift_cache"] = {}
        return state

    @property
    def dim(self) -> int:
        return (self.d_a * self.d_b) ** 3

    def lifted_kraus(self, node: MeasurementStep) -> dict:
        """Outcome -> Kraus operator on the joint party-major space, cached."""
        cached = self._lift_cache.get(id(node))
        if cached is not None:
            return cached
        na, nb = self.d_a**3, self.d_b**3
        lifted = {}
        for outcome, _ in node.measurement.elements:
            k = node.kraus(outcome)
            if node.party == ALICE:
                lifted[outcome] = kron(k, np.eye(nb))
            else:
                lifted[outcome] = kron(np.eye(na), k)
        self._lift_cache[id(node)] = lifted
        return lifted


def iter_leaves(node: Union[MeasurementStep, Leaf], prefix: tuple = ()):
    """Yield (transcript, leaf) pairs; transcript entries are (party, outcome)."""
    if isinstance(node, Leaf):
        yield prefix, node
        return
    for outcome, _ in node.measurement.elements:
        child = node.children[outcome]
        yield from iter_leaves(child, prefix + ((node.party, outcome),))


def effective_povm(protocol: LoccProtocol, system_major: bool = True) -> Povm:
    """Flatten the tree into the global POVM it implements.

    Element for label L = sum over leaves labeled L of K_path^dag K_path with
    K_path the chronological product of lifted Kraus operators.  Returned in
    the system-major basis by default (directly comparable with the closed-form
    separable constructions); completeness is asserted.
    """
    dim = protocol.dim
    buckets: dict[int, np.ndarray] = {}

    def walk(node, accum: np.ndarray) -> None:
        if isinstance(node, Leaf):
            op = dagger(accum) @ accum
            buckets[node.label] = buckets.get(node.label, 0) + op
            return
        lifted = protocol.lifted_kraus(node)
        for outcome, _ in node.measurement.elements:
            walk(node.children[outcome], lifted[outcome] @ accum)

    walk(protocol.root, np.eye(dim))
    total = sum(buckets.values())
    defect = np.abs(total - np.eye(dim)).max()
    if defect > COMPLETENESS_ATOL:
        raise ValueError(f"flattened protocol is not complete (max defect {defect:.3e})")
    if system_major:
        bt = bipartite_toolkit(protocol.d_a, protocol.d_b)
        buckets = {label: bt.to_system_major(op) for label, op in buckets.items()}
    return povm_from_dict(sorted(buckets.items()))
