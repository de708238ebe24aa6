"""Unambiguous identification at equal priors: wrong answers are forbidden,
an inconclusive outcome (label 0) is allowed instead.

The no-error requirement forces the conclusive elements off the pairwise
symmetric subspaces: E1 must annihilate sym02 and E2 must annihilate sym01.
Together with exchange symmetry between the two reference systems and
invariance under collective unitaries, the optimal global POVM is

    E1 = (2/3) mixed3 * antisym02,   E2 = (2/3) mixed3 * antisym01,

with success probability (d-1)/(3d).  For a bipartite split the same
symmetries restrict any separable POVM to a six-term family whose
coefficients obey a feasibility bound; the best separable scheme reaches

    p = (11 da^2 db^2 + da^2 + db^2 - 13) / (36 da db (da db + 1)),

strictly below the global optimum, and is implementable by the LOCC tree
built here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import kron
from .povm import Povm, povm_from_dict
from .protocol import ALICE, BOB, Leaf, LoccProtocol, step
from .symmetry import bipartite_toolkit, build_toolkit, dimension_table

GLOBAL = "global"
SEPARABLE = "separable"

NO_ERROR_ATOL = 1e-10
COEFF_ATOL = 1e-12
ALPHA_MAX = 2.0 / 3.0


@dataclass(frozen=True)
class UnambPovm:
    """Three-outcome POVM {conclusive 1, conclusive 2, inconclusive 0}."""

    e1: np.ndarray
    e2: np.ndarray
    e0: np.ndarray
    kind: str

    @property
    def dim(self) -> int:
        return self.e1.shape[0]

    def as_povm(self) -> Povm:
        return povm_from_dict({1: self.e1, 2: self.e2, 0: self.e0})

    def validate(self) -> None:
        """PSD elements summing to identity, exact no-error, exchange symmetry."""
        self.as_povm().validate()
        d = round(self.dim ** (1 / 3))
        tk = build_toolkit(d)
        for name, op, sym in (("e1", self.e1, tk.sym02), ("e2", self.e2, tk.sym01)):
            leak = np.abs(op @ sym).max()
            if leak > NO_ERROR_ATOL:
                raise ValueError(f"{name} violates the no-error condition (leak {leak:.3e})")
        t12 = tk.swap12
        for name, lhs, rhs in (("e2", self.e2, t12 @ self.e1 @ t12),
                               ("e0", self.e0, t12 @ self.e0 @ t12)):
            defect = np.abs(lhs - rhs).max()
            if defect > NO_ERROR_ATOL:
                raise ValueError(f"{name} breaks 1<->2 exchange symmetry (defect {defect:.3e})")


def success_probability(povm: UnambPovm, d: int) -> float:
    """Mean unambiguous success probability at equal priors.

    (tr[E1*sym01] + tr[E2*sym02]) / (2*d1*d2); refuses POVMs whose no-error
    leak exceeds 1e-8, since the value is meaningless for them.
    """
    tk = build_toolkit(d)
    leak = max(np.abs(povm.e1 @ tk.sym02).max(), np.abs(povm.e2 @ tk.sym01).max())
    if leak > 1e-8:
        raise ValueError(f"POVM violates the no-error condition (leak {leak:.3e})")
    table = dimension_table(d)
    overlap = np.trace(povm.e1 @ tk.sym01) + np.trace(povm.e2 @ tk.sym02)
    return float(overlap.real) / (2 * d * table.sym2)


def max_success_global(d: int) -> float:
    """Closed-form optimum of the global unambiguous scheme."""
    if d < 2:
        raise ValueError(f"local dimension must be >= 2, got {d}")
    return (d - 1) / (3 * d)


def global_unamb_povm(d: int) -> UnambPovm:
    """The optimal global three-outcome POVM."""
    tk = build_toolkit(d)
    n = d**3
    e1 = ALPHA_MAX * tk.mixed3 @ tk.antisym02
    e2 = ALPHA_MAX * tk.mixed3 @ tk.antisym01
    e0 = tk.mixed3 @ (np.eye(n) + 2.0 * tk.swap_sum) / 3.0 + tk.sym3 + tk.antisym3
    return UnambPovm(e1=e1, e2=e2, e0=e0, kind=GLOBAL)


def gamma_plus(beta1: float, beta2: float) -> float:
    """Largest eigenvalue of the mixed-mixed block of E1+E2 in the separable family."""
    beta = (beta1 + beta2) / 2
    delta = (beta1 - beta2) / 2
    return 1.25 * beta + math.sqrt(0.5625 * beta**2 + delta**2)


def beta_feasibility(beta1: float, beta2: float) -> tuple[float, bool]:
    """gamma_plus and whether the pair keeps the inconclusive element PSD."""
    if beta1 < 0 or beta2 < 0:
        raise ValueError("beta coefficients must be nonnegative")
    g = gamma_plus(beta1, beta2)
    return g, g <= 1.0 + COEFF_ATOL


def mixed_block_operator(d_a: int, d_b: int, beta1: float, beta2: float) -> np.ndarray:
    """Explicit mixed-mixed block of E1+E2 on the party-major joint space.

    Oracle for gamma_plus: its largest eigenvalue is the closed form.
    """
    tka, tkb = bipartite_toolkit(d_a, d_b).alice, bipartite_toolkit(d_a, d_b).bob
    return beta1 * (
        kron(tka.mixed3 @ tka.sym02, tkb.mixed3 @ tkb.antisym02)
        + kron(tka.mixed3 @ tka.sym01, tkb.mixed3 @ tkb.antisym01)
    ) + beta2 * (
        kron(tka.mixed3 @ tka.antisym02, tkb.mixed3 @ tkb.sym02)
        + kron(tka.mixed3 @ tka.antisym01, tkb.mixed3 @ tkb.sym01)
    )


@dataclass(frozen=True)
class SeparableCoeffs:
    """Coefficients of the six-term separable conclusive element.

    alpha1..alpha4 weigh the blocks where one party is totally (anti)symmetric;
    beta1/beta2 weigh the mixed-mixed blocks.  Feasibility: each alpha at most
    2/3 and gamma_plus(beta1, beta2) at most 1.
    """

    alpha1: float
    alpha2: float
    alpha3: float
    alpha4: float
    beta1: float
    beta2: float

    def __post_init__(self) -> None:
        for name in ("alpha1", "alpha2", "alpha3", "alpha4", "beta1", "beta2"):
            value = getattr(self, name)
            if value < 0:
                raise ValueError(f"{name} must be nonnegative, got {value}")
        for name in ("alpha1", "alpha2", "alpha3", "alpha4"):
            value = getattr(self, name)
            if value > ALPHA_MAX + COEFF_ATOL:
                raise ValueError(
                    f"infeasible coefficients: {name}={value} exceeds 2/3 "
                    f"by {value - ALPHA_MAX:.3e}"
                )
        g = gamma_plus(self.beta1, self.beta2)
        if g > 1.0 + COEFF_ATOL:
            raise ValueError(
                f"infeasible coefficients: gamma_plus(beta1={self.beta1}, "
                f"beta2={self.beta2}) = {g:.6f} exceeds 1 by {g - 1.0:.3e}"
            )

    @property
    def beta(self) -> float:
        return (self.beta1 + self.beta2) / 2

    @property
    def delta(self) -> float:
        return (self.beta1 - self.beta2) / 2

    @classmethod
    def optimal(cls) -> "SeparableCoeffs":
        return cls(ALPHA_MAX, ALPHA_MAX, ALPHA_MAX, ALPHA_MAX, 0.5, 0.5)


def separable_unamb_povm(d_a: int, d_b: int, coeffs: SeparableCoeffs) -> UnambPovm:
    """Assemble the separable family member for the given coefficients.

    Elements come back in the system-major basis; the inconclusive element's
    positivity is verified by full eigendecomposition (the feasibility bound
    is the analytic statement of the same fact, so this catches assembly bugs).
    """
    bt = bipartite_toolkit(d_a, d_b)
    tka, tkb = bt.alice, bt.bob
    e1_party = (
        coeffs.alpha1 * kron(tka.sym3, tkb.mixed3 @ tkb.antisym02)
        + coeffs.alpha2 * kron(tka.antisym3, tkb.mixed3 @ tkb.sym02)
        + coeffs.alpha3 * kron(tka.mixed3 @ tka.sym02, tkb.antisym3)
        + coeffs.alpha4 * kron(tka.mixed3 @ tka.antisym02, tkb.sym3)
        + coeffs.beta1 * kron(tka.mixed3 @ tka.sym02, tkb.mixed3 @ tkb.antisym02)
        + coeffs.beta2 * kron(tka.mixed3 @ tka.antisym02, tkb.mixed3 @ tkb.sym02)
    )
    e1 = bt.to_system_major(e1_party)
    t12 = build_toolkit(d_a * d_b).swap12
    e2 = t12 @ e1 @ t12
    e0 = np.eye(e1.shape[0]) - e1 - e2
    povm = UnambPovm(e1=e1, e2=e2, e0=e0, kind=SEPARABLE)
    povm.validate()
    return povm


def max_success_separable(d_a: int, d_b: int) -> float:
    """Closed-form optimum over separable (hence over LOCC) schemes."""
    if d_a < 2 or d_b < 2:
        raise ValueError(f"both local dimensions must be >= 2, got ({d_a}, {d_b})")
    da2, db2 = d_a * d_a, d_b * d_b
    d = d_a * d_b
    return (11 * da2 * db2 + da2 + db2 - 13) / (36 * d * (d + 1))


def locc_protocol(d_a: int, d_b: int, mixed_mixed_first: str = ALICE) -> LoccProtocol:
    """LOCC tree implementing the optimal separable unambiguous scheme.

    Both parties resolve their local permutation symmetry.  Equal outcomes
    (sym, sym) or (antisym, antisym) are inconclusive.  When exactly one party
    is mixed, that party finishes with a local three-outcome POVM whose
    conclusive elements are scaled pair-(anti)symmetrizers.  When both are
    mixed, the party given by mixed_mixed_first applies a four-outcome POVM
    (a1, a2), the other measures one of two projective pairs selected by a1,
    and the answer is a1 when a2 agrees with it, else inconclusive.

    The combinations (sym, antisym) and (antisym, sym) never occur on valid
    inputs; the tree still carries them (as inconclusive leaves) so the
    flattened POVM is complete.
    """
    if mixed_mixed_first not in (ALICE, BOB):
        raise ValueError(f"mixed_mixed_first must be {ALICE!r} or {BOB!r}")
    bt = bipartite_toolkit(d_a, d_b)
    toolkits = {ALICE: bt.alice, BOB: bt.bob}

    def conclusive_step(party: str, other_symmetric: bool):
        """Local POVM for the mixed party when the other side is (anti)symmetric."""
        tk = toolkits[party]
        eye = np.eye(tk.d**3)
        if other_symmetric:
            elements = {
                1: ALPHA_MAX * tk.mixed3 @ tk.antisym02,
                2: ALPHA_MAX * tk.mixed3 @ tk.antisym01,
                0: tk.mixed3 @ (eye + 2.0 * tk.swap_sum) / 3.0,
            }
        else:
            elements = {
                1: ALPHA_MAX * tk.mixed3 @ tk.sym02,
                2: ALPHA_MAX * tk.mixed3 @ tk.sym01,
                0: tk.mixed3 @ (eye - 2.0 * tk.swap_sum) / 3.0,
            }
        return step(party, elements,
                    {1: Leaf(1), 2: Leaf(2), 0: Leaf(0)}, tk.mixed3)

    def mixed_mixed_step(first: str):
        second = BOB if first == ALICE else ALICE
        tk1, tk2 = toolkits[first], toolkits[second]
        four = {
            (1, 1): 0.5 * tk1.mixed3 @ tk1.antisym02,
            (1, 2): 0.5 * tk1.mixed3 @ tk1.sym02,
            (2, 1): 0.5 * tk1.mixed3 @ tk1.antisym01,
            (2, 2): 0.5 * tk1.mixed3 @ tk1.sym01,
        }
        children = {}
        for (a1, a2) in four:
            pair = (tk2.sym02, tk2.antisym02) if a1 == 1 else (tk2.sym01, tk2.antisym01)
            confirm = step(second,
                           {1: tk2.mixed3 @ pair[0], 2: tk2.mixed3 @ pair[1]},
                           {1: Leaf(a1 if a2 == 1 else 0), 2: Leaf(a1 if a2 == 2 else 0)},
                           tk2.mixed3)
            children[(a1, a2)] = confirm
        return step(first, four, children, tk1.mixed3)

    def bob_layer(alice_outcome: str):
        children = {}
        for b_outcome in ("sym", "antisym", "mixed"):
            pair = {alice_outcome, b_outcome}
            if pair in ({"sym"}, {"antisym"}, {"sym", "antisym"}):
                children[b_outcome] = Leaf(0)
            elif pair == {"sym", "mixed"}:
                mixed_party = BOB if b_outcome == "mixed" else ALICE
                children[b_outcome] = conclusive_step(mixed_party, other_symmetric=True)
            elif pair == {"antisym", "mixed"}:
                mixed_party = BOB if b_outcome == "mixed" else ALICE
                children[b_outcome] = conclusive_step(mixed_party, other_symmetric=False)
            else:
                children[b_outcome] = mixed_mixed_step(mixed_mixed_first)
        tkb = toolkits[BOB]
        return step(BOB, {"sym": tkb.sym3, "antisym": tkb.antisym3, "mixed": tkb.mixed3},
                    children)

    tka = toolkits[ALICE]
    root = step(ALICE, {"sym": tka.sym3, "antisym": tka.antisym3, "mixed": tka.mixed3},
                {outcome: bob_layer(outcome) for outcome in ("sym", "antisym", "mixed")})
    return LoccProtocol(d_a=d_a, d_b=d_b, root=root)
