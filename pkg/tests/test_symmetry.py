import numpy as np
import pytest

from stateid.linalg import hermitian_eig, kron
from stateid.symmetry import (
    bipartite_toolkit,
    build_toolkit,
    check_dim_relation,
    dimension_table,
)

SQRT3_2 = 0.8660254037844386

ALL_D = (2, 3, 4, 5, 6)


@pytest.mark.parametrize("d,sym2,sym3,antisym3,mixed3", [
    (2, 3, 4, 0, 4),
    (3, 6, 10, 1, 16),
    (4, 10, 20, 4, 40),
    (5, 15, 35, 10, 80),
    (6, 21, 56, 20, 140),
])
def test_dimension_table_values(d, sym2, sym3, antisym3, mixed3):
    t = dimension_table(d)
    assert (t.sym2, t.sym3, t.antisym3, t.mixed3) == (sym2, sym3, antisym3, mixed3)
    assert t.sym3 + t.antisym3 + t.mixed3 == d**3


@pytest.mark.parametrize("d", ALL_D)
def test_dimension_closed_forms(d):
    t = dimension_table(d)
    assert t.sym3 == d * (d + 1) * (d + 2) // 6
    assert t.antisym3 == d * (d - 1) * (d - 2) // 6
    assert t.mixed3 == 2 * d * (d * d - 1) // 3


def test_dimension_table_rejects_nonpositive():
    with pytest.raises(ValueError):
        dimension_table(0)


class TestDimRelation:
    def test_two_qubits(self):
        rel = check_dim_relation(2, 2)
        assert (rel.lhs, rel.rhs, rel.residual) == (40, 40, 0)

    def test_qubit_qutrit(self):
        rel = check_dim_relation(2, 3)
        assert rel.lhs == 140
        assert rel.residual == 0

    @pytest.mark.parametrize("da", (2, 3, 4, 5))
    @pytest.mark.parametrize("db", (2, 3, 4, 5))
    def test_grid_residual_zero(self, da, db):
        assert check_dim_relation(da, db).residual == 0


@pytest.mark.parametrize("d", ALL_D)
class TestToolkitInvariants:
    def test_pair_projectors(self, d):
        tk = build_toolkit(d)
        eye = np.eye(d**3)
        assert np.abs(tk.sym01 - (eye + tk.swap01) / 2).max() == 0.0
        assert np.abs(tk.antisym02 - (eye - tk.swap02) / 2).max() == 0.0
        for p in (tk.sym01, tk.sym02, tk.antisym01, tk.antisym02):
            assert np.abs(p @ p - p).max() < 1e-12

    def test_young_projectors_resolve_identity(self, d):
        tk = build_toolkit(d)
        eye = np.eye(d**3)
        assert np.abs(tk.sym3 + tk.antisym3 + tk.mixed3 - eye).max() < 1e-12
        for p in (tk.sym3, tk.antisym3, tk.mixed3):
            assert np.abs(p @ p - p).max() < 1e-12
        assert np.abs(tk.sym3 @ tk.antisym3).max() < 1e-12
        assert np.abs(tk.sym3 @ tk.mixed3).max() < 1e-12
        assert np.abs(tk.antisym3 @ tk.mixed3).max() < 1e-12

    def test_traces_match_dimensions(self, d):
        tk = build_toolkit(d)
        assert abs(np.trace(tk.sym3) - tk.dims.sym3) < 1e-8
        assert abs(np.trace(tk.antisym3) - tk.dims.antisym3) < 1e-8
        assert abs(np.trace(tk.mixed3) - tk.dims.mixed3) < 1e-8

    def test_swap_combination_algebra(self, d):
        tk = build_toolkit(d)
        eye = np.eye(d**3)
        dd = tk.swap_diff @ tk.swap_diff
        assert np.abs(dd - 0.75 * tk.mixed3).max() < 1e-10
        assert np.abs(tk.swap_diff @ tk.swap_sum + tk.swap_sum @ tk.swap_diff).max() < 1e-10
        assert np.abs(tk.swap_sum @ tk.swap_sum - (eye - dd)).max() < 1e-10

    def test_mixed_projector_is_central(self, d):
        tk = build_toolkit(d)
        for t in (tk.swap01, tk.swap02, tk.swap12):
            assert np.abs(tk.mixed3 @ t - t @ tk.mixed3).max() < 1e-10
        assert abs(np.trace(tk.mixed3 @ tk.swap01)) < 1e-9
        assert abs(np.trace(tk.mixed3 @ tk.swap02)) < 1e-9

    def test_mixed_trace_formulas(self, d):
        tk = build_toolkit(d)
        vm = tk.dims.mixed3
        m = tk.mixed3
        assert abs(np.trace(m @ tk.antisym02 @ tk.sym01) - 3 * vm / 8) < 1e-8
        assert abs(np.trace(m @ tk.sym02 @ tk.antisym01) - 3 * vm / 8) < 1e-8
        assert abs(np.trace(m @ tk.sym02 @ tk.sym01) - vm / 8) < 1e-8
        assert abs(np.trace(m @ tk.antisym02 @ tk.antisym01) - vm / 8) < 1e-8


@pytest.mark.parametrize("d", (2, 3, 4, 5))
def test_swap_diff_spectrum(d):
    tk = build_toolkit(d)
    w = hermitian_eig(tk.swap_diff).eigenvalues
    vm = tk.dims.mixed3
    assert np.sum(np.abs(w - SQRT3_2) < 1e-9) == vm // 2
    assert np.sum(np.abs(w + SQRT3_2) < 1e-9) == vm // 2
    assert np.sum(np.abs(w) < 1e-9) == tk.dims.sym3 + tk.dims.antisym3


def test_no_antisymmetric_qubit_triples():
    tk = build_toolkit(2)
    assert abs(np.trace(tk.antisym3)) < 1e-12
    assert np.abs(tk.antisym3).max() < 1e-12


def test_build_toolkit_rejects_small_d():
    with pytest.raises(ValueError):
        build_toolkit(1)


def test_toolkit_is_cached_and_readonly():
    tk = build_toolkit(2)
    assert build_toolkit(2) is tk
    with pytest.raises(ValueError):
        tk.sym3[0, 0] = 5.0


class TestBipartite:
    @pytest.mark.parametrize("da,db", [(2, 2), (2, 3)])
    def test_swap_diff_factorization(self, da, db):
        bt = bipartite_toolkit(da, db)
        joint = build_toolkit(da * db)
        lhs = bt.to_party_major(joint.swap_diff)
        rhs = kron(bt.alice.swap_diff, bt.bob.swap_sum) + kron(bt.alice.swap_sum, bt.bob.swap_diff)
        assert np.abs(lhs - rhs).max() < 1e-10

    @pytest.mark.parametrize("da,db", [(2, 2), (2, 3)])
    def test_swap_sum_factorization(self, da, db):
        bt = bipartite_toolkit(da, db)
        joint = build_toolkit(da * db)
        lhs = bt.to_party_major(joint.swap_sum)
        rhs = kron(bt.alice.swap_diff, bt.bob.swap_diff) + kron(bt.alice.swap_sum, bt.bob.swap_sum)
        assert np.abs(lhs - rhs).max() < 1e-10

    def test_round_trip_conjugation(self):
        bt = bipartite_toolkit(2, 2)
        op = build_toolkit(4).sym01
        assert np.abs(bt.to_system_major(bt.to_party_major(op)) - op).max() < 1e-12

    def test_trivial_party_allowed(self):
        bt = bipartite_toolkit(1, 2)
        assert bt.alice.dims.sym3 == 1
        assert bt.alice.dims.mixed3 == 0
        assert bt.regroup.shape == (8, 8)

    def test_rejects_both_trivial(self):
        with pytest.raises(ValueError):
            bipartite_toolkit(1, 1)
