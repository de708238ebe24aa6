import math

import numpy as np
import pytest

from stateid.minerr import EQUAL_PRIORS, Priors, locc_protocol, max_success_global, optimal_global_povm
from stateid.povm import povm_from_dict
from stateid.protocol import Leaf, LoccProtocol
from stateid.simulate import (
    BatchStats,
    GlobalTrialSpec,
    LoccTrialSpec,
    TrialAbort,
    haar_state,
    haar_unitary,
    run_batch,
)
from stateid.unambiguous import global_unamb_povm

PMAX_D2_HALF = 0.6443375672974064


class TestHaarState:
    def test_unit_norm(self):
        rng = np.random.default_rng(0)
        for d in (1, 2, 5):
            v = haar_state(d, rng)
            assert v.shape == (d,)
            assert abs(np.linalg.norm(v) - 1.0) < 1e-12

    def test_single_dimension_is_a_phase(self):
        rng = np.random.default_rng(1)
        v = haar_state(1, rng)
        assert abs(abs(v[0]) - 1.0) < 1e-12

    def test_deterministic_given_seed(self):
        a = haar_state(3, np.random.default_rng(42))
        b = haar_state(3, np.random.default_rng(42))
        assert np.array_equal(a, b)

    def test_first_component_moment_qubit(self):
        # |c0|^2 is uniform on [0,1] for d=2: mean 1/2, variance 1/12
        rng = np.random.default_rng(2)
        n = 100_000
        samples = np.fromiter(
            (abs(haar_state(2, rng)[0]) ** 2 for _ in range(n)), dtype=float, count=n)
        sigma = math.sqrt(1 / 12 / n)
        assert abs(samples.mean() - 0.5) < 3 * sigma

    def test_first_component_moment_qutrit(self):
        # |c0|^2 ~ Beta(1, 2) for d=3: mean 1/3, variance 1/18
        rng = np.random.default_rng(3)
        n = 100_000
        samples = np.fromiter(
            (abs(haar_state(3, rng)[0]) ** 2 for _ in range(n)), dtype=float, count=n)
        sigma = math.sqrt(1 / 18 / n)
        assert abs(samples.mean() - 1 / 3) < 3 * sigma


def test_haar_unitary_is_unitary():
    rng = np.random.default_rng(4)
    u = haar_unitary(4, rng)
    assert np.abs(u @ u.conj().T - np.eye(4)).max() < 1e-12


class TestGlobalTrials:
    def test_always_answer_one(self):
        povm = povm_from_dict({1: np.eye(8), 2: np.zeros((8, 8))})
        spec = GlobalTrialSpec(povm, 2, EQUAL_PRIORS)
        for i in range(20):
            rec = spec.run(np.random.default_rng(i), i)
            assert rec.declared_label == 1
            assert rec.transcript == (("global", 1),)

    def test_incomplete_povm_aborts(self):
        povm = povm_from_dict({1: np.eye(8) / 2, 2: np.eye(8) / 4},
                              support=np.eye(8) * 0.75)
        spec = GlobalTrialSpec(povm, 2, EQUAL_PRIORS)
        with pytest.raises(TrialAbort, match="sum"):
            spec.run(np.random.default_rng(0), 0)

    def test_minerr_batch_matches_closed_form(self):
        spec = GlobalTrialSpec(optimal_global_povm(2, EQUAL_PRIORS), 2, EQUAL_PRIORS)
        stats = run_batch(spec, 20_000, 3, target=PMAX_D2_HALF)
        assert abs(stats.p_hat - PMAX_D2_HALF) <= 3 * stats.stderr
        assert stats.inconclusive == 0

    def test_unambiguous_batch_never_errs(self):
        povm = global_unamb_povm(2).as_povm()
        spec = GlobalTrialSpec(povm, 2, EQUAL_PRIORS)
        stats = run_batch(spec, 10_000, 3, target=1 / 6)
        assert stats.errors == 0
        assert abs(stats.p_hat - 1 / 6) <= 3 * stats.stderr

    def test_unitary_invariance(self):
        # rotating references and input by a fixed Haar unitary leaves the
        # success statistics unchanged (the POVM commutes with U x U x U)
        povm = optimal_global_povm(2, EQUAL_PRIORS)
        u = haar_unitary(2, np.random.default_rng(99))
        n = 100_000
        plain = run_batch(GlobalTrialSpec(povm, 2, EQUAL_PRIORS), n, 5)
        rotated = run_batch(GlobalTrialSpec(povm, 2, EQUAL_PRIORS, rotation=u), n, 6)
        z = abs(plain.p_hat - rotated.p_hat) / math.hypot(plain.stderr, rotated.stderr)
        assert z < 3.0


class TestLoccTrials:
    def test_trivial_protocol_all_inconclusive(self):
        proto = LoccProtocol(d_a=2, d_b=2, root=Leaf(0))
        spec = LoccTrialSpec(proto, EQUAL_PRIORS)
        stats = run_batch(spec, 50, 0)
        assert stats.inconclusive == 50
        assert stats.p_hat == 0.0

    def test_transcript_and_reproducibility(self):
        spec = LoccTrialSpec(locc_protocol(2, 2, EQUAL_PRIORS), EQUAL_PRIORS)
        rec1 = spec.run(np.random.default_rng((9, 0)), 0)
        rec2 = spec.run(np.random.default_rng((9, 0)), 0)
        assert rec1 == rec2
        assert rec1.transcript[0][0] == "alice"
        assert rec1.transcript[1][0] == "bob"
        assert rec1.declared_label in (1, 2)

    def test_batch_matches_closed_form(self):
        spec = LoccTrialSpec(locc_protocol(2, 2, EQUAL_PRIORS), EQUAL_PRIORS)
        target = max_success_global(4, EQUAL_PRIORS)
        stats = run_batch(spec, 20_000, 3, target=target)
        assert abs(stats.p_hat - target) <= 3 * stats.stderr

    def test_skewed_priors_batch(self):
        priors = Priors.from_eta1(0.3)
        spec = LoccTrialSpec(locc_protocol(2, 2, priors), priors)
        target = max_success_global(4, priors)
        stats = run_batch(spec, 20_000, 8, target=target)
        assert abs(stats.p_hat - target) <= 3 * stats.stderr


class TestRunBatch:
    def test_single_trial(self):
        spec = GlobalTrialSpec(optimal_global_povm(2, EQUAL_PRIORS), 2, EQUAL_PRIORS)
        stats = run_batch(spec, 1, 0)
        assert stats.n_trials == 1
        assert stats.successes + stats.errors + stats.inconclusive == 1

    def test_rejects_empty_batch(self):
        spec = GlobalTrialSpec(optimal_global_povm(2, EQUAL_PRIORS), 2, EQUAL_PRIORS)
        with pytest.raises(ValueError):
            run_batch(spec, 0, 0)

    def test_worker_count_invariance(self):
        spec = LoccTrialSpec(locc_protocol(2, 2, EQUAL_PRIORS), EQUAL_PRIORS)
        serial = run_batch(spec, 2_000, 17, workers=1)
        parallel = run_batch(spec, 2_000, 17, workers=4)
        assert serial == parallel

    def test_counts_are_consistent(self):
        spec = GlobalTrialSpec(optimal_global_povm(3, EQUAL_PRIORS), 3, EQUAL_PRIORS)
        stats = run_batch(spec, 500, 1)
        assert stats.successes + stats.errors + stats.inconclusive == stats.n_trials
        assert stats.p_hat == stats.successes / stats.n_trials
        expected_se = math.sqrt(stats.p_hat * (1 - stats.p_hat) / stats.n_trials)
        assert abs(stats.stderr - expected_se) < 1e-15

    def test_convergence_scaling(self):
        spec = GlobalTrialSpec(optimal_global_povm(2, EQUAL_PRIORS), 2, EQUAL_PRIORS)
        stats = {}
        for n in (1_000, 10_000, 100_000):
            stats[n] = run_batch(spec, n, 2, target=PMAX_D2_HALF)
            # estimate stays within the shrinking 4-sigma band at every scale
            assert abs(stats[n].p_hat - PMAX_D2_HALF) <= 4 * stats[n].stderr
        assert stats[1_000].stderr > stats[10_000].stderr > stats[100_000].stderr


def test_batch_stats_from_counts():
    stats = BatchStats.from_counts(10, 6, 1, 3, target=0.5)
    assert stats.p_hat == 0.6
    assert stats.target == 0.5
    assert stats.errors == 1 and stats.inconclusive == 3
