"""Theorem-level checks: decomposition oracle, robustness, outcome types."""

import itertools

import numpy as np
import pytest

from hittimes.systems import FiniteMarkovShift, LabelInterval, RenewalTower
from hittimes.verify import (
    VerificationOutcome,
    check_convergence_to_H,
    check_decomposition,
    check_return_vs_hitting,
    check_robustness,
)


def _chain_2():
    p = np.array([[0.3, 0.7], [0.6, 0.4]])
    return FiniteMarkovShift(transition=p, y_states=(0,))


def _chain_3(seed):
    rng = np.random.default_rng(seed)
    p = rng.uniform(0.05, 1.0, size=(3, 3))
    p /= p.sum(axis=1, keepdims=True)
    return FiniteMarkovShift(transition=p, y_states=(0, 1))


def _brute_force_sides(chain, a_states, b_states, n):
    """Path-enumeration oracle for the last-visit decomposition.

    Enumerates every trajectory (x_0, ..., x_n) under the stationary chain
    and splits mu(A) by the time of the last visit to B in steps 1..n.
    """
    p = chain.transition
    pi = chain.stationary
    k = len(p)
    in_a = np.zeros(k, dtype=bool)
    in_a[list(a_states)] = True
    in_b = np.zeros(k, dtype=bool)
    in_b[list(b_states)] = True
    avoid_term = 0.0
    visit_terms = np.zeros(n + 1)
    for path in itertools.product(range(k), repeat=n + 1):
        if not in_a[path[0]]:
            continue
        w = pi[path[0]]
        for x, y in zip(path, path[1:]):
            w *= p[x, y]
        hits = [l for l in range(1, n + 1) if in_b[path[l]]]
        if hits:
            visit_terms[hits[-1]] += w
        else:
            avoid_term += w
    return avoid_term, visit_terms


class TestDecomposition:
    def test_identity_by_path_enumeration(self):
        # the two sides of the decomposition, computed by brute force,
        # reassemble mu(A) exactly; the operator version must agree
        for chain, a, b in [
            (_chain_2(), [0], [0]),
            (_chain_2(), [0], [1]),
            (_chain_3(1), [0], [1, 2]),
            (_chain_3(2), [0, 2], [1]),
        ]:
            n = 5
            avoid, visits = _brute_force_sides(chain, a, b, n)
            mu_a = float(chain.stationary[a].sum())
            assert abs(mu_a - (avoid + visits.sum())) <= 1e-14
            assert check_decomposition(chain, a, b, n) <= 1e-12

    def test_trivial_window(self):
        assert check_decomposition(_chain_2(), [0], [1], 0) <= 1e-15

    def test_larger_windows(self):
        assert check_decomposition(_chain_3(7), [2], [0], 12) <= 1e-12

    def test_validation(self):
        ch = _chain_2()
        with pytest.raises(ValueError):
            check_decomposition(ch, [0], [1], 13)
        with pytest.raises(ValueError):
            check_decomposition(ch, [0], [1], -1)
        with pytest.raises(ValueError):
            check_decomposition(ch, [], [1], 3)
        with pytest.raises(ValueError):
            check_decomposition(ch, [0], [], 3)


class TestRobustness:
    def test_epsilon_schedule_validation(self):
        tw = RenewalTower(alpha=0.5)
        targets = [LabelInterval(p=0.1), LabelInterval(p=0.05)]
        kw = dict(n_samples=100, cap=1000, seed=0)
        with pytest.raises(ValueError):
            check_robustness(tw, targets, [0.5], **kw)  # length mismatch
        with pytest.raises(ValueError):
            check_robustness(tw, targets, [0.5, 1.5], **kw)  # out of range
        with pytest.raises(ValueError):
            check_robustness(tw, targets, [0.2, 0.5], **kw)  # increasing
        with pytest.raises(ValueError):
            check_robustness(tw, targets, [1.0, 1.0], **kw)  # never vanishes

    def test_harmonic_schedule_accepted(self):
        # eps_k = 1/k starts at 1 but vanishes, which is what matters
        tw = RenewalTower(alpha=0.5)
        targets = [LabelInterval(p=0.1), LabelInterval(p=0.05),
                   LabelInterval(p=0.02)]
        out = check_robustness(tw, targets, [1.0, 0.5, 1.0 / 3.0],
                               n_samples=2000, cap=10**5, seed=3)
        assert out.valid and out.passed

    def test_shift_is_distribution_free(self):
        # a shifted label interval has the identical return/hitting law and
        # consumes the identical random stream, so the distance is exactly 0
        tw = RenewalTower(alpha=0.5)
        targets = [LabelInterval(p=0.05)]
        out = check_robustness(tw, targets, [0.5], n_samples=2000,
                               cap=10**5, seed=4)
        assert out.passed
        final = {k: v for k, v in out.per_k[-1].items() if k.startswith("d_")}
        assert final and all(v == 0.0 for v in final.values())

    def test_rejects_targets_without_closed_form_shift(self):
        from hittimes.systems import BooleMap, IntervalInY

        with pytest.raises(TypeError):
            check_robustness(BooleMap(), [IntervalInY(0.5, 0.01)], [0.5],
                             n_samples=100, cap=1000, seed=0)


class TestReturnVsHitting:
    def test_tower_smoke(self):
        tw = RenewalTower(alpha=0.5)
        out = check_return_vs_hitting(
            tw, [LabelInterval(p=0.02)], 0.5,
            n_samples=20_000, cap=10**6, seed=5,
            tol_transform=0.05, tol_law=0.05)
        assert out.valid and out.passed
        assert out.distances["d(T(F_ret), F_hit)"] <= 0.05

    def test_with_reference_law(self):
        from hittimes.laws import halpha

        tw = RenewalTower(alpha=0.5)
        out = check_return_vs_hitting(
            tw, [LabelInterval(p=0.02)], 0.5,
            n_samples=20_000, cap=10**6, seed=6, law=halpha(0.5),
            tol_transform=0.05, tol_law=0.05)
        assert out.passed
        assert any("law" in k for k in out.distances)


def test_convergence_smoke():
    tw = RenewalTower(alpha=0.5)
    out = check_convergence_to_H(
        tw, [LabelInterval(p=0.1), LabelInterval(p=0.02)], 0.5,
        n_samples=20_000, cap=10**6, seed=7, tol=0.05)
    assert out.valid
    assert len(out.per_k) == 2
    assert out.per_k[-1]["d(F_ret, H)"] <= 0.05
    assert out.per_k[-1]["d(F_hit, H)"] <= 0.05
    assert out.passed


class TestVerificationOutcome:
    def test_summary_lines(self):
        out = VerificationOutcome(
            theorem="t", distances={"d": 0.01}, censored={"return": 0.0},
            tolerances={"d": 0.03}, passed=True)
        lines = out.summary_lines()
        assert any("d" in ln for ln in lines)

    def test_distance_range_validation(self):
        with pytest.raises(ValueError):
            VerificationOutcome(theorem="t", distances={"d": 1.5},
                                censored={}, tolerances={}, passed=True)
        with pytest.raises(ValueError):
            VerificationOutcome(theorem="t", distances={"d": -0.1},
                                censored={}, tolerances={}, passed=True)

    def test_consistency_validation(self):
        with pytest.raises(ValueError):
            VerificationOutcome(theorem="t", distances={"d": 0.1},
                                censored={}, tolerances={}, passed=True,
                                failures=("d too big",))
        with pytest.raises(ValueError):
            VerificationOutcome(theorem="t", distances={"d": 0.1},
                                censored={}, tolerances={}, passed=False,
                                failures=())
