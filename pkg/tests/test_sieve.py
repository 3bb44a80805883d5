import itertools
import math

import numpy as np
import pytest

from npclassify.mathcore import HolderSpec
from npclassify.sample import Sample
from npclassify.sieve import (
    NetSpec,
    SieveClassifier,
    UnsupportedSmoothnessError,
    build_net,
    empirical_risk,
    epsilon_schedule,
    sieve_fit,
)


class TestEpsilonSchedule:
    def test_sup_norm_branch(self):
        for n in (10, 100, 1000):
            assert epsilon_schedule(n, alpha=1, rho=2, p=math.inf) == (
                pytest.approx(n ** (-1 / 5))
            )

    def test_finite_p_branch(self):
        # (p + alpha)/((2 + alpha) p + rho (p + alpha)) = 3/9 = 1/3
        assert epsilon_schedule(64, alpha=1, rho=1, p=2) == pytest.approx(
            64 ** (-1 / 3)
        )

    def test_n_one(self):
        assert epsilon_schedule(1, alpha=0.5, rho=1.2, p=math.inf) == 1.0

    def test_validation(self):
        with pytest.raises(ValueError):
            epsilon_schedule(0, 1, 1, 2)
        with pytest.raises(ValueError):
            epsilon_schedule(10, 1, 1, 0.5)


def lipschitz_spec(d=1, L=1.0, beta=1.0):
    return HolderSpec(beta=beta, L=L, d=d)


class TestBuildNet:
    def test_reference_example(self):
        net = build_net(NetSpec(holder=lipschitz_spec(), epsilon=0.25))
        assert net.cells_per_axis == 8
        assert net.cell_side == pytest.approx(0.125)
        np.testing.assert_allclose(net.value_grid, [0.125, 0.375, 0.625, 0.875])

    def test_beta_above_one_rejected(self):
        with pytest.raises(UnsupportedSmoothnessError):
            NetSpec(holder=HolderSpec(beta=2.0, L=1.0, d=1), epsilon=0.1)

    def test_degenerate_single_cell(self):
        net = build_net(NetSpec(holder=lipschitz_spec(L=0.5), epsilon=1.0))
        assert net.cells_per_axis == 1
        assert net.n_cells == 1
        assert len(net.value_grid) >= 1

    def test_log_cardinality_scaling(self):
        # oracle: direct count vs the epsilon^{-d/beta} log(1/eps) model
        ratios = []
        for k in range(2, 7):
            eps = 2.0 ** (-k)
            net = build_net(NetSpec(holder=lipschitz_spec(), epsilon=eps))
            model = eps ** (-1.0) * math.log(1.0 / eps)
            ratios.append(net.log_cardinality / model)
        assert max(ratios) / min(ratios) <= 4.0
        assert all(0.25 <= r <= 4.0 for r in ratios)

    def test_net_property_random_lipschitz(self):
        # 100 random cell-anchored Lipschitz interpolations stay within
        # epsilon of the net in sup norm (checked on a 10x finer grid)
        rng = np.random.default_rng(21)
        for trial in range(100):
            eps = float(rng.choice([0.25, 0.125, 0.0625]))
            L = 1.0
            spec = NetSpec(holder=lipschitz_spec(L=L), epsilon=eps)
            net = build_net(spec)
            k = net.cells_per_axis
            # anchor values on cell corners with slope at most L
            anchors = np.empty(k + 1)
            anchors[0] = rng.random()
            for i in range(k):
                lo = max(0.0, anchors[i] - L * net.cell_side)
                hi = min(1.0, anchors[i] + L * net.cell_side)
                anchors[i + 1] = rng.uniform(lo, hi)

            fine = np.linspace(0.0, 1.0, 10 * k + 1)
            g = np.interp(fine, np.linspace(0, 1, k + 1), anchors)
            cells = np.clip((fine * k).astype(int), 0, k - 1)
            # best net element: per cell, the grid value closest to the
            # midrange of g over the cell
            worst = 0.0
            for c in range(k):
                mask = cells == c
                vals = g[mask]
                best = min(
                    float(np.max(np.abs(vals - v))) for v in net.value_grid
                )
                worst = max(worst, best)
            assert worst <= eps + 1e-12


class TestEmpiricalRisk:
    class _Const:
        def __init__(self, label):
            self.label = label

        def predict(self, x):
            return np.full(np.atleast_2d(x).shape[0], self.label)

    def test_perfect(self):
        s = Sample(x=np.array([[0.1], [0.9]]), y=np.array([1.0, 1.0]))
        assert empirical_risk(self._Const(1), s) == 0.0

    def test_all_wrong(self):
        s = Sample(x=np.array([[0.1], [0.9]]), y=np.array([1.0, 1.0]))
        assert empirical_risk(self._Const(0), s) == 1.0

    def test_half(self):
        s = Sample(
            x=np.array([[0.1], [0.3], [0.6], [0.9]]),
            y=np.array([1.0, 1.0, 0.0, 0.0]),
        )
        assert empirical_risk(self._Const(1), s) == 0.5


def enumerate_net_risks(sample, net):
    """Brute-force oracle: minimum empirical mismatch count over the net.

    Risk depends on a net element only through the induced cell labels, so
    scanning every label pattern scans every achievable risk value.  When
    the grid only has values on one side of 1/2, only that label occurs.
    """
    cells = net.cell_index(sample.x)
    has_zero = bool(np.any(net.value_grid < 0.5))
    has_one = bool(np.any(net.value_grid >= 0.5))
    label_options = []
    if has_zero:
        label_options.append(0)
    if has_one:
        label_options.append(1)
    best = None
    for pattern in itertools.product(label_options, repeat=net.n_cells):
        labels = np.array(pattern)
        mism = int(np.sum(labels[cells] != sample.y))
        best = mism if best is None else min(best, mism)
    return best


class TestSieveFit:
    def test_all_zero_labels(self):
        rng = np.random.default_rng(22)
        s = Sample(x=rng.random((40, 1)), y=np.zeros(40))
        net = build_net(NetSpec(holder=lipschitz_spec(), epsilon=0.25))
        clf = sieve_fit(s, net)
        assert np.all(clf.cell_labels == 0)
        assert empirical_risk(clf, s) == 0.0

    def test_majority_cell(self):
        net = build_net(NetSpec(holder=lipschitz_spec(), epsilon=0.5))
        # one cell of [0, 0.25): 3 ones, 1 zero
        s = Sample(
            x=np.array([[0.1], [0.12], [0.2], [0.05], [0.9]]),
            y=np.array([1.0, 1.0, 1.0, 0.0, 0.0]),
        )
        clf = sieve_fit(s, net)
        cell = net.cell_index(np.array([[0.1]]))[0]
        assert clf.cell_labels[cell] == 1

    def test_tie_breaks_to_zero_and_small_value(self):
        net = build_net(NetSpec(holder=lipschitz_spec(), epsilon=0.25))
        s = Sample(x=np.array([[0.05], [0.06]]), y=np.array([0.0, 1.0]))
        clf = sieve_fit(s, net)
        cell = net.cell_index(np.array([[0.05]]))[0]
        assert clf.cell_labels[cell] == 0
        assert clf.cell_values[cell] == net.value_grid[0]

    def test_empty_cells_label_zero(self):
        net = build_net(NetSpec(holder=lipschitz_spec(), epsilon=0.25))
        s = Sample(x=np.array([[0.99]]), y=np.array([1.0]))
        clf = sieve_fit(s, net)
        assert np.sum(clf.cell_labels) == 1

    def test_label_value_consistency(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            s = Sample(
                x=rng.random((30, 1)), y=(rng.random(30) < 0.5).astype(float)
            )
            net = build_net(NetSpec(holder=lipschitz_spec(), epsilon=0.125))
            clf = sieve_fit(s, net)
            np.testing.assert_array_equal(
                clf.cell_labels, (clf.cell_values >= 0.5).astype(int)
            )

    def test_permutation_invariance(self):
        rng = np.random.default_rng(24)
        s = Sample(x=rng.random((50, 2)), y=(rng.random(50) < 0.5).astype(float))
        net = build_net(
            NetSpec(holder=HolderSpec(beta=1.0, L=1.0, d=2), epsilon=0.25)
        )
        clf = sieve_fit(s, net)
        perm = rng.permutation(50)
        clf2 = sieve_fit(Sample(x=s.x[perm], y=s.y[perm]), net)
        np.testing.assert_array_equal(clf.cell_values, clf2.cell_values)

    def test_erm_matches_exhaustive_enumeration(self):
        # exact ERM oracle on every instance with <= 10 cells
        rng = np.random.default_rng(25)
        for _ in range(30):
            eps = float(rng.choice([0.25, 0.2, 0.55]))
            L = float(rng.choice([0.5, 1.0]))
            net = build_net(NetSpec(holder=lipschitz_spec(L=L), epsilon=eps))
            assert net.n_cells <= 10
            n = int(rng.integers(5, 40))
            s = Sample(x=rng.random((n, 1)), y=(rng.random(n) < 0.5).astype(float))
            clf = sieve_fit(s, net)
            best = enumerate_net_risks(s, net)
            got = int(round(empirical_risk(clf, s) * n))
            assert got == best

    def test_erm_matches_full_value_enumeration_small(self):
        # tiny instances: enumerate raw per-cell value assignments too
        rng = np.random.default_rng(26)
        net = build_net(NetSpec(holder=lipschitz_spec(L=0.75), epsilon=0.375))
        assert net.n_cells <= 4 and len(net.value_grid) <= 3
        for _ in range(10):
            n = int(rng.integers(4, 20))
            s = Sample(x=rng.random((n, 1)), y=(rng.random(n) < 0.5).astype(float))
            clf = sieve_fit(s, net)
            best = None
            for assignment in itertools.product(
                net.value_grid, repeat=net.n_cells
            ):
                cand = SieveClassifier(
                    net=net, cell_values=np.asarray(assignment)
                )
                mism = int(round(empirical_risk(cand, s) * n))
                best = mism if best is None else min(best, mism)
            assert int(round(empirical_risk(clf, s) * n)) == best

    def test_points_outside_cube_rejected(self):
        net = build_net(NetSpec(holder=lipschitz_spec(), epsilon=0.25))
        s = Sample(x=np.array([[1.5]]), y=np.array([1.0]))
        with pytest.raises(ValueError):
            sieve_fit(s, net)
