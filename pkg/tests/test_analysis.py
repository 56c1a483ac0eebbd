import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anticipatory.analysis import (
    BOLTZMANN,
    Branch,
    Classification,
    bifurcation_point,
    bifurcation_scan,
    branch_map,
    detect_period,
    entropy_of_counts,
    finite_difference,
    fixed_points,
    period_doubling_onset,
    redundancy_profile,
    separatrix_scan,
    shannon_entropy,
    stability,
    thermodynamic_entropy,
)
from anticipatory.analysis.scans import grid
from anticipatory.maps import ConfigError, DomainError, MapKind, MapSpec
from anticipatory.policy import SelectionPolicy

from oracles import entropy_bits, hyper_paths

M = MapSpec.parse


def _by_branch(reports, branch, nonzero=True):
    return [r for r in reports if r.branch is branch and (r.location != 0.0 or not nonzero)]


def test_recursive_fixed_points():
    reports = fixed_points(M("recursive", 4))
    assert [r.location for r in reports] == [0.0, 0.75]
    r = reports[1]
    assert r.multiplier == 2.0 and r.classification is Classification.UNSTABLE


def test_incursive_fixed_point():
    r = fixed_points(M("incursive", 4))[1]
    assert r.location == 0.75 and r.multiplier == 0.25 and r.classification is Classification.STABLE


def test_hyperincursive_upper_fixed_point():
    (r,) = _by_branch(fixed_points(M("hyper", 4)), Branch.UPPER)
    assert r.location == 0.75 and r.multiplier == 0.5 and r.classification is Classification.STABLE


def test_self_organization_identity_constant():
    (r,) = fixed_points(M("selforg", 4))
    assert r.branch is Branch.REAL_CUBIC
    assert abs(r.location - 0.5) <= 1e-12
    assert r.classification is Classification.STABLE


def test_interaction_lower_fixed_point():
    (r,) = fixed_points(M("interaction", 4))
    assert r.location == pytest.approx((9 - math.sqrt(17)) / 8, abs=1e-15)
    # substitution into x = 1 - sqrt(x/4)
    assert abs(1 - math.sqrt(r.location / 4) - r.location) <= 1e-12


def test_organization_marginal_fixed_point():
    (r,) = fixed_points(M("org", 4))
    assert r.location == 0.5
    f = lambda x: 1 - math.sqrt(x / (4 * (1 - x)))  # noqa: E731
    fd = abs((f(0.5 + 1e-6) - f(0.5 - 1e-6)) / 2e-6)
    assert abs(fd - 1.0) <= 1e-6
    assert abs(r.multiplier - 1.0) <= 1e-6
    assert r.classification is Classification.MARGINAL


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(list(MapKind)), st.floats(0.05, 20.0))
def test_fixed_points_satisfy_branch_and_match_fd(kind, p):
    for r in fixed_points(MapSpec(kind, p)):
        assert 0.0 <= r.location <= 1.0
        assert r.residual() <= 1e-9
        if not r.singular and math.isfinite(r.fd_multiplier):
            assert abs(r.multiplier - r.fd_multiplier) <= 1e-6 * max(1.0, r.multiplier)


def test_singular_multiplier_is_marginal():
    st_ = stability(M("hyper", 2), Branch.UPPER, 0.5)
    assert st_.singular and st_.classification is Classification.MARGINAL


def test_stability_examples():
    assert stability(M("recursive", 4), Branch.SINGLE, 0.75).multiplier == 2.0
    assert stability(M("incursive", 4), Branch.SINGLE, 0.75).multiplier == 0.25
    assert stability(M("hyper", 4), Branch.UPPER, 0.75).multiplier == 0.5
    with pytest.raises(ConfigError):
        stability(M("recursive", 4), Branch.UPPER, 0.75)


def test_finite_difference_helper():
    assert finite_difference(math.sin, 0.3) == pytest.approx(math.cos(0.3), abs=1e-9)
    assert branch_map(M("hyper", 4), Branch.LOWER)(0.75) == pytest.approx(0.25)


def test_separatrix_examples():
    rows = separatrix_scan(3.9, 4.1, 0.1).rows
    assert [r.a for r in rows] == [3.9, 4.0, 4.1]
    assert [r.recursive_interval_invariant for r in rows] == [True, True, False]
    assert [r.hyperincursive_all_real for r in rows] == [False, True, True]
    assert all(r.incursive_defined for r in rows)


@given(st.floats(0.01, 3.99), st.floats(0.01, 0.5))
def test_separatrix_flips_only_at_four(a_min, step):
    report = separatrix_scan(a_min, a_min + 40 * step, step)
    for r in report.rows:
        assert r.recursive_interval_invariant == (r.a <= 4.0)
        assert r.hyperincursive_all_real == (r.a >= 4.0)
        both = r.recursive_interval_invariant and r.hyperincursive_all_real
        assert both == (r.a == 4.0)


def test_separatrix_hyper_complex_below_four():
    from anticipatory.maps import solve_hyperincursive

    assert solve_hyperincursive(0.9, 2.0).has_complex


def test_grid_is_inclusive_and_exact():
    g = grid(3.0, 5.0, 0.05)
    assert len(g) == 41 and g[0] == 3.0 and g[-1] == 5.0 and 4.0 in g
    with pytest.raises(ConfigError):
        grid(1.0, 2.0, 0.0)


@pytest.mark.parametrize("a,period", [(2.8, 1), (3.2, 2), (3.5, 4), (3.99, None), (4.0, None)])
def test_bifurcation_periods(a, period):
    # reference: plain iteration of the logistic map and a direct recurrence check
    x = 0.3
    for _ in range(1000):
        x = a * x * (1 - x)
    orbit = []
    for _ in range(256):
        x = a * x * (1 - x)
        orbit.append(x)
    ref = next((p for p in range(1, 65) if all(abs(orbit[i + p] - orbit[i]) <= 1e-6 for i in range(256 - p))), None)
    assert ref == period
    assert bifurcation_point(a).period == period


def test_bifurcation_scan_guards():
    with pytest.raises(ConfigError):
        bifurcation_scan(3.0, 4.5, 0.1)
    with pytest.raises(ConfigError):
        bifurcation_scan(3.0, 3.5, 0.1, transient=10)
    with pytest.raises(ConfigError):
        bifurcation_scan(3.0, 3.5, 0.1, samples=10)
    # a = 3.0 is the critical point itself, so keep the grid off it
    pts = bifurcation_scan(2.8, 3.6, 0.4)
    assert [p.a for p in pts] == [2.8, 3.2, 3.6]
    assert [p.period for p in pts[:2]] == [1, 2]


def test_detect_period():
    assert detect_period([0.1, 0.9] * 100) == 2
    assert detect_period([0.3] * 200) == 1
    rnd = random.Random(1)
    assert detect_period([rnd.random() for _ in range(200)]) is None


def test_period_doubling_onset():
    onset = period_doubling_onset()
    assert 2.99 <= onset <= 3.01


def test_shannon_entropy_examples():
    assert shannon_entropy([0.5, 0.5]) == 1.0
    assert shannon_entropy([1.0]) == 0.0
    assert shannon_entropy([0.25] * 4) == 2.0
    assert shannon_entropy([0.5, 0.5, 0.0]) == 1.0


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 8, 10, 16, 1024])
def test_uniform_entropy_is_log2_n(n):
    assert shannon_entropy([1.0 / n] * n) == math.log2(n)
    assert entropy_of_counts([1] * n) == math.log2(n)


@pytest.mark.parametrize("bad", [[0.5, 0.6], [1.2, -0.2], [], [math.nan, 1.0]])
def test_shannon_entropy_rejects(bad):
    with pytest.raises(DomainError):
        shannon_entropy(bad)


@given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=30).filter(lambda v: sum(v) > 0))
def test_entropy_bounds(weights):
    total = math.fsum(weights)
    p = [w / total for w in weights]
    h = shannon_entropy(p)
    assert 0.0 <= h <= math.log2(len(p)) + 1e-12


@given(st.lists(st.integers(1, 50), min_size=1, max_size=30), st.randoms())
def test_entropy_of_counts_symmetric(counts, rnd):
    shuffled = counts[:]
    rnd.shuffle(shuffled)
    assert entropy_of_counts(counts) == pytest.approx(entropy_of_counts(shuffled), abs=1e-12)
    assert entropy_of_counts(counts) == pytest.approx(entropy_bits(counts), abs=1e-12)


def test_thermodynamic_entropy():
    assert thermodynamic_entropy(0.0) == 0.0
    assert thermodynamic_entropy(1.0) == pytest.approx(1.380649e-23 * math.log(2), rel=1e-15)
    assert thermodynamic_entropy(2.0) == pytest.approx(2 * BOLTZMANN * math.log(2), rel=1e-15)
    with pytest.raises(DomainError):
        thermodynamic_entropy(-1.0)


def test_redundancy_deterministic_policy():
    prof = redundancy_profile(M("hyper", 4), 0.75, 6, SelectionPolicy.upper())
    assert prof.rows[0].redundancy == 0.0
    for row in prof.rows[1:]:
        assert row.h_bits == 0.0 and row.redundancy == 1.0 and row.reachable == 1


def test_redundancy_double_root():
    row = redundancy_profile(M("hyper", 4), 1.0, 1).rows[1]
    assert (row.reachable, row.h_bits, row.redundancy) == (1, 0.0, 1.0)


def test_redundancy_all_paths_from_three_quarters():
    """Exhaustive enumeration: every one of the 2^5 paths lands in its own bin."""
    ends = hyper_paths(4.0, 0.75, 5)
    n_bins = len({round(e / 1e-9) for e in ends})
    assert n_bins == 32
    row = redundancy_profile(M("hyper", 4), 0.75, 5, bin_width=1e-9).rows[5]
    assert row.reachable == n_bins
    assert row.h_bits == pytest.approx(5.0, abs=1e-12)
    assert row.redundancy == pytest.approx(0.0, abs=1e-12)


def test_redundancy_positive_when_branches_coincide():
    # x0 = 1 gives a double root, so depth t holds 2^(t-1) states of weight 2
    prof = redundancy_profile(M("hyper", 4), 1.0, 6)
    for row in prof.rows[1:]:
        assert row.reachable == 2 ** (row.depth - 1)
        assert row.redundancy == pytest.approx(1.0 / row.depth, abs=1e-12)


def test_redundancy_random_policy_sampling():
    prof = redundancy_profile(M("hyper", 4), 0.75, 4, SelectionPolicy.random(0.5), n_samples=4000, seed=3)
    for row in prof.rows:
        assert row.h_bits <= math.log2(max(row.reachable, 1)) + 1e-12 <= row.h_max_bits + 1e-12
        assert 0.0 <= row.redundancy <= 1.0
    # 16 equally likely endpoints at depth 4
    assert prof.rows[4].reachable == 16
    assert prof.rows[4].h_bits == pytest.approx(4.0, abs=0.05)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([MapKind.HYPERINCURSIVE, MapKind.INTERACTION, MapKind.ORGANIZATION]),
       st.floats(0.5, 8.0), st.floats(0.0, 1.0))
def test_redundancy_bounds_all_paths(kind, p, x0):
    for row in redundancy_profile(MapSpec(kind, p), x0, 10).rows:
        if row.reachable:
            assert row.h_bits <= math.log2(row.reachable) + 1e-12
            assert math.log2(row.reachable) <= row.h_max_bits + 1e-12
        assert 0.0 <= row.redundancy <= 1.0
