import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vhandover import cost_engine as ce
from vhandover.errors import DimensionError


def net(nid, rss=-70.0, lat=20.0, cov=100.0, bw=None):
    return ce.NetworkProfile(nid, "wlan", rss, lat, cov, bw)


def brute_force_rank(candidates, w, acceptance, serving=None):
    """Explicit double sums, then the best of all orderings of the accepted set."""
    params = w.parameters
    raw = {n.id: n.raw_metrics for n in candidates}
    z = {}
    for n in candidates:
        total = 0.0
        for s in range(w.m):
            for i, p in enumerate(params):
                vals = [raw[c.id][p] for c in candidates]
                lo, hi = min(vals), max(vals)
                if hi == lo:
                    k = 0.5
                elif ce.DEFAULT_DIRECTIONS[p] is ce.Direction.BENEFIT:
                    k = (hi - raw[n.id][p]) / (hi - lo)
                else:
                    k = (raw[n.id][p] - lo) / (hi - lo)
                total += w.weights[s, i] * k
        z[n.id] = total
    ok = [nid for nid in z if acceptance[nid]]
    best = None
    for perm in itertools.permutations(ok):
        key = [(round(z[p], 12), p != serving, p) for p in perm]
        if best is None or key < best[0]:
            best = (key, perm)
    return [] if best is None else [(p, z[p]) for p in best[1]]


def test_validate_weights_examples():
    assert ce.validate_weights(np.array([[0.5, 0.5]])) == []
    v = ce.validate_weights(np.array([[0.6, 0.6]]))
    assert len(v) == 1 and "1.2" in str(v[0])
    v = ce.validate_weights(np.array([[1.0, 0.0]]))
    assert {x.column for x in v} == {0, 1}


def test_validate_weights_reports_every_row():
    w = ce.WeightMatrix(np.array([[0.5, 0.5, 0.1], [0.2, 0.3, 0.5], [0.9, 0.2, 0.2]]))
    rows = sorted({v.row for v in ce.validate_weights(w)})
    assert rows == [0, 2]


@given(st.floats(min_value=1.1e-9, max_value=0.1))
def test_validate_weights_tolerance(off):
    assert ce.validate_weights(np.array([[0.5, 0.5 + off]]))
    assert not ce.validate_weights(np.array([[0.5, 0.5 + 0.9e-9]]))


def test_weights_from_priority_default_codes():
    row = ce.weights_from_priority(ce.PriorityEncoding(3, {"rss": 4, "latency": 3, "coverage": 2}))
    np.testing.assert_allclose(row, [4 / 9, 3 / 9, 2 / 9])
    assert row == pytest.approx([0.4444, 0.3333, 0.2222], abs=1e-4)


def test_weights_from_priority_equal_and_swapped():
    eq = ce.weights_from_priority(ce.PriorityEncoding(2, {"rss": 2, "latency": 2, "coverage": 2}))
    np.testing.assert_allclose(eq, [1 / 3] * 3)
    a = ce.weights_from_priority(ce.PriorityEncoding(3, {"rss": 4, "latency": 3, "coverage": 2}))
    b = ce.weights_from_priority(ce.PriorityEncoding(3, {"rss": 2, "latency": 3, "coverage": 4}))
    np.testing.assert_allclose(a, b[::-1])


def test_weights_from_priority_errors():
    with pytest.raises(ValueError):
        ce.weights_from_priority(ce.PriorityEncoding(1, {"rss": 0, "latency": 0}))
    with pytest.raises(ValueError):
        ce.PriorityEncoding(4)
    with pytest.raises(KeyError):
        ce.weights_from_priority(ce.PriorityEncoding(1, {"rss": 1}), ["rss", "latency"])


@given(st.lists(st.integers(min_value=1, max_value=50), min_size=2, max_size=6))
def test_weights_from_priority_always_valid(codes):
    enc = ce.PriorityEncoding(3, {f"p{i}": c for i, c in enumerate(codes)})
    row = ce.weights_from_priority(enc)
    assert ce.validate_weights(row[None, :]) == []


def test_normalize_costs_examples():
    k = ce.normalize_costs([net("a", rss=-60), net("b", rss=-80)])
    assert k[0].costs[0] == 0.0 and k[1].costs[0] == 1.0
    assert k[0].costs[1] == 0.5 and k[1].costs[1] == 0.5
    k = ce.normalize_costs([net("a", lat=10), net("b", lat=20), net("c", lat=30)])
    assert [cv.costs[1] for cv in k] == [0.0, 0.5, 1.0]


def test_normalize_costs_missing_metric_names_network():
    with pytest.raises(KeyError, match="'b'.*bandwidth"):
        ce.normalize_costs([net("a", bw=10.0), net("b")], ("rss", "bandwidth"))


metric = st.floats(min_value=-100, max_value=100, allow_nan=False)


@settings(max_examples=60)
@given(st.lists(st.tuples(metric, st.floats(1, 500), st.floats(1, 5000)), min_size=1, max_size=6))
def test_normalize_costs_bounds(rows):
    cands = [net(f"n{i}", r, l, c) for i, (r, l, c) in enumerate(rows)]
    ks = np.array([cv.costs for cv in ce.normalize_costs(cands)])
    assert np.all((ks >= 0) & (ks <= 1))
    for j, p in enumerate(ce.DEFAULT_PARAMETERS):
        vals = np.array([c.raw_metrics[p] for c in cands])
        if vals.max() > vals.min():
            best = vals.argmax() if ce.DEFAULT_DIRECTIONS[p] is ce.Direction.BENEFIT else vals.argmin()
            assert ks[best, j] == 0.0


def test_total_cost_examples():
    w = ce.WeightMatrix(np.array([[0.5, 0.3, 0.2]]))
    assert ce.total_cost(w, np.array([0.2, 0.4, 0.6])) == pytest.approx(0.34, abs=1e-15)
    assert ce.total_cost(w, np.zeros(3)) == 0.0
    with pytest.raises(DimensionError):
        ce.total_cost(w, np.zeros(4))


def test_total_cost_active_services():
    w = ce.WeightMatrix(np.array([[0.5, 0.3, 0.2], [0.2, 0.2, 0.6]]), services=(1, 3))
    k = np.array([1.0, 0.0, 0.0])
    assert ce.total_cost(w, k, [3]) == pytest.approx(0.2)
    assert ce.total_cost(w, k) == pytest.approx(0.7)
    full = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    assert ce.total_cost(w, full, [1]) == pytest.approx(0.5)
    with pytest.raises(KeyError):
        ce.total_cost(w, k, [2])


@given(st.lists(st.floats(0, 1), min_size=3, max_size=3), st.floats(min_value=1e-3, max_value=1e3))
def test_total_cost_linear_in_costs(k, c):
    w = ce.WeightMatrix(np.array([[0.5, 0.3, 0.2]]))
    k = np.array(k)
    assert ce.total_cost(w, c * k) == pytest.approx(c * ce.total_cost(w, k), rel=1e-12, abs=1e-300)


def test_rank_dominant_first_and_filter():
    w = ce.WeightMatrix(np.array([[0.4, 0.3, 0.3]]))
    cands = [net("a", -50, 5, 500), net("b", -60, 10, 300), net("c", -70, 20, 100)]
    ranked = ce.rank_networks(cands, w)
    assert ranked[0][0] == "a"
    ranked = ce.rank_networks(cands, w, acceptance={"a": False, "b": True, "c": True})
    assert [nid for nid, _ in ranked] == ["b", "c"]
    assert ce.rank_networks(cands, w, acceptance={}) == []


def test_rank_tie_breaks():
    w = ce.WeightMatrix(np.array([[0.4, 0.3, 0.3]]))
    twins = [net("b"), net("a")]
    assert [n for n, _ in ce.rank_networks(twins, w)] == ["a", "b"]
    assert [n for n, _ in ce.rank_networks(twins, w, serving="b")] == ["b", "a"]


def random_instance(rng, n=4):
    cands = [net(f"n{i}", float(rng.integers(-90, -40)), float(rng.integers(1, 6) * 10),
                 float(rng.integers(1, 5) * 100)) for i in range(n)]
    raw = rng.random(3) + 0.05
    w = ce.WeightMatrix((raw / raw.sum())[None, :])
    acc = {c.id: bool(rng.random() < 0.8) for c in cands}
    serving = f"n{rng.integers(0, n + 1)}"
    return cands, w, acc, serving


def test_rank_matches_brute_force():
    rng = np.random.default_rng(2024)
    for _ in range(200):
        cands, w, acc, serving = random_instance(rng)
        got = ce.rank_networks(cands, w, acceptance=acc, serving=serving)
        want = brute_force_rank(cands, w, acc, serving)
        assert [g[0] for g in got] == [x[0] for x in want]
        np.testing.assert_allclose([g[1] for g in got], [x[1] for x in want], atol=1e-12)


@settings(max_examples=60)
@given(st.integers(0, 2**32 - 1))
def test_rank_output_sorted_subset(seed):
    cands, w, acc, serving = random_instance(np.random.default_rng(seed), n=5)
    ranked = ce.rank_networks(cands, w, acceptance=acc, serving=serving)
    zs = [z for _, z in ranked]
    assert zs == sorted(zs)
    assert {nid for nid, _ in ranked} <= {nid for nid, ok in acc.items() if ok}


@given(st.lists(st.lists(st.floats(0, 1), min_size=3, max_size=3), min_size=2, max_size=6),
       st.floats(min_value=1e-3, max_value=1e3))
def test_argmin_invariant_under_scaling(ks, c):
    w = ce.WeightMatrix(np.array([[0.45, 0.35, 0.2]]))
    z = [ce.total_cost(w, np.array(k)) for k in ks]
    zc = [ce.total_cost(w, c * np.array(k)) for k in ks]
    best = min(z)
    if sorted(z)[1] - best > 1e-9 * max(1.0, best):  # skip near-ties
        assert int(np.argmin(z)) == int(np.argmin(zc))


def test_weight_matrix_from_priorities():
    w = ce.weight_matrix_from_priorities([ce.PriorityEncoding(1, {"rss": 2, "latency": 3, "coverage": 4}),
                                          ce.PriorityEncoding(3)])
    assert w.services == (1, 3)
    assert ce.validate_weights(w) == []
    with pytest.raises(DimensionError):
        ce.WeightMatrix(np.ones((1, 2)), ("rss", "latency", "coverage"))


def test_profile_invariants():
    with pytest.raises(ValueError):
        ce.NetworkProfile("x", "t", -60, 0.0, 100)
    with pytest.raises(ValueError):
        ce.NetworkProfile("x", "t", -60, 10, -1)
    with pytest.raises(ValueError):
        ce.CostVector("x", np.array([1.5]))
