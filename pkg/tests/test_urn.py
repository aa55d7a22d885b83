from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edgestep import edge_step as es
from edgestep import urn
from edgestep.normalization import build_table
from edgestep.stats import empirical_law, total_variation

from oracles import degree_vector_law, marginal


class Forced:
    """Stand-in rng that replays fixed uniforms."""

    def __init__(self, values):
        self.values = list(values)

    def random(self):
        return self.values.pop(0)


def test_forced_examples():
    f = es.constant(0.5)
    rng = np.random.default_rng(0)
    assert urn.urn_step(urn.UrnState(2, 0, 1), f, rng, immigrate=True) == urn.UrnState(3, 1, 2)
    assert urn.urn_step(urn.UrnState(2, 0, 1), f, rng, immigrate=False) == urn.UrnState(4, 0, 2)


def test_sequential_mode_sees_first_ball():
    f = es.constant(0.5)
    # edge step, first draw red; then 0.6 picks slot 1: red among 3 balls, blue among 2
    s = urn.UrnState(1, 1, 1)
    seq = urn.urn_step(s, f, Forced([0.9, 0.1, 0.6]), sequential=True)
    pre = urn.urn_step(s, f, Forced([0.9, 0.1, 0.6]), sequential=False)
    assert seq == urn.UrnState(3, 1, 2) and pre == urn.UrnState(2, 2, 2)


def test_invalid_state():
    with pytest.raises(ValueError):
        urn.UrnState(0, 3, 1)


def test_start_for_vertex():
    assert urn.start_for_vertex(1) == urn.UrnState(2, 0, 1)
    assert urn.start_for_vertex(5) == urn.UrnState(1, 9, 5)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 5), st.integers(0, 5), st.integers(1, 60), st.integers(0, 2**31), st.booleans())
def test_bookkeeping(red, blue, steps, seed, sequential):
    f = es.power_law(1, 0.5)
    rng = np.random.default_rng(seed)
    s = urn.UrnState(red, blue, 1)
    for _ in range(steps):
        nxt = urn.urn_step(s, f, rng, sequential=sequential)
        assert nxt.red >= s.red
        assert nxt.red + nxt.blue == s.red + s.blue + 2
        s = nxt
    assert s.time == 1 + steps


def test_python_step_matches_kernel():
    f = es.constant(0.5)
    s = urn.UrnState()
    rng = np.random.default_rng(4)
    for _ in range(99):
        s = urn.urn_step(s, f, rng)
    out = np.zeros(1, np.int64)
    from edgestep import _kernels
    _kernels.urn_path(np.random.default_rng(4), f.padded(101), 2, 0, 1, np.array([100]), False, out)
    assert out[0] == s.red


def test_exact_coupling_with_graph_at_8():
    law_urn = urn.exact_distribution(es.constant(0.5), urn.UrnState(), 8)
    law_graph = marginal(degree_vector_law(lambda t: Fraction(1, 2), 8), 0)
    assert law_urn == law_graph
    assert sum(law_urn.values()) == 1


def test_vertex_born_later_coupling():
    # vertex 2 under f = 1 is born at time 2 with degree 1 out of 4
    law_urn = urn.exact_distribution(es.constant(1.0), urn.start_for_vertex(2), 6)
    law_graph = marginal(degree_vector_law(lambda t: Fraction(1), 6), 1)
    assert law_urn == law_graph


def test_symmetric_start_without_immigration():
    law = urn.exact_distribution(None, urn.UrnState(3, 3, 3), 12)
    mean = sum(Fraction(r, 24) * p for r, p in law.items())
    assert mean == Fraction(1, 2)
    summary = urn.red_proportion_trajectory(None, urn.UrnState(3, 3, 3), 2000, 2000, master_seed=5)
    sd = np.sqrt(summary.proportion["var"][-1] / 2000)
    assert abs(summary.proportion["mean"][-1] - 0.5) < 4 * sd


def test_monte_carlo_matches_exact():
    law = {k: float(v) for k, v in urn.exact_distribution(es.constant(0.5), urn.UrnState(), 8).items()}
    reds = urn.final_red_counts(es.constant(0.5), urn.UrnState(), 8, 100000, np.random.default_rng(1))
    assert total_variation(empirical_law(reds), law) < 0.01
    seq = {k: float(v) for k, v in
           urn.exact_distribution(es.constant(0.5), urn.UrnState(), 8, sequential=True).items()}
    reds = urn.final_red_counts(es.constant(0.5), urn.UrnState(), 8, 100000, np.random.default_rng(2),
                                sequential=True)
    assert total_variation(empirical_law(reds), seq) < 0.01
    assert total_variation(seq, law) > 0.01


def test_always_immigration_trend():
    s = urn.red_proportion_trajectory(es.constant(1.0), urn.UrnState(), 10**4, 300, master_seed=2)
    k_half = int(np.flatnonzero(s.times == 2**12)[0])
    assert s.proportion["mean"][-1] < s.proportion["mean"][k_half]


def test_summable_stabilizes_without_dominance():
    T = 10**5
    f = es.power_law(1, 0.5)
    s = urn.red_proportion_trajectory(f, urn.UrnState(), T, 1000, master_seed=3,
                                      times=[T // 2, T], table=build_table(f, T, k_max=0))
    var_half, var_T = s.proportion["var"]
    assert var_T == pytest.approx(var_half, rel=0.2)
    final = s.red[:, -1] / (2 * T)
    assert np.mean(final > 1 - 1e-3) < 0.01
    assert s.normalized is not None and np.all(s.normalized["mean"] > 0)


def test_blue_dominance_when_not_summable():
    s = urn.red_proportion_trajectory(es.constant(0.5), urn.UrnState(), 10**5, 300, master_seed=4,
                                      times=[10**3, 10**5])
    assert s.proportion["mean"][1] < s.proportion["mean"][0]


def test_summary_csv(tmp_path):
    f = es.constant(0.5)
    s = urn.red_proportion_trajectory(f, urn.UrnState(), 1000, 50, master_seed=1, table=build_table(f, 1000))
    urn.write_summary_csv(s, tmp_path / "u.csv")
    lines = (tmp_path / "u.csv").read_text().splitlines()
    assert lines[0].startswith("t,prop_mean,prop_q05,prop_q50,prop_q95,norm_mean")
    assert len(lines) == len(s.times) + 1


def test_replicas_reproducible():
    f = es.constant(0.5)
    a = urn.red_proportion_trajectory(f, urn.UrnState(), 500, 20, master_seed=9)
    b = urn.red_proportion_trajectory(f, urn.UrnState(), 500, 20, master_seed=9)
    assert np.array_equal(a.red, b.red)
    with pytest.raises(ValueError):
        urn.red_proportion_trajectory(f, urn.UrnState(1, 9, 5), 3, 2, master_seed=1)
