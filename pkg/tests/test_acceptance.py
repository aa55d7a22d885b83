"""Acceptance gates at full stated scale. Each test prints one PASS/FAIL line
in the terminal summary (see conftest)."""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats as sps
from scipy.special import gammaln

from edgestep import bootstrap as bp
from edgestep import cli
from edgestep import edge_step as es
from edgestep import experiments as ex
from edgestep import generator as gen
from edgestep import urn
from edgestep.normalization import build_table
from edgestep.seeding import replica_stream
from edgestep.stats import empirical_law, total_variation

from oracles import brute_force_closure, degree_vector_law, endpoint_law, marginal

HALF = es.constant(0.5)
SUMMABLE = es.power_law(1, 0.5)


def half(t):
    return Fraction(1, 2)


def campaign(kind, f, horizon, replicas, seed, **params):
    return ex.run_campaign(ex.CampaignConfig(kind, f, horizon, replicas, seed, params))


@pytest.mark.acceptance(1, "exact law of G_t for t<=4 vs 1e6 Monte-Carlo runs, TV < 0.005")
def test_exact_law(record_property):
    for t in (2, 3, 4):
        exact = {k + (0,) * (t - len(k)): float(v) for k, v in endpoint_law(half, t).items()}
        vecs = gen.degree_vectors(HALF, t, 10**6, np.random.default_rng(100 + t))
        tv = total_variation(empirical_law(vecs), exact)
        record_property(f"tv_t{t}", round(tv, 5))
        assert tv < 0.005


@pytest.mark.acceptance(2, "degree-proportional sampler, chi-square p > 0.01 over 1e6 draws")
def test_sampler(record_property):
    G = gen.from_edges([[1, 1], [1, 2], [2, 3], [3, 3], [3, 4], [4, 5], [1, 5], [5, 5], [2, 2]])
    assert G.n_vertices == 5
    probs = G.degrees / G.degrees.sum()
    n = 10**6
    vec = gen.sample_degree_proportional(G, np.random.default_rng(1), size=n)
    rng = np.random.default_rng(2)
    scalar = np.array([gen.sample_degree_proportional(G, rng) for _ in range(n)])
    for name, draws in (("vector", vec), ("scalar", scalar)):
        counts = np.bincount(draws, minlength=6)[1:]
        p = sps.chisquare(counts, probs * n).pvalue
        record_property(f"p_{name}", round(p, 4))
        assert p > 0.01


@pytest.mark.acceptance(3, "phi(t) vs log-Gamma closed form for f=p, relative error < 1e-8")
def test_normalizer(record_property):
    worst = 0.0
    for p in (0.25, 0.5, 1.0):
        table = build_table(es.constant(p), 10**6, k_max=0)
        for t in (10, 10**3, 10**6):
            ref = gammaln(t + 1 - p / 2) - gammaln(t) - gammaln(2 - p / 2)
            worst = max(worst, abs(math.expm1(table.log_phi[t - 1] - ref)))
    record_property("max_rel_err", f"{worst:.2e}")
    assert worst < 1e-8


@pytest.mark.acceptance(4, "d_t(1)/phi(t) mean flat within 3 sigma, 5000 replicas, t=2^4..2^17")
def test_martingale_flatness(record_property):
    res = campaign("martingale", HALF, 2**17, 5000, 4, vertex=1, first_checkpoint=16)
    s = res.summary
    assert s["checkpoints"] == [2**k for k in range(4, 18)]
    dev = max(abs(m - 2.0) / b for m, b in zip(s["mean_normalized_degree"], s["band_3se"]))
    record_property("max_dev_in_3se_units", round(dev, 3))
    assert res.gates["flat"]


@pytest.mark.acceptance(5, "sharpness of summability: linear max degree vs decay trend, 200 replicas T=1e5")
def test_sharpness(record_property):
    lin = campaign("max_degree", SUMMABLE, 10**5, 200, 5)
    dec = campaign("max_degree", HALF, 10**5, 200, 6)
    record_property("frac_linear", lin.summary["fraction_linear_above_floor"])
    record_property("median_M_T/T", round(dec.summary["median_linear_T"], 5))
    record_property("median_M_half/half", round(dec.summary["median_linear_half"], 5))
    assert lin.gates["linear_positive"]
    assert dec.gates["sublinear_trend"]


@pytest.mark.acceptance(6, "CLT residuals KS < 0.05 (cases a and b), shuffled control fails")
def test_clt(record_property):
    for label, f, seed in (("a", HALF, 61), ("b", SUMMABLE, 62)):
        res = campaign("clt", f, 10**6, 2000, seed, s=10**4, vertex=1)
        s = res.summary
        assert s["case"] == label
        record_property(f"ks_{label}", round(s["ks"], 4))
        record_property(f"control_ks_{label}", round(s["control_ks"], 4))
        assert res.gates["ks"] and res.gates["control_rejected"] and res.gates["exclusions"]
        assert s["control_mean_abs_residual"] > s["mean_abs_residual"]


@pytest.mark.acceptance(7, "persistent leadership trend, 200 replicas, T in {1e3,1e4,1e5}")
def test_leadership(record_property):
    res = campaign("leadership", HALF, 10**5, 200, 7, gap=1, sub_horizons=[10**3, 10**4, 10**5])
    record_property("same_leader", res.summary["same_leader_fraction"])
    record_property("median_gap", res.summary["median_gap"])
    assert res.gates["persistence_trend"] and res.gates["gap_trend"]


@pytest.mark.acceptance(8, "first-moment slope over i=1..64 <= -0.35, 2000 replicas, T=1e5")
def test_moment_decay(record_property):
    res = campaign("moments", HALF, 10**5, 2000, 8, k=1)
    record_property("slope", round(res.summary["slope"], 4))
    assert res.summary["slope"] <= -0.35
    assert res.gates["slope"]


def _small_graphs():
    graphs = [
        [[1, 2], [2, 3], [3, 4], [4, 5]],
        [[1, 2], [1, 3], [1, 4], [1, 5], [1, 6]],
        [list(e) for e in itertools.combinations(range(1, 5), 2)] * 2,
        [[1, 1], [1, 2], [2, 2], [2, 3], [3, 3], [1, 3], [3, 4]],
    ]
    for seed in range(6):
        G = gen.generate(SUMMABLE, 16, np.random.default_rng(seed))
        if G.n_vertices <= 12:
            graphs.append(G.edges.tolist())
    rng = np.random.default_rng(99)
    for n in (6, 9, 12):
        e = rng.integers(1, n + 1, size=(2 * n, 2))
        e[0] = [n, 1]
        graphs.append(e.tolist())
    return graphs


@pytest.mark.acceptance(9, "bootstrap outbreak >= 2% in >= 90/100 replicas, half within 6 rounds; brute-force closure")
def test_bootstrap_outbreak(record_property):
    T = 10**5
    big, slow = 0, 0
    for k in range(100):
        rng = replica_stream(9, k)
        G = gen.generate(SUMMABLE, T, rng)
        res = bp.run_to_stabilization(G, bp.BootstrapParams(math.log(T), 2), rng)
        if res.fraction >= 0.02:
            big += 1
            slow += res.rounds_to_half > 6
    record_property("outbreaks", big)
    record_property("slow_outbreaks", slow)
    assert big >= 90 and slow == 0
    checked = 0
    for edges in _small_graphs():
        n = int(np.max(edges))
        nb = bp.Neighbors.of(gen.from_edges(edges))
        for mask in range(1 << n):
            seeds = {v + 1 for v in range(n) if mask >> v & 1}
            for r in (2, 3):
                res = bp.run_to_stabilization(nb, bp.BootstrapParams(0, r), state=bp.state_from_set(nb, seeds))
                assert res.final.infected_ids == brute_force_closure(n, edges, seeds, r)[0]
                checked += 1
    record_property("closures_checked", checked)


@pytest.mark.acceptance(10, "urn vs graph at t=8: exact laws equal, each Monte-Carlo within TV 0.01")
def test_urn_coupling(record_property):
    law_urn = urn.exact_distribution(HALF, urn.UrnState(2, 0, 1), 8)
    law_graph = marginal(degree_vector_law(half, 8), 0)
    assert law_urn == law_graph
    exact = {k: float(v) for k, v in law_urn.items()}
    reds = urn.final_red_counts(HALF, urn.UrnState(2, 0, 1), 8, 10**6, np.random.default_rng(10))
    degs = gen.degree_vectors(HALF, 8, 10**6, np.random.default_rng(11))[:, 0]
    tv_urn = total_variation(empirical_law(reds), exact)
    tv_graph = total_variation(empirical_law(degs), exact)
    record_property("tv_urn", round(tv_urn, 5))
    record_property("tv_graph", round(tv_graph, 5))
    assert tv_urn < 0.01 and tv_graph < 0.01


@pytest.mark.acceptance(11, "identical config and seed give byte-identical raw CSV")
def test_reproducibility(tmp_path, record_property):
    text = """
edge_step: {family: power_law, params: {c: 1, gamma: 0.5}}
horizon: 20000
seed: 11
replicas: 64
params: {kind: leadership, gap: 1, sub_horizons: [2000, 20000]}
"""
    path = tmp_path / "c.yaml"
    path.write_text(text)
    blobs = []
    for out, workers in (("a", "1"), ("b", "1"), ("c", "2")):
        code = cli.main(["campaign", "--config", str(path), "--out", str(tmp_path / out), "--workers", workers])
        assert code in (0, 3)
        blobs.append((tmp_path / out / "raw.csv").read_bytes())
    record_property("bytes", len(blobs[0]))
    assert blobs[0] == blobs[1] == blobs[2]
