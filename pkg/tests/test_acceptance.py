"""Acceptance suite: one test and one printed PASS/FAIL line per criterion.

The artificial-data grid (criteria 3-5) is computed once per session at 20
realizations; MNIST criteria run the 3x300-per-digit protocol on the real
training files and skip only if those files are absent.
"""

import itertools

import numpy as np
import pytest

from pknng import (
    ConnectorConfig,
    DatasetSpec,
    Penalty,
    Scheme,
    accuracy,
    apsp_dijkstra,
    apsp_floyd_warshall,
    build_knn_graph,
    components,
    connect_graph,
    euclidean_matrix,
    generate_dataset,
    hierarchical,
    mst_cluster,
    pam,
    pknng_metric,
)
from pknng.experiment import MethodSpec, ExperimentSpec, run_grid, run_mnist
from pknng.graph import EdgeKind

from conftest import (
    all_simple_paths_shortest,
    random_connected_graph,
    random_dissimilarity,
)

REALIZATIONS = 20
BASE_SEED = 0
GRID_KNN_K = 3
MNIST_KNN_K = 5

ARTIFICIAL_SIZES = {"two_arcs": 100, "three_spirals": 180, "three_rings": 120}
EMBEDDINGS = ("plane2d", "swiss3d", "swiss3d_noise", "rot10d_noise")

SCHEME_METHODS = {
    "euclidean": MethodSpec(metric="euclidean", algorithm="pam"),
    "min_span": MethodSpec(metric="pknng", scheme="min_span", algorithm="pam", knn_k=GRID_KNN_K),
    "all_subgraphs": MethodSpec(metric="pknng", scheme="all_subgraphs", algorithm="pam",
                                knn_k=GRID_KNN_K),
    "all_edges": MethodSpec(metric="pknng", scheme="all_edges", algorithm="pam",
                            knn_k=GRID_KNN_K),
    "medoids": MethodSpec(metric="pknng", scheme="medoids", algorithm="pam", knn_k=GRID_KNN_K),
    "min_span_plain": MethodSpec(metric="pknng", scheme="min_span", penalty="plain",
                                 algorithm="pam", knn_k=GRID_KNN_K),
}
ALGO_METHODS = {
    "hc": MethodSpec(metric="pknng", scheme="min_span", algorithm="hc", linkage="average",
                     knn_k=GRID_KNN_K),
    "mst": MethodSpec(metric="pknng", scheme="min_span", algorithm="mst", knn_k=GRID_KNN_K),
}


def report(number: int, name: str, ok: bool, detail: str = "") -> None:
    line = f"ACCEPTANCE {number} {'PASS' if ok else 'FAIL'}: {name}"
    if detail:
        line += f" [{detail}]"
    print(line, flush=True)
    assert ok, line


def low_noise_datasets():
    return [DatasetSpec(family=fam, n_per_cluster=n, noise="low", embedding=emb)
            for fam, n in ARTIFICIAL_SIZES.items() for emb in EMBEDDINGS]


@pytest.fixture(scope="session")
def scheme_grid(tmp_path_factory):
    """mean accuracy keyed by (family, embedding, method name)."""
    spec = ExperimentSpec(datasets=tuple(low_noise_datasets()),
                          methods=tuple(SCHEME_METHODS.values()),
                          realizations=REALIZATIONS, base_seed=BASE_SEED)
    cells = run_grid(spec, tmp_path_factory.mktemp("scheme_grid"), jobs=2)
    by_label = {m.label(): name for name, m in SCHEME_METHODS.items()}
    out = {}
    for cell in cells:
        method = by_label[MethodSpec(
            metric=cell["metric"], algorithm=cell["algorithm"], scheme=cell["scheme"],
            penalty=cell["penalty"], knn_k=cell["knn_k"], linkage=cell["linkage"],
            sigma_factor=cell["sigma_factor"]).label()]
        assert cell["n_failures"] == 0, cell
        out[(cell["family"], cell["embedding"], method)] = cell["mean_accuracy"]
    return out


@pytest.fixture(scope="session")
def algo_grid(tmp_path_factory):
    """PAM-alternative clusterers on the low-noise 2d cells."""
    datasets = tuple(DatasetSpec(family=fam, n_per_cluster=n, noise="low")
                     for fam, n in ARTIFICIAL_SIZES.items())
    spec = ExperimentSpec(datasets=datasets, methods=tuple(ALGO_METHODS.values()),
                          realizations=REALIZATIONS, base_seed=BASE_SEED)
    cells = run_grid(spec, tmp_path_factory.mktemp("algo_grid"), jobs=2)
    out = {}
    for cell in cells:
        assert cell["n_failures"] == 0, cell
        out[(cell["family"], cell["algorithm"])] = cell["mean_accuracy"]
    return out


def mnist_rows(mnist_files, digits):
    images, labels = mnist_files
    methods = [
        MethodSpec(metric="pknng", scheme="min_span", algorithm="pam", knn_k=MNIST_KNN_K),
        MethodSpec(metric="euclidean", algorithm="spectral"),
        MethodSpec(metric="euclidean", algorithm="pam"),
        MethodSpec(metric="euclidean", algorithm="mst"),
    ]
    rows = run_mnist(images, labels, digits, per_class=300, repeats=3,
                     methods=methods, base_seed=BASE_SEED)
    return {row["method"].split("-")[0] if row["method"].startswith("pknng")
            else row["method"]: row["mean_accuracy"] for row in rows}


@pytest.fixture(scope="session")
def mnist_358(mnist_files):
    return mnist_rows(mnist_files, [3, 5, 8])


@pytest.fixture(scope="session")
def mnist_479(mnist_files):
    return mnist_rows(mnist_files, [4, 7, 9])


def check_mnist(number, name, rows, floor):
    ours = rows["pknng"]
    rivals = {k: v for k, v in rows.items() if k != "pknng"}
    ok = ours >= floor and all(ours > v for v in rivals.values())
    detail = f"pknng+pam={ours:.3f} floor={floor}, " + ", ".join(
        f"{k}={v:.3f}" for k, v in rivals.items())
    report(number, name, ok, detail)


def test_criterion_1_mnist_3_5_8(mnist_358):
    check_mnist(1, "MNIST 3-5-8: mean >= 0.58 and pknng+pam beats all rivals",
                mnist_358, floor=0.58)


def test_criterion_2_mnist_4_7_9(mnist_479):
    check_mnist(2, "MNIST 4-7-9: mean >= 0.48 and pknng+pam beats all rivals",
                mnist_479, floor=0.48)


def test_criterion_3_scheme_comparison(scheme_grid):
    failures = []
    med_diffs = []
    for fam in ARTIFICIAL_SIZES:
        for emb in EMBEDDINGS:
            euc = scheme_grid[(fam, emb, "euclidean")]
            for scheme in ("min_span", "all_subgraphs", "all_edges"):
                gap = scheme_grid[(fam, emb, scheme)] - euc
                if gap < 0.10:
                    failures.append(f"{fam}/{emb}/{scheme} gap={gap:.3f}")
            med_diffs.append(scheme_grid[(fam, emb, "medoids")] - euc)
    # the Medoids band is asserted on the low-noise slice mean: per cell,
    # a two-sided 0.05 band sits below the Monte-Carlo noise floor of a
    # 20-realization mean
    med_gap = abs(float(np.mean(med_diffs)))
    ok = not failures and med_gap <= 0.05
    detail = f"efficient-scheme cells failing +0.10: {failures or 'none'}; " \
             f"|mean(medoids - euclidean)|={med_gap:.3f}"
    report(3, "scheme comparison: efficient schemes >= euclid+0.10 per cell, "
              "medoids tracks euclid", ok, detail)


def test_criterion_4_penalization_ablation(scheme_grid):
    violations = []
    big_gaps = 0
    cells = 0
    for fam in ARTIFICIAL_SIZES:
        for emb in EMBEDDINGS:
            cells += 1
            gap = scheme_grid[(fam, emb, "min_span")] - scheme_grid[(fam, emb, "min_span_plain")]
            if gap < 0:
                violations.append(f"{fam}/{emb} gap={gap:.3f}")
            if gap >= 0.05:
                big_gaps += 1
    # identity half: plain all_edges reproduces the euclidean matrix exactly
    identity_ok = True
    config = ConnectorConfig(scheme=Scheme.ALL_EDGES, penalty=Penalty.PLAIN)
    for spec in [DatasetSpec(family="two_arcs", n_per_cluster=60, seed=101),
                 DatasetSpec(family="three_spirals", n_per_cluster=60, seed=102),
                 DatasetSpec(family="three_rings", n_per_cluster=40, seed=103),
                 DatasetSpec(family="two_arcs", n_per_cluster=60, seed=104,
                             embedding="swiss3d"),
                 DatasetSpec(family="two_arcs", n_per_cluster=60, seed=105,
                             embedding="rot10d_noise")]:
        ps = generate_dataset(spec)
        diff = np.abs(pknng_metric(ps.points, k=GRID_KNN_K, config=config)
                      - euclidean_matrix(ps.points)).max()
        identity_ok = identity_ok and diff <= 1e-9
    ok = not violations and big_gaps >= cells / 2 and identity_ok
    detail = (f"exp<plain cells: {violations or 'none'}; gap>=0.05 on {big_gaps}/{cells}; "
              f"plain-all_edges==euclidean: {identity_ok}")
    report(4, "penalization ablation: exponential >= plain everywhere, "
              "identity for plain all_edges", ok, detail)


def test_criterion_5_algorithm_independence(scheme_grid, algo_grid):
    spreads = {}
    for fam in ARTIFICIAL_SIZES:
        accs = [scheme_grid[(fam, "plane2d", "min_span")],
                algo_grid[(fam, "hc")], algo_grid[(fam, "mst")]]
        spreads[fam] = max(accs) - min(accs)
    ok = all(s <= 0.05 for s in spreads.values())
    detail = ", ".join(f"{fam} spread={s:.3f}" for fam, s in spreads.items())
    report(5, "algorithm independence: PAM/HC/MST agree within 0.05 on 2d cells", ok, detail)


def test_criterion_6_compact_cloud_equivalence():
    from pknng.experiment import run_cell
    ds = DatasetSpec(family="four_gaussians", n_per_cluster=100)
    means = {}
    for name, method in {
        "euclidean": MethodSpec(metric="euclidean", algorithm="pam"),
        "pknng": MethodSpec(metric="pknng", scheme="min_span", algorithm="pam"),
    }.items():
        cell = run_cell(ds, method, realizations=REALIZATIONS, base_seed=BASE_SEED)
        assert cell["n_failures"] == 0
        means[name] = cell["mean_accuracy"]
    ok = all(v >= 0.99 for v in means.values())
    report(6, "compact clouds: euclidean and pknng both >= 0.99",
           ok, ", ".join(f"{k}={v:.4f}" for k, v in means.items()))


def test_criterion_7_oracle_equivalences():
    checks = {}

    rng = np.random.default_rng(1000)
    ok = True
    for _ in range(50):
        g = random_connected_graph(rng, int(rng.integers(5, 61)))
        ok &= bool(np.allclose(apsp_dijkstra(g), apsp_floyd_warshall(g), atol=1e-9))
    checks["dijkstra==floyd_warshall(50,n<=60)"] = ok

    ok = True
    for _ in range(20):
        g = random_connected_graph(rng, int(rng.integers(3, 9)), extra_edge_prob=0.3)
        ok &= bool(np.allclose(apsp_floyd_warshall(g), all_simple_paths_shortest(g),
                               atol=1e-12))
    checks["floyd_warshall==exhaustive(n<=8)"] = ok

    # Known red: BUILD + best-improvement SWAP is a local search, and on
    # roughly 1 in 11 random matrices at this scale its reachable local
    # optimum is not the global one (no single medoid exchange improves
    # it), so objective equality with exhaustive search cannot hold for
    # arbitrary seeded instances. Kept faithful rather than weakened; see
    # the failing-instance detail in the assertion message.
    ok = True
    pam_detail = ""
    for trial in range(20):
        n = int(rng.integers(6, 13))
        k = int(rng.integers(1, 4))
        D = random_dissimilarity(rng, n)
        best = min(D[:, list(m)].min(axis=1).sum()
                   for m in itertools.combinations(range(n), k))
        got = pam(D, k).objective
        if abs(got - best) > 1e-9 and not pam_detail:
            pam_detail = f" (first miss: trial {trial}, n={n}, k={k}, pam={got:.4f}, opt={best:.4f})"
        ok &= abs(got - best) <= 1e-9
    checks[f"pam==exhaustive(n<=12,k<=3){pam_detail}"] = ok

    def partition_key(labels):
        groups = {}
        for idx, lab in enumerate(labels):
            groups.setdefault(int(lab), []).append(idx)
        return frozenset(tuple(g) for g in groups.values())

    ok = True
    for _ in range(20):
        n = int(rng.integers(5, 26))
        D = random_dissimilarity(rng, n)
        for k in range(1, n + 1):
            ok &= partition_key(hierarchical(D, k, "single").labels) == \
                partition_key(mst_cluster(D, k).labels)
    checks["single_linkage==mst_cut(all k,20)"] = ok

    ok = True
    for _ in range(20):
        n = int(rng.integers(8, 40))
        pred = np.unique(rng.integers(0, int(rng.integers(1, 6)), n), return_inverse=True)[1]
        truth = np.unique(rng.integers(0, int(rng.integers(1, 6)), n), return_inverse=True)[1]
        side = max(pred.max(), truth.max()) + 1
        brute = max(sum(1 for p, t in zip(pred, truth) if perm[p] == t)
                    for perm in itertools.permutations(range(side))) / n
        ok &= abs(accuracy(pred, truth) - brute) <= 1e-12
    checks["accuracy==bruteforce(C<=5)"] = ok

    ok = True
    for _ in range(50):
        n = int(rng.integers(10, 61))
        pts = rng.normal(size=(n, int(rng.integers(1, 5))))
        k = int(rng.integers(1, 7))
        g = build_knn_graph(pts, k=k)
        d = euclidean_matrix(pts)
        expected = set()
        neighbor_sets = []
        for v in range(n):
            ranked = sorted((d[v, w], w) for w in range(n) if w != v)[:k]
            neighbor_sets.append({w for _, w in ranked})
            for _, w in ranked:
                expected.add((min(v, w), max(v, w)))
        got = set(zip(g.i.tolist(), g.j.tolist()))
        ok &= got == expected
        for (i, j), flag in zip(zip(g.i.tolist(), g.j.tolist()), g.reciprocal.tolist()):
            ok &= flag == (j in neighbor_sets[i] and i in neighbor_sets[j])
    checks["knn==bruteforce(50 sets)"] = ok

    all_ok = all(checks.values())
    detail = "; ".join(f"{name}:{'ok' if v else 'FAIL'}" for name, v in checks.items())
    report(7, "oracle equivalences", all_ok, detail)


def test_criterion_8_metric_axioms():
    rng = np.random.default_rng(2000)
    ok = True
    worst = 0.0
    for trial in range(30):
        n_blobs = int(rng.integers(1, 5))
        chunks = [rng.normal(scale=rng.uniform(0.3, 1.0), size=(int(rng.integers(5, 16)), 2))
                  + rng.uniform(-20, 20, 2) for _ in range(n_blobs)]
        pts = np.vstack(chunks)[:60]
        d = pknng_metric(pts, k=3)
        ok &= bool(np.array_equal(d, d.T))
        ok &= bool(np.all(np.diagonal(d) == 0.0))
        # exhaustive triangle inequality, vectorized over all (i, k, j);
        # tolerance scales with the entry (penalized weights reach 1e14,
        # where 1e-9 absolute is below double resolution)
        via = (d[:, :, None] + d[None, :, :]).min(axis=1)
        violation = float(((d - via) / np.maximum(1.0, d)).max())
        worst = max(worst, violation)
        ok &= violation <= 1e-9
    report(8, "metric axioms on 30 seeded inputs", ok,
           f"worst relative triangle violation={worst:.2e}")


def test_criterion_9_structural_invariants():
    rng = np.random.default_rng(3000)
    ok = True
    for trial in range(30):
        n_blobs = int(rng.integers(2, 6))
        centers = rng.uniform(-60, 60, size=(n_blobs, 2))
        chunks = [rng.normal(scale=0.5, size=(int(rng.integers(3, 9)), 2)) + c
                  for c in centers]
        pts = np.vstack(chunks)
        g = build_knn_graph(pts, k=2)
        n_comp = components(g).n_components
        if n_comp < 2:
            continue
        added = {}
        for scheme in Scheme:
            out = connect_graph(g, pts, ConnectorConfig(scheme=scheme))
            mask = out.kind == EdgeKind.ADDED
            added[scheme] = set(zip(out.i[mask].tolist(), out.j[mask].tolist()))
            ok &= components(out, include_added=True).n_components == 1
        ok &= len(added[Scheme.MIN_SPAN]) == n_comp - 1
        ok &= added[Scheme.MIN_SPAN] <= added[Scheme.ALL_SUBGRAPHS]
        ok &= len(added[Scheme.ALL_SUBGRAPHS]) == n_comp * (n_comp - 1) // 2
        ok &= len(added[Scheme.MEDOIDS]) == n_comp * (n_comp - 1) // 2
    report(9, "structural connector invariants over 30 disconnected graphs", ok)
