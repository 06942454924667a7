#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"

#include "dagwish/linalg.hpp"
#include "dagwish/rng.hpp"
#include "dagwish/selection.hpp"
#include "dagwish/simbench.hpp"
#include "test_util.hpp"

using namespace dagwish;
using namespace dagwish::testutil;

TEST_CASE("case names round-trip") {
    for (Case c : {Case::Banded, Case::AR, Case::Sparse3pct, Case::Compound,
                   Case::PermutedCompound})
        CHECK(case_from_name(case_name(c)) == c);
    CHECK_THROWS_AS(case_from_name("bogus"), ParseError);
}

TEST_CASE("make_omega: banded case, p = 3") {
    ScenarioSpec spec;
    spec.scenario = Case::Banded;
    spec.p = 3;
    Rng rng(1);
    auto [omega, dag] = make_omega(spec, rng);
    SymMatrix want(3);
    want.set(0, 0, 1.0);
    want.set(1, 1, 1.0);
    want.set(2, 2, 1.0);
    want.set(1, 0, 0.5);
    want.set(2, 1, 0.5);
    want.set(2, 0, 0.3);
    CHECK(max_abs_diff(omega, want) <= 1e-12);
    // Cholesky factors of band matrices keep the bandwidth, so the true DAG
    // links each vertex to its two larger-indexed neighbors.
    CHECK(dag == Dag(3, {{1, 2}, {2}, {}}));
}

TEST_CASE("make_omega: AR case, p = 2 closed form") {
    ScenarioSpec spec;
    spec.scenario = Case::AR;
    spec.p = 2;
    Rng rng(1);
    auto [omega, dag] = make_omega(spec, rng);
    CHECK(omega(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(omega(1, 1) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(omega(1, 0) == doctest::Approx(-2.0 / 3.0).epsilon(1e-12));
    CHECK(dag == Dag(2, {{1}, {}}));
}

TEST_CASE("make_omega: AR case inverse is the 0.5^|i-j| autocovariance") {
    ScenarioSpec spec;
    spec.scenario = Case::AR;
    spec.p = 8;
    Rng rng(1);
    auto [omega, dag] = make_omega(spec, rng);
    SymMatrix sigma = spd_inverse(omega);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j <= i; ++j)
            CHECK(sigma(i, j) == doctest::Approx(std::pow(0.5, i - j)).epsilon(1e-9));
    // AR(1) precision support: first off-diagonal band only.
    for (int j = 0; j < 7; ++j) CHECK(dag.parents(j) == std::vector<int>{j + 1});
    CHECK(dag.parents(7).empty());
}

TEST_CASE("make_omega: compound case, p = 10 deterministic") {
    ScenarioSpec spec;
    spec.scenario = Case::Compound;
    spec.p = 10;
    Rng rng(1);
    auto [omega, dag] = make_omega(spec, rng);
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j <= i; ++j)
            CHECK(omega(i, j) == doctest::Approx(i == j ? 1.0 : 0.5).epsilon(1e-12));
    CHECK(dag == Dag::full(10));

    // Beyond the 10-wide block the precision is the identity and the block's
    // vertices have no parents outside it.
    ScenarioSpec big = spec;
    big.p = 14;
    Rng rng2(1);
    auto [omega14, dag14] = make_omega(big, rng2);
    for (int i = 10; i < 14; ++i) {
        CHECK(omega14(i, i) == 1.0);
        for (int j = 0; j < i; ++j) CHECK(omega14(i, j) == 0.0);
        CHECK(dag14.parents(i).empty());
    }
}

TEST_CASE("make_omega: sparse case re-randomizes and hits its density") {
    ScenarioSpec spec;
    spec.scenario = Case::Sparse3pct;
    spec.p = 30;
    Rng rng(9);
    auto [o1, d1] = make_omega(spec, rng);
    auto [o2, d2] = make_omega(spec, rng);
    CHECK(!(d1 == d2));  // fresh truth each call with overwhelming probability
    int edges = 0;
    for (int j = 0; j < 30; ++j) edges += d1.nu(j);
    // ~3% of the 435 possible edges; allow generous slack.
    CHECK(edges >= 3);
    CHECK(edges <= 40);
    // PD by construction.
    CHECK_NOTHROW(mcd(o1));
    CHECK_NOTHROW(mcd(o2));
}

TEST_CASE("make_omega: permuted compound differs from compound by conjugation") {
    ScenarioSpec spec;
    spec.scenario = Case::PermutedCompound;
    spec.p = 12;
    Rng rng(4);
    auto [omega, dag] = make_omega(spec, rng);
    ScenarioSpec base = spec;
    base.scenario = Case::Compound;
    Rng rng2(4);
    auto [omega0, dag0] = make_omega(base, rng2);
    // Same multiset of entries (conjugation by a permutation matrix).
    std::multiset<double> a, b;
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j) {
            a.insert(std::round(omega(i, j) * 1e9));
            b.insert(std::round(omega0(i, j) * 1e9));
        }
    CHECK(a == b);
    (void)dag;
    (void)dag0;
}

TEST_CASE("make_omega: all cases are positive definite at benchmark sizes") {
    for (Case c : {Case::Banded, Case::AR, Case::Sparse3pct, Case::Compound,
                   Case::PermutedCompound}) {
        for (int p : {10, 30, 50}) {
            ScenarioSpec spec;
            spec.scenario = c;
            spec.p = p;
            Rng rng(77);
            auto [omega, dag] = make_omega(spec, rng);
            CHECK_NOTHROW(mcd(omega));
            // The declared DAG matches the exact Cholesky support.
            CholeskyParam f = mcd(omega);
            for (int j = 0; j < p; ++j)
                for (int i = j + 1; i < p; ++i)
                    if (std::fabs(f.L(i, j)) > 1e-8) CHECK(dag.has_edge(i, j));
        }
    }
}

TEST_CASE("sample_gaussian: deterministic and matches the target covariance") {
    ScenarioSpec spec;
    spec.scenario = Case::AR;
    spec.p = 3;
    Rng rng(3);
    auto [omega, dag] = make_omega(spec, rng);
    Rng a(5), b(5);
    Matrix Y1 = sample_gaussian(omega, 50, a);
    Matrix Y2 = sample_gaussian(omega, 50, b);
    CHECK(Y1 == Y2);

    Rng big(6);
    Matrix Y = sample_gaussian(omega, 200000, big);
    SymMatrix S = sample_covariance(Y);
    SymMatrix sigma = spd_inverse(omega);
    CHECK(max_abs_diff(S, sigma) <= 0.03);
    (void)dag;
}

TEST_CASE("losses: scaled-identity example") {
    SymMatrix omega0(2);
    omega0.set(0, 0, 1.0);
    omega0.set(1, 1, 1.0);
    SymMatrix est(2);
    est.set(0, 0, 2.0);
    est.set(1, 1, 2.0);
    LossReport r = losses(est, omega0, Dag(2));
    CHECK(r.l1 == doctest::Approx(2.0 - 2.0 * std::log(2.0)).epsilon(1e-12));
    CHECK(r.l4 == doctest::Approx(2.0));
    CHECK(r.l5 == doctest::Approx(2.0));
}

TEST_CASE("losses: single off-support perturbation") {
    SymMatrix omega0(2);
    omega0.set(0, 0, 1.0);
    omega0.set(1, 1, 1.0);
    SymMatrix est = omega0;
    est.set(0, 0, 1.1);
    LossReport r = losses(est, omega0, Dag(2));
    CHECK(r.l4 == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(r.l5 == doctest::Approx(0.01).epsilon(1e-12));
    // The support mask holds only parent positions, so a diagonal
    // perturbation is invisible to the restricted sums under an empty DAG.
    CHECK(r.l2 == 0.0);
    CHECK(r.l3 == 0.0);
    CHECK(r.l1 > 0.0);
    CHECK(r.by_index(4) == doctest::Approx(r.l4));
}

TEST_CASE("losses: support sums never exceed full sums") {
    Rng rng(13);
    for (int t = 0; t < 100; ++t) {
        int p = 2 + rng.below(5);
        SymMatrix omega0 = random_spd(p, rng);
        SymMatrix est = random_spd(p, rng);
        Dag dag0 = random_dag(p, 0.4, rng);
        LossReport r = losses(est, omega0, dag0);
        CHECK(r.l2 <= r.l4 + 1e-12);
        CHECK(r.l3 <= r.l5 + 1e-12);
        CHECK(r.l1 > 0.0);  // Stein loss is positive unless est == omega0
    }
}

TEST_CASE("losses: Stein loss is zero exactly at the truth") {
    Rng rng(29);
    SymMatrix omega0 = random_spd(4, rng);
    LossReport r = losses(omega0, omega0, Dag(4));
    CHECK(r.l1 == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(r.l4 == 0.0);
    CHECK(r.l5 == 0.0);
}

TEST_CASE("run_rep / run_benchmark: shapes, determinism, reps = 1 SE") {
    ScenarioSpec spec;
    spec.scenario = Case::Banded;
    spec.p = 6;
    spec.n = 40;
    spec.reps = 2;
    spec.seed = 11;
    SelectionConfig cfg;
    cfg.n_thresholds = 20;
    cfg.sss_iters = 2;
    cfg.cv_folds = 2;
    std::vector<Variant> methods{Variant::DagwBic, Variant::Dagw, Variant::Mle,
                                 Variant::Bayes};
    RepEstimates rep = run_rep(spec, methods, cfg, 3, 20, 0, 1);
    REQUIRE(rep.estimates.size() == methods.size());
    for (const auto& [v, est] : rep.estimates) CHECK(est.dim() == 6);

    std::vector<BenchRow> rows = run_benchmark(spec, methods, cfg, 3, 20, 1);
    CHECK(rows.size() == methods.size() * 5);  // 5 losses per method
    for (const BenchRow& row : rows) {
        CHECK(row.scenario == "banded");
        CHECK(row.reps == 2);
        CHECK(std::isfinite(row.mean));
        CHECK(std::isfinite(row.se));
    }

    // Serial vs parallel repetition scheduling: identical rows.
    std::vector<BenchRow> rows4 = run_benchmark(spec, methods, cfg, 3, 20, 4);
    REQUIRE(rows4.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].mean == rows4[i].mean);
        CHECK(rows[i].se == rows4[i].se);
        CHECK(rows[i].method == rows4[i].method);
        CHECK(rows[i].loss == rows4[i].loss);
    }

    spec.reps = 1;
    std::vector<BenchRow> one = run_benchmark(spec, {Variant::Mle}, cfg, 2, 20, 1);
    REQUIRE(one.size() == 5);
    for (const BenchRow& row : one) CHECK(std::isnan(row.se));
}

TEST_CASE("permuted compound: full-matrix losses are frame-independent for MLE") {
    // L4/L5 compare estimates entrywise against the (permuted) truth; the
    // full-DAG MLE is equivariant, so its loss distribution matches the
    // unpermuted compound case rep for rep when fed conjugated data.
    const int p = 10, n = 200;
    ScenarioSpec spec;
    spec.scenario = Case::Compound;
    spec.p = p;
    Rng rng_truth(3);
    auto [omega0, dag0] = make_omega(spec, rng_truth);
    Rng data_rng(8);
    Matrix Y = sample_gaussian(omega0, n, data_rng);
    SymMatrix S = sample_covariance(Y);
    CholeskyParam f = mle_estimate(S, Dag::full(p));
    LossReport base = losses(compose_precision(f.L, f.D), omega0, dag0);

    Rng prng(14);
    Permutation sigma = prng.permutation(p);
    Matrix Yp = apply_permutation(Y, sigma);
    SymMatrix omega0p(p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j <= i; ++j)
            omega0p.set(i, j, omega0(sigma[static_cast<std::size_t>(i)],
                                     sigma[static_cast<std::size_t>(j)]));
    CholeskyParam fp = mle_estimate(sample_covariance(Yp), Dag::full(p));
    LossReport perm = losses(compose_precision(fp.L, fp.D), omega0p, Dag::full(p));
    CHECK(perm.l4 == doctest::Approx(base.l4).epsilon(1e-8));
    CHECK(perm.l5 == doctest::Approx(base.l5).epsilon(1e-8));
    CHECK(perm.l1 == doctest::Approx(base.l1).epsilon(1e-8));
}

TEST_CASE("benchmark_csv: header, config echo, byte determinism") {
    BenchRow row;
    row.scenario = "banded";
    row.p = 6;
    row.n = 40;
    row.method = "DAGW.BIC";
    row.loss = "L1";
    row.mean = 0.5;
    row.se = 0.1;
    row.reps = 2;
    row.seed = 11;
    std::string csv = benchmark_csv({row}, "cfg=test");
    CHECK(csv.find("# cfg=test") != std::string::npos);
    CHECK(csv.find("case,p,n,method,loss,mean,se,reps,seed") != std::string::npos);
    CHECK(csv == benchmark_csv({row}, "cfg=test"));
}
