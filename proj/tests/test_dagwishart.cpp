#include <cmath>
#include <vector>

#include "doctest.h"

#include "dagwish/dagwishart.hpp"
#include "dagwish/linalg.hpp"
#include "dagwish/rng.hpp"
#include "dagwish/selection.hpp"
#include "test_util.hpp"

using namespace dagwish;
using namespace dagwish::testutil;

namespace {

// Independent long-double oracle for the node score. Determinants come from
// Gaussian elimination with partial pivoting on a gathered dense block --
// deliberately a different algorithm than the library's Cholesky route.
long double oracle_logdet(std::vector<std::vector<long double>> a) {
    const std::size_t m = a.size();
    long double ld = 0.0L;
    for (std::size_t k = 0; k < m; ++k) {
        std::size_t piv = k;
        for (std::size_t r = k + 1; r < m; ++r)
            if (std::fabs(static_cast<double>(a[r][k])) >
                std::fabs(static_cast<double>(a[piv][k])))
                piv = r;
        if (piv != k) std::swap(a[piv], a[k]);  // symmetric positive input: det sign stays +
        ld += std::log(std::fabs(static_cast<long double>(a[k][k])));
        for (std::size_t r = k + 1; r < m; ++r) {
            long double f = a[r][k] / a[k][k];
            for (std::size_t c = k; c < m; ++c) a[r][c] -= f * a[k][c];
        }
    }
    return ld;
}

long double oracle_block_logdet(const SymMatrix& u, const std::vector<int>& idx) {
    std::vector<std::vector<long double>> a(idx.size(), std::vector<long double>(idx.size()));
    for (std::size_t r = 0; r < idx.size(); ++r)
        for (std::size_t c = 0; c < idx.size(); ++c) a[r][c] = u(idx[r], idx[c]);
    return idx.empty() ? 0.0L : oracle_logdet(std::move(a));
}

long double oracle_node_score(int i, const DagWishartParams& params, const Dag& dag) {
    const std::vector<int>& pa = dag.parents(i);
    long double a = params.alpha[static_cast<std::size_t>(i)];
    long double nu = static_cast<long double>(pa.size());
    std::vector<int> ge(pa);  // parents only (the "greater" block)
    std::vector<int> gei;     // vertex plus parents
    gei.push_back(i);
    gei.insert(gei.end(), pa.begin(), pa.end());
    long double ld_gt = oracle_block_logdet(params.U, ge);
    long double ld_ge = oracle_block_logdet(params.U, gei);
    return static_cast<long double>(std::lgammal(a / 2.0L - nu / 2.0L - 1.0L)) +
           (a / 2.0L - 1.0L) * std::log(2.0L) + (nu / 2.0L) * std::log(std::acos(-1.0L)) +
           (a / 2.0L - nu / 2.0L - 1.5L) * ld_gt - (a / 2.0L - nu / 2.0L - 1.0L) * ld_ge;
}

long double oracle_norm_const(const DagWishartParams& params, const Dag& dag) {
    long double s = 0.0L;
    for (int i = 0; i < dag.dim(); ++i) s += oracle_node_score(i, params, dag);
    return s;
}

// Gaussian log likelihood of zero-mean data with precision L diag(D)^{-1} L^T.
double gaussian_loglik(const Matrix& Y, const CholeskyParam& theta) {
    const int n = Y.rows(), p = Y.cols();
    SymMatrix omega = compose_precision(theta.L, theta.D);
    double quad = 0.0;
    for (int r = 0; r < n; ++r)
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) quad += Y(r, i) * omega(i, j) * Y(r, j);
    double ld = 0.0;
    for (double d : theta.D) ld -= std::log(d);  // log|omega| = -sum log D_ii
    return -0.5 * n * p * std::log(2.0 * std::acos(-1.0)) + 0.5 * n * ld - 0.5 * quad;
}

DagWishartParams random_params(const Dag& dag, Rng& rng) {
    DagWishartParams p{random_spd(dag.dim(), rng),
                       std::vector<double>(static_cast<std::size_t>(dag.dim()))};
    for (int i = 0; i < dag.dim(); ++i)
        p.alpha[static_cast<std::size_t>(i)] = dag.nu(i) + 2.5 + 8.0 * rng.uniform01();
    return p;
}

}  // namespace

TEST_CASE("log_node_score: univariate example equals log 4") {
    DagWishartParams p{SymMatrix::identity(1), {6.0}};
    Dag d(1);
    CHECK(log_node_score(0, p, d) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    CHECK(log_norm_const(p, d) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("log_node_score: propriety boundary") {
    Dag d(1);
    CHECK_NOTHROW(log_node_score(0, DagWishartParams{SymMatrix::identity(1), {4.0}}, d));
    CHECK_THROWS_AS(log_node_score(0, DagWishartParams{SymMatrix::identity(1), {2.0}}, d),
                    ImproperPrior);
}

TEST_CASE("log_node_score: p=2 worked example") {
    DagWishartParams p{SymMatrix::identity(2), {11.0, 10.0}};
    Dag d(2, {{1}, {}});
    double expect = std::lgamma(4.0) + 4.5 * std::log(2.0) + 0.5 * std::log(std::acos(-1.0));
    CHECK(log_node_score(0, p, d) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("log_norm_const: matches the independent oracle on random inputs") {
    Rng rng(2024);
    for (int t = 0; t < 60; ++t) {
        int p = 1 + static_cast<int>(rng.below(6));
        Dag d = random_dag(p, 0.5, rng);
        DagWishartParams params = random_params(d, rng);
        double got = log_norm_const(params, d);
        double want = static_cast<double>(oracle_norm_const(params, d));
        CHECK(got == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("log_norm_const: decomposes as the node-score sum, p <= 20") {
    Rng rng(7);
    for (int t = 0; t < 20; ++t) {
        int p = 1 + static_cast<int>(rng.below(20));
        Dag d = random_dag(p, 0.3, rng);
        DagWishartParams params = random_params(d, rng);
        double sum = 0.0;
        for (int i = 0; i < p; ++i) sum += log_node_score(i, params, d);
        CHECK(log_norm_const(params, d) == doctest::Approx(sum).epsilon(1e-10));
    }
}

TEST_CASE("log_prior_density: univariate example") {
    DagWishartParams p{SymMatrix::identity(1), {6.0}};
    Dag d(1);
    CholeskyParam theta{Matrix::identity(1), {1.0}};
    CHECK(log_prior_density(theta, p, d) ==
          doctest::Approx(-0.5 - std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("log_prior_density: support violation throws") {
    DagWishartParams p{SymMatrix::identity(2), {11.0, 10.0}};
    Dag empty(2);
    Matrix L = Matrix::identity(2);
    L(1, 0) = 0.4;
    CHECK_THROWS_AS(log_prior_density(CholeskyParam{L, {1.0, 1.0}}, p, empty),
                    SupportViolation);
}

TEST_CASE("log_prior_density: integrates to one (importance-sampling check)") {
    // p=2 full DAG: free coordinates are D_11, D_22, L_21. Proposal: D_ii
    // inverse-gamma-like via 1/Gamma draws and L_21 normal, with shapes
    // deliberately offset from the target so the weights are non-degenerate.
    Dag d(2, {{1}, {}});
    SymMatrix u(2);
    u.set(0, 0, 1.3);
    u.set(1, 1, 0.8);
    u.set(1, 0, 0.2);
    DagWishartParams params{u, {12.0, 9.0}};
    Rng rng(555);
    const int N = 200000;
    double sum_w = 0.0;
    // Proposal densities: D_ii ~ InvGamma(a_i, b_i), L_21 ~ N(mu, s^2).
    const double a1 = 4.0, b1 = 0.9, a2 = 3.0, b2 = 0.6, mu = -0.1, s = 0.45;
    auto gamma_draw = [&](double shape) {
        // Marsaglia-Tsang for shape >= 1.
        double dd = shape - 1.0 / 3.0, c = 1.0 / std::sqrt(9.0 * dd);
        for (;;) {
            double x = rng.normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            double uu = rng.uniform01();
            if (std::log(uu) < 0.5 * x * x + dd - dd * v + dd * std::log(v)) return dd * v;
        }
    };
    for (int t = 0; t < N; ++t) {
        double d1 = b1 / gamma_draw(a1);
        double d2 = b2 / gamma_draw(a2);
        double l21 = mu + s * rng.normal();
        Matrix L = Matrix::identity(2);
        L(1, 0) = l21;
        double logq = a1 * std::log(b1) - std::lgamma(a1) - (a1 + 1.0) * std::log(d1) - b1 / d1;
        logq += a2 * std::log(b2) - std::lgamma(a2) - (a2 + 1.0) * std::log(d2) - b2 / d2;
        double z = (l21 - mu) / s;
        logq += -0.5 * z * z - std::log(s) - 0.5 * std::log(2.0 * std::acos(-1.0));
        double logp = log_prior_density(CholeskyParam{L, {d1, d2}}, params, d);
        sum_w += std::exp(logp - logq);
    }
    CHECK(sum_w / N == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("posterior_params: worked example and additivity") {
    SymMatrix s(2);
    s.set(0, 0, 1.0);
    s.set(1, 1, 1.0);
    s.set(1, 0, 0.5);
    DagWishartParams prior{SymMatrix::identity(2), {11.0, 10.0}};
    DagWishartParams post = posterior_params(prior, s, 4);
    CHECK(post.U(0, 0) == doctest::Approx(5.0));
    CHECK(post.U(1, 0) == doctest::Approx(2.0));
    CHECK(post.U(1, 1) == doctest::Approx(5.0));
    CHECK(post.alpha[0] == doctest::Approx(15.0));
    CHECK(post.alpha[1] == doctest::Approx(14.0));

    // n=1 with S=0 only shifts alpha.
    DagWishartParams shifted = posterior_params(prior, SymMatrix(2), 1);
    CHECK(shifted.U == prior.U);
    CHECK(shifted.alpha[0] == doctest::Approx(12.0));
    CHECK_THROWS_AS(posterior_params(prior, s, 0), InvalidSpec);

    // Two updates equal one pooled update.
    Rng rng(9);
    SymMatrix s2 = random_spd(2, rng);
    DagWishartParams two = posterior_params(posterior_params(prior, s, 4), s2, 6);
    SymMatrix pooled(2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j <= i; ++j) pooled.set(i, j, (4.0 * s(i, j) + 6.0 * s2(i, j)) / 10.0);
    DagWishartParams one = posterior_params(prior, pooled, 10);
    CHECK(max_abs_diff(two.U, one.U) <= 1e-12);
    CHECK(two.alpha[0] == doctest::Approx(one.alpha[0]));
}

TEST_CASE("conjugacy: prior x likelihood matches posterior up to a constant") {
    Rng rng(321);
    for (int trial = 0; trial < 4; ++trial) {
        int p = 2 + static_cast<int>(rng.below(3));
        Dag d = random_dag(p, 0.5, rng);
        DagWishartParams prior = random_params(d, rng);
        const int n = 50;
        Matrix Y(n, p);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < p; ++c) Y(r, c) = rng.normal();
        SymMatrix S = sample_covariance(Y);
        DagWishartParams post = posterior_params(prior, S, n);

        std::vector<double> consts;
        for (int t = 0; t < 20; ++t) {
            Matrix L = Matrix::identity(p);
            for (int i = 0; i < p; ++i)
                for (int j : d.parents(i)) L(j, i) = 0.5 * rng.normal();
            std::vector<double> D(static_cast<std::size_t>(p));
            for (double& v : D) v = 0.3 + rng.uniform01();
            CholeskyParam theta{L, D};
            double c = log_prior_density(theta, post, d) -
                       log_prior_density(theta, prior, d) - gaussian_loglik(Y, theta);
            consts.push_back(c);
        }
        double mean = 0.0;
        for (double c : consts) mean += c;
        mean /= static_cast<double>(consts.size());
        double var = 0.0;
        for (double c : consts) var += (c - mean) * (c - mean);
        var /= static_cast<double>(consts.size());
        CHECK(var <= 1e-8);
    }
}

TEST_CASE("map_estimate: worked example") {
    SymMatrix s(2);
    s.set(0, 0, 1.0);
    s.set(1, 1, 1.0);
    s.set(1, 0, 0.5);
    Dag d(2, {{1}, {}});
    DagWishartParams prior{SymMatrix::identity(2), {11.0, 10.0}};
    DagWishartParams post = posterior_params(prior, s, 4);
    CholeskyParam f = map_estimate(post, prior.alpha, d, 4);
    CHECK(f.L(1, 0) == doctest::Approx(-0.4).epsilon(1e-12));
    CHECK(f.D[0] == doctest::Approx(0.28).epsilon(1e-12));
    CHECK(f.D[1] == doctest::Approx(5.0 / 14.0).epsilon(1e-12));
}

TEST_CASE("map_estimate: empty DAG closed form") {
    const int p = 3, n0 = 25;
    Dag d(p);
    DagWishartParams prior{SymMatrix::identity(p), {10.0, 10.0, 10.0}};
    DagWishartParams post = posterior_params(prior, SymMatrix::identity(p), n0);
    CholeskyParam f = map_estimate(post, prior.alpha, d, n0);
    CHECK(f.L == Matrix::identity(p));
    for (double v : f.D)
        CHECK(v == doctest::Approx((1.0 + n0) / (10.0 + n0)).epsilon(1e-12));
}

TEST_CASE("map_estimate: full DAG approaches mcd(S) for huge n") {
    Rng rng(12);
    const int p = 4, n = 100000;
    SymMatrix S = random_spd(p, rng);
    Dag d = Dag::full(p);
    PriorTemplate tpl;
    DagWishartParams prior = tpl.build(d, SymMatrix::identity(p));
    CholeskyParam f = map_estimate(posterior_params(prior, S, n), prior.alpha, d, n);
    CholeskyParam m = mcd(spd_inverse(S));
    CHECK(max_abs_diff(f.L, m.L) <= 1e-2);
    for (int i = 0; i < p; ++i)
        CHECK(std::fabs(f.D[static_cast<std::size_t>(i)] - m.D[static_cast<std::size_t>(i)]) <=
              1e-2);
}

TEST_CASE("map_estimate: output is the mode of the posterior density") {
    Rng rng(888);
    int passed = 0, total = 0;
    for (int trial = 0; trial < 10; ++trial) {
        int p = 2 + static_cast<int>(rng.below(4));
        Dag d = random_dag(p, 0.5, rng);
        const int n = 40;
        Matrix Y(n, p);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < p; ++c) Y(r, c) = rng.normal();
        SymMatrix S = sample_covariance(Y);
        PriorTemplate tpl;
        DagWishartParams prior = tpl.build(d, SymMatrix::identity(p));
        DagWishartParams post = posterior_params(prior, S, n);
        CholeskyParam f = map_estimate(post, prior.alpha, d, n);
        double base = log_prior_density(f, post, d);
        bool ok = true;
        auto try_perturbed = [&](CholeskyParam g) {
            double v = log_prior_density(g, post, d);
            if (v >= base) ok = false;
        };
        for (int i = 0; i < p && ok; ++i) {
            for (int j : d.parents(i)) {
                for (double eps : {1e-4, -1e-4}) {
                    CholeskyParam g = f;
                    g.L(j, i) += eps;
                    try_perturbed(g);
                }
            }
            for (double eps : {1e-4, -1e-4}) {
                CholeskyParam g = f;
                g.D[static_cast<std::size_t>(i)] += eps;
                try_perturbed(g);
            }
        }
        ++total;
        if (ok) ++passed;
    }
    CHECK(passed == total);
}

TEST_CASE("mle_estimate: worked examples") {
    SymMatrix s(2);
    s.set(0, 0, 1.0);
    s.set(1, 1, 1.0);
    s.set(1, 0, 0.4);
    CholeskyParam f = mle_estimate(s, Dag(2, {{1}, {}}));
    CHECK(f.L(1, 0) == doctest::Approx(-0.4));
    CHECK(f.D[0] == doctest::Approx(0.84));
    CHECK(f.D[1] == doctest::Approx(1.0));

    Rng rng(3);
    SymMatrix S = random_spd(4, rng);
    CholeskyParam e = mle_estimate(S, Dag(4));
    CHECK(e.L == Matrix::identity(4));
    for (int i = 0; i < 4; ++i) CHECK(e.D[static_cast<std::size_t>(i)] == S(i, i));

    CholeskyParam full = mle_estimate(S, Dag::full(4));
    CholeskyParam m = mcd(spd_inverse(S));
    CHECK(max_abs_diff(full.L, m.L) <= 1e-10);
    for (int i = 0; i < 4; ++i)
        CHECK(full.D[static_cast<std::size_t>(i)] ==
              doctest::Approx(m.D[static_cast<std::size_t>(i)]).epsilon(1e-10));
}

TEST_CASE("log_dag_posterior: n=0 gives 0; p=3 matches brute-force oracle") {
    Rng rng(456);
    SymMatrix S = random_spd(3, rng);
    PriorTemplate tpl;
    for (const Dag& d : all_dags(3)) {
        DagWishartParams prior = tpl.build(d, SymMatrix::identity(3));
        CHECK(log_dag_posterior(d, prior, S, 0) == doctest::Approx(0.0).epsilon(1e-14));
        double got = log_dag_posterior(d, prior, S, 20);
        SymMatrix upost(3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j <= i; ++j)
                upost.set(i, j, prior.U(i, j) + 20.0 * S(i, j));
        DagWishartParams post{upost, prior.alpha};
        for (double& a : post.alpha) a += 20.0;
        double want =
            static_cast<double>(oracle_norm_const(post, d) - oracle_norm_const(prior, d));
        CHECK(got == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("log_dag_posterior: p=2 exp-normalized probabilities sum to 1") {
    Rng rng(77);
    SymMatrix S = random_spd(2, rng);
    PriorTemplate tpl;
    std::vector<double> scores;
    for (const Dag& d : all_dags(2))
        scores.push_back(log_dag_posterior(d, tpl.build(d, SymMatrix::identity(2)), S, 15));
    double m = std::max(scores[0], scores[1]);
    double z = std::exp(scores[0] - m) + std::exp(scores[1] - m);
    double p0 = std::exp(scores[0] - m) / z, p1 = std::exp(scores[1] - m) / z;
    CHECK(p0 + p1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p0 > 0.0);
    CHECK(p1 > 0.0);
}

TEST_CASE("node-score locality: neighbor DAGs differ by one node term") {
    Rng rng(31);
    const int p = 5;
    SymMatrix S = random_spd(p, rng);
    PriorTemplate tpl;
    for (int t = 0; t < 20; ++t) {
        Dag d = random_dag(p, 0.4, rng);
        int j = static_cast<int>(rng.below(p - 1));
        int i = j + 1 + static_cast<int>(rng.below(p - j - 1));
        Dag e = d.toggle_edge(i, j);
        double full_diff = log_dag_posterior(e, tpl.build(e, SymMatrix::identity(p)), S, 30) -
                           log_dag_posterior(d, tpl.build(d, SymMatrix::identity(p)), S, 30);
        DagScorer scorer(S, 30, tpl);
        double node_diff = scorer.node_score(j, e.parents(j)) - scorer.node_score(j, d.parents(j));
        CHECK(full_diff == doctest::Approx(node_diff).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("DagScorer: score equals log_dag_posterior under the template prior") {
    Rng rng(64);
    const int p = 6;
    SymMatrix S = random_spd(p, rng);
    PriorTemplate tpl;
    DagScorer scorer(S, 25, tpl);
    for (int t = 0; t < 25; ++t) {
        Dag d = random_dag(p, 0.4, rng);
        double want = log_dag_posterior(d, tpl.build(d, SymMatrix::identity(p)), S, 25);
        CHECK(scorer.score(d) == doctest::Approx(want).epsilon(1e-10).scale(1.0));
        CHECK(scorer.score(d) == doctest::Approx(scorer.score(d)).epsilon(1e-15));  // cached
    }
}
