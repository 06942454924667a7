#include "dagwish/ensemble.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dagwish/dagwishart.hpp"
#include "dagwish/linalg.hpp"

namespace dagwish {

Permutation identity_permutation(int p) {
    Permutation sigma(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) sigma[static_cast<std::size_t>(i)] = i;
    return sigma;
}

Matrix apply_permutation(const Matrix& Y, const Permutation& sigma) {
    if (static_cast<int>(sigma.size()) != Y.cols())
        throw DimensionMismatch("apply_permutation: sigma length != column count");
    Matrix out(Y.rows(), Y.cols());
    for (int r = 0; r < Y.rows(); ++r)
        for (int j = 0; j < Y.cols(); ++j) out(r, j) = Y(r, sigma[static_cast<std::size_t>(j)]);
    return out;
}

std::pair<Matrix, std::vector<double>> unpermute_factors(const CholeskyParam& theta,
                                                         const Permutation& sigma) {
    const int p = theta.L.rows();
    if (static_cast<int>(sigma.size()) != p || static_cast<int>(theta.D.size()) != p)
        throw DimensionMismatch("unpermute_factors: dimension mismatch");
    Matrix L(p, p);
    std::vector<double> D(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) {
        D[static_cast<std::size_t>(sigma[static_cast<std::size_t>(i)])] =
            theta.D[static_cast<std::size_t>(i)];
        for (int j = 0; j < p; ++j)
            L(sigma[static_cast<std::size_t>(i)], sigma[static_cast<std::size_t>(j)]) =
                theta.L(i, j);
    }
    return {std::move(L), std::move(D)};
}

Averaged ensemble_average(const std::vector<std::pair<Matrix, std::vector<double>>>& factors) {
    if (factors.empty()) throw EmptyEnsemble("ensemble_average: no factors");
    const int p = factors.front().first.rows();
    Matrix L_bar(p, p);
    std::vector<double> D_bar(static_cast<std::size_t>(p), 0.0);
    for (const auto& [L, D] : factors) {
        if (L.rows() != p || L.cols() != p || static_cast<int>(D.size()) != p)
            throw DimensionMismatch("ensemble_average: inconsistent factor shapes");
        for (int i = 0; i < p; ++i) {
            D_bar[static_cast<std::size_t>(i)] += D[static_cast<std::size_t>(i)];
            for (int j = 0; j < p; ++j) L_bar(i, j) += L(i, j);
        }
    }
    const double inv_k = 1.0 / static_cast<double>(factors.size());
    for (int i = 0; i < p; ++i) {
        D_bar[static_cast<std::size_t>(i)] *= inv_k;
        for (int j = 0; j < p; ++j) L_bar(i, j) *= inv_k;
    }
    SymMatrix omega = compose_precision(L_bar, D_bar);
    return Averaged{std::move(L_bar), std::move(D_bar), std::move(omega)};
}

namespace {

Matrix threshold_factor(const Matrix& L, double tau) {
    Matrix out = L;
    for (int i = 0; i < L.rows(); ++i)
        for (int j = 0; j < L.cols(); ++j)
            if (i != j && std::fabs(out(i, j)) <= tau) out(i, j) = 0.0;
    return out;
}

int nonzero_count(const Matrix& L) {
    int e = 0;
    for (int i = 0; i < L.rows(); ++i)
        for (int j = 0; j < L.cols(); ++j)
            if (L(i, j) != 0.0) ++e;
    return e;
}

}  // namespace

ThresholdResult bic_threshold_select(const Matrix& L_bar, const std::vector<double>& D_bar,
                                     const SymMatrix& S, int n, int grid_size) {
    if (n < 2) throw InvalidSpec("bic_threshold_select: need n >= 2");
    if (grid_size < 1) throw InvalidSpec("bic_threshold_select: need grid_size >= 1");
    const int p = L_bar.rows();

    double max_off = 0.0;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            if (i != j) max_off = std::max(max_off, std::fabs(L_bar(i, j)));

    bool found = false;
    double best_bic = 0.0;
    ThresholdResult best;
    for (int k = 0; k < grid_size; ++k) {
        double tau = (grid_size == 1) ? 0.0 : max_off * k / (grid_size - 1);
        Matrix L_tau = threshold_factor(L_bar, tau);
        SymMatrix omega_tau = compose_precision(L_tau, D_bar);
        double ld;
        try {
            ld = logdet(omega_tau);
        } catch (const NotPositiveDefinite&) {
            continue;  // thresholding can destroy invertibility; skip the grid point
        }
        double tr = 0.0;
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) tr += S(i, j) * omega_tau(j, i);
        double bic = n * tr - n * ld + std::log(static_cast<double>(n)) * nonzero_count(L_tau);
        // <= sends ties to the larger (sparser) tau.
        if (!found || bic <= best_bic) {
            found = true;
            best_bic = bic;
            best = ThresholdResult{tau, std::move(L_tau), std::move(omega_tau)};
        }
    }
    if (!found) throw NoValidThreshold("bic_threshold_select: no grid point gave a PD estimate");
    return best;
}

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::DagwBic: return "dagw-bic";
        case Variant::Dagw: return "dagw";
        case Variant::Mle: return "mle";
        case Variant::Bayes: return "bayes";
    }
    return "?";
}

Variant variant_from_name(const std::string& name) {
    if (name == "dagw-bic") return Variant::DagwBic;
    if (name == "dagw") return Variant::Dagw;
    if (name == "mle") return Variant::Mle;
    if (name == "bayes") return Variant::Bayes;
    throw ParseError("unknown variant: " + name);
}

PermFactors run_permutation_pipeline(const Matrix& Y, Permutation sigma,
                                     const SelectionConfig& cfg, const PriorTemplate& prior,
                                     Rng rng) {
    const int n = Y.rows();
    const Matrix Y_sigma = apply_permutation(Y, sigma);
    Dag dag = select_dag(Y_sigma, prior, cfg, rng);
    const SymMatrix S_sigma = sample_covariance(Y_sigma);

    DagWishartParams pri = prior.build(dag, SymMatrix::identity(Y.cols()));
    DagWishartParams post = posterior_params(pri, S_sigma, n);
    CholeskyParam map = map_estimate(post, pri.alpha, dag, n);
    CholeskyParam mle = mle_estimate(S_sigma, dag, 0.0);

    PermFactors out;
    out.map_factors = unpermute_factors(map, sigma);
    out.mle_factors = unpermute_factors(mle, sigma);
    out.dag = std::move(dag);
    out.sigma = std::move(sigma);
    return out;
}

std::vector<PermFactors> run_perm_pipelines(const Matrix& Y, int K, const SelectionConfig& cfg,
                                            const PriorTemplate& prior, std::uint64_t seed,
                                            int workers) {
    if (K < 1) throw EmptyEnsemble("run_perm_pipelines: K must be >= 1");
    const int p = Y.cols();
    Rng master(seed);
    std::vector<Permutation> sigmas;
    sigmas.reserve(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) sigmas.push_back(master.permutation(p));

    std::vector<PermFactors> out(static_cast<std::size_t>(K));
    if (workers <= 1) {
        // Serial reference path; the parallel kernel below must match it
        // byte-for-byte.
        for (int k = 0; k < K; ++k)
            out[static_cast<std::size_t>(k)] = run_permutation_pipeline(
                Y, sigmas[static_cast<std::size_t>(k)], cfg, prior,
                Rng::stream(seed, static_cast<std::uint64_t>(k) + 1));
    } else {
#pragma omp parallel for schedule(dynamic) num_threads(workers)
        for (int k = 0; k < K; ++k)
            out[static_cast<std::size_t>(k)] = run_permutation_pipeline(
                Y, sigmas[static_cast<std::size_t>(k)], cfg, prior,
                Rng::stream(seed, static_cast<std::uint64_t>(k) + 1));
    }
    return out;
}

EnsembleEstimate estimate(const Matrix& Y, int K, const SelectionConfig& cfg,
                          const PriorTemplate& prior, Variant variant, std::uint64_t seed,
                          int grid_size, int workers) {
    if (Y.rows() < 2) throw DimensionMismatch("estimate: need n >= 2");
    const int n = Y.rows();

    std::vector<PermFactors> perms;
    if (variant == Variant::Bayes) {
        // Single run on the original ordering.
        perms.push_back(run_permutation_pipeline(Y, identity_permutation(Y.cols()), cfg, prior,
                                         Rng::stream(seed, 1)));
    } else {
        perms = run_perm_pipelines(Y, K, cfg, prior, seed, workers);
    }

    std::vector<std::pair<Matrix, std::vector<double>>> factors;
    factors.reserve(perms.size());
    for (const PermFactors& pf : perms)
        factors.push_back(variant == Variant::Mle ? pf.mle_factors : pf.map_factors);

    Averaged avg = ensemble_average(factors);
    EnsembleEstimate est;
    est.L_bar = std::move(avg.L_bar);
    est.D_bar = std::move(avg.D_bar);
    est.omega_check = std::move(avg.omega_check);
    for (PermFactors& pf : perms) {
        est.per_perm_dags.push_back(std::move(pf.dag));
        est.sigmas.push_back(std::move(pf.sigma));
    }

    if (variant == Variant::DagwBic) {
        ThresholdResult thr =
            bic_threshold_select(est.L_bar, est.D_bar, sample_covariance(Y), n, grid_size);
        est.tau_b = thr.tau_b;
        est.L_bar_tau = std::move(thr.L_bar_tau);
        est.omega_check_tau = std::move(thr.omega_check_tau);
    } else {
        est.tau_b = 0.0;
        est.L_bar_tau = est.L_bar;
        est.omega_check_tau = est.omega_check;
    }
    return est;
}

}  // namespace dagwish
