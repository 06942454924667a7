#include "dagwish/simbench.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dagwish/dagwishart.hpp"
#include "dagwish/io.hpp"
#include "dagwish/linalg.hpp"

namespace dagwish {

std::string case_name(Case c) {
    switch (c) {
        case Case::Banded: return "banded";
        case Case::AR: return "ar";
        case Case::Sparse3pct: return "sparse3pct";
        case Case::Compound: return "compound";
        case Case::PermutedCompound: return "permuted-compound";
    }
    return "?";
}

Case case_from_name(const std::string& name) {
    if (name == "banded") return Case::Banded;
    if (name == "ar") return Case::AR;
    if (name == "sparse3pct") return Case::Sparse3pct;
    if (name == "compound") return Case::Compound;
    if (name == "permuted-compound") return Case::PermutedCompound;
    throw ParseError("unknown case: " + name);
}

namespace {

SymMatrix banded_omega(int p) {
    SymMatrix omega(p);
    for (int i = 0; i < p; ++i) {
        omega.set(i, i, 1.0);
        if (i + 1 < p) omega.set(i + 1, i, 0.5);
        if (i + 2 < p) omega.set(i + 2, i, 0.3);
    }
    return omega;
}

// Closed-form inverse of the AR(rho) correlation matrix: tridiagonal, so the
// true support is exact (inverting numerically would leave off-band dust).
SymMatrix ar_omega(int p, double rho) {
    const double c = 1.0 / (1.0 - rho * rho);
    SymMatrix omega(p);
    for (int i = 0; i < p; ++i) {
        bool interior = (i > 0 && i + 1 < p);
        omega.set(i, i, (interior ? (1.0 + rho * rho) : 1.0) * c);
        if (i + 1 < p) omega.set(i + 1, i, -rho * c);
    }
    if (p == 1) omega.set(0, 0, 1.0);
    return omega;
}

SymMatrix compound_omega(int p) {
    SymMatrix omega = SymMatrix::identity(p);
    const int b = 10;
    for (int i = 0; i < b; ++i)
        for (int j = 0; j < i; ++j) omega.set(i, j, 0.5);
    return omega;
}

SymMatrix sparse_omega(int p, Rng& rng) {
    const int total = p * (p - 1) / 2;
    const int count = static_cast<int>(std::lround(0.03 * total));
    for (int attempt = 0; attempt < 100; ++attempt) {
        Matrix L0 = Matrix::identity(p);
        // Draw `count` distinct lower-triangular positions.
        std::vector<int> positions(static_cast<std::size_t>(total));
        for (int k = 0; k < total; ++k) positions[static_cast<std::size_t>(k)] = k;
        for (int k = 0; k < count; ++k) {
            int j = k + rng.below(total - k);
            std::swap(positions[static_cast<std::size_t>(k)], positions[static_cast<std::size_t>(j)]);
        }
        for (int k = 0; k < count; ++k) {
            int pos = positions[static_cast<std::size_t>(k)];
            // Map linear index to the (i > j) pair enumerated row by row.
            int i = 1;
            while (pos >= i) pos -= i, ++i;
            L0(i, pos) = rng.uniform01();
        }
        SymMatrix omega(p);
        for (int i = 0; i < p; ++i)
            for (int j = 0; j <= i; ++j) {
                double s = 0.0;
                for (int k = 0; k <= j; ++k) s += L0(i, k) * L0(j, k);
                omega.set(i, j, s);
            }
        try {
            mcd(omega, 1e-8);  // conditioning gate; redraw on failure
            return omega;
        } catch (const NotPositiveDefinite&) {
        }
    }
    throw InvalidSpec("sparse_omega: could not draw a well-conditioned truth");
}

}  // namespace

std::pair<SymMatrix, Dag> make_omega(const ScenarioSpec& spec, Rng& rng) {
    const int p = spec.p;
    SymMatrix omega(0);
    switch (spec.scenario) {
        case Case::Banded:
            if (p < 3) throw InvalidSpec("banded case needs p >= 3");
            omega = banded_omega(p);
            break;
        case Case::AR:
            if (p < 1) throw InvalidSpec("ar case needs p >= 1");
            omega = ar_omega(p, 0.5);
            break;
        case Case::Sparse3pct:
            if (p < 2) throw InvalidSpec("sparse case needs p >= 2");
            omega = sparse_omega(p, rng);
            break;
        case Case::Compound:
            if (p < 10) throw InvalidSpec("compound case needs p >= 10");
            omega = compound_omega(p);
            break;
        case Case::PermutedCompound: {
            if (p < 10) throw InvalidSpec("permuted compound case needs p >= 10");
            SymMatrix base = compound_omega(p);
            std::vector<int> rho = rng.permutation(p);
            omega = SymMatrix(p);
            for (int i = 0; i < p; ++i)
                for (int j = 0; j <= i; ++j)
                    omega.set(rho[static_cast<std::size_t>(i)], rho[static_cast<std::size_t>(j)],
                              base(i, j));
            break;
        }
    }
    Dag dag0 = from_cholesky_support(mcd(omega).L, 0.0);
    return {std::move(omega), std::move(dag0)};
}

Matrix sample_gaussian(const SymMatrix& Omega0, int n, Rng& rng) {
    const int p = Omega0.dim();
    const SymMatrix sigma = spd_inverse(Omega0);
    const CholeskyParam chol = mcd(sigma);
    std::vector<double> root_piv(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i)
        root_piv[static_cast<std::size_t>(i)] = 1.0 / std::sqrt(chol.D[static_cast<std::size_t>(i)]);

    Matrix Y(n, p);
    std::vector<double> z(static_cast<std::size_t>(p));
    for (int r = 0; r < n; ++r) {
        for (int k = 0; k < p; ++k) z[static_cast<std::size_t>(k)] = rng.normal();
        for (int i = 0; i < p; ++i) {
            double s = 0.0;
            for (int k = 0; k <= i; ++k)
                s += chol.L(i, k) * root_piv[static_cast<std::size_t>(k)] * z[static_cast<std::size_t>(k)];
            Y(r, i) = s;
        }
    }
    return Y;
}

double LossReport::by_index(int k) const {
    switch (k) {
        case 1: return l1;
        case 2: return l2;
        case 3: return l3;
        case 4: return l4;
        case 5: return l5;
    }
    throw IndexOutOfRange("LossReport: loss index");
}

LossReport losses(const SymMatrix& est, const SymMatrix& Omega0, const Dag& dag0) {
    const int p = Omega0.dim();
    if (est.dim() != p || dag0.dim() != p) throw DimensionMismatch("losses: dimension mismatch");
    LossReport out;
    const SymMatrix sigma0 = spd_inverse(Omega0);
    double tr = 0.0;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) tr += est(i, j) * sigma0(j, i);
    out.l1 = tr - (logdet(est) - logdet(Omega0)) - p;
    for (int i = 0; i < p; ++i)
        for (int j : dag0.parents(i)) {
            double d = Omega0(j, i) - est(j, i);
            out.l2 += std::fabs(d);
            out.l3 += d * d;
        }
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            double d = Omega0(j, i) - est(j, i);
            out.l4 += std::fabs(d);
            out.l5 += d * d;
        }
    return out;
}

RepEstimates run_rep(const ScenarioSpec& spec, const std::vector<Variant>& methods,
                     const SelectionConfig& cfg, int K, int grid_size, int rep_index,
                     int workers) {
    Rng rng = Rng::stream(spec.seed, static_cast<std::uint64_t>(rep_index) + 1);
    auto [omega0, dag0] = make_omega(spec, rng);
    const Matrix Y = sample_gaussian(omega0, spec.n, rng);
    const std::uint64_t est_seed = rng.next();
    const PriorTemplate prior;
    const int n = spec.n;

    bool need_ensemble = false;
    for (Variant v : methods)
        if (v != Variant::Bayes) need_ensemble = true;

    // DagwBic, Dagw and Mle share one round of per-permutation DAG selection.
    Averaged map_avg, mle_avg;
    if (need_ensemble) {
        std::vector<PermFactors> perms = run_perm_pipelines(Y, K, cfg, prior, est_seed, workers);
        std::vector<std::pair<Matrix, std::vector<double>>> map_f, mle_f;
        for (PermFactors& pf : perms) {
            map_f.push_back(std::move(pf.map_factors));
            mle_f.push_back(std::move(pf.mle_factors));
        }
        map_avg = ensemble_average(map_f);
        mle_avg = ensemble_average(mle_f);
    }

    RepEstimates out;
    for (Variant v : methods) {
        switch (v) {
            case Variant::DagwBic: {
                ThresholdResult thr = bic_threshold_select(map_avg.L_bar, map_avg.D_bar,
                                                           sample_covariance(Y), n, grid_size);
                out.estimates.emplace_back(v, std::move(thr.omega_check_tau));
                break;
            }
            case Variant::Dagw:
                out.estimates.emplace_back(v, map_avg.omega_check);
                break;
            case Variant::Mle:
                out.estimates.emplace_back(v, mle_avg.omega_check);
                break;
            case Variant::Bayes: {
                EnsembleEstimate est =
                    estimate(Y, 1, cfg, prior, Variant::Bayes, est_seed, grid_size, 1);
                out.estimates.emplace_back(v, std::move(est.omega_check));
                break;
            }
        }
    }
    out.omega0 = std::move(omega0);
    out.dag0 = std::move(dag0);
    return out;
}

std::vector<BenchRow> run_benchmark(const ScenarioSpec& spec, const std::vector<Variant>& methods,
                                    const SelectionConfig& cfg, int K, int grid_size,
                                    int workers) {
    if (spec.reps < 1) throw InvalidSpec("run_benchmark: reps must be >= 1");
    if (methods.empty()) throw InvalidSpec("run_benchmark: empty method list");

    // rep x method loss reports; per-rep rng streams keep the result
    // independent of scheduling.
    std::vector<std::vector<LossReport>> table(
        static_cast<std::size_t>(spec.reps),
        std::vector<LossReport>(methods.size()));

    auto one_rep = [&](int r) {
        RepEstimates reps = run_rep(spec, methods, cfg, K, grid_size, r, 1);
        for (std::size_t m = 0; m < methods.size(); ++m)
            table[static_cast<std::size_t>(r)][m] =
                losses(reps.estimates[m].second, reps.omega0, reps.dag0);
    };

    if (workers <= 1) {
        for (int r = 0; r < spec.reps; ++r) one_rep(r);
    } else {
#pragma omp parallel for schedule(dynamic) num_threads(workers)
        for (int r = 0; r < spec.reps; ++r) one_rep(r);
    }

    std::vector<BenchRow> rows;
    for (std::size_t m = 0; m < methods.size(); ++m) {
        for (int l = 1; l <= 5; ++l) {
            double mean = 0.0;
            for (int r = 0; r < spec.reps; ++r)
                mean += table[static_cast<std::size_t>(r)][m].by_index(l);
            mean /= spec.reps;
            double se = std::numeric_limits<double>::quiet_NaN();
            if (spec.reps > 1) {
                double ss = 0.0;
                for (int r = 0; r < spec.reps; ++r) {
                    double d = table[static_cast<std::size_t>(r)][m].by_index(l) - mean;
                    ss += d * d;
                }
                se = std::sqrt(ss / (spec.reps - 1)) / std::sqrt(static_cast<double>(spec.reps));
            }
            rows.push_back(BenchRow{case_name(spec.scenario), spec.p, spec.n,
                                    variant_name(methods[m]), "L" + std::to_string(l), mean, se,
                                    spec.reps, spec.seed});
        }
    }
    return rows;
}

std::string benchmark_csv(const std::vector<BenchRow>& rows, const std::string& config_echo) {
    std::ostringstream out;
    std::istringstream echo(config_echo);
    for (std::string line; std::getline(echo, line);) out << "# " << line << "\n";
    out << "case,p,n,method,loss,mean,se,reps,seed\n";
    for (const BenchRow& r : rows) {
        out << r.scenario << ',' << r.p << ',' << r.n << ',' << r.method << ',' << r.loss << ','
            << format_double(r.mean) << ',' << (std::isnan(r.se) ? "" : format_double(r.se))
            << ',' << r.reps << ',' << r.seed << "\n";
    }
    return out.str();
}

}  // namespace dagwish
