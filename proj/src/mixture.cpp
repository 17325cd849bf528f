#include "kineme/mixture.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace kineme {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// Per-component log densities plus log weights; column per point.
Eigen::MatrixXd weighted_log_densities(const GaussianMixture& g, const Eigen::MatrixXd& x) {
    const Eigen::Index n = x.cols();
    const Eigen::Index d = x.rows();
    Eigen::MatrixXd out(g.k, n);
    for (int j = 0; j < g.k; ++j) {
        const auto mu = g.means.col(j);
        const auto var = g.variances.col(j);
        const double logdet = var.array().log().sum();
        const double base = std::log(g.weights(j)) - 0.5 * (d * kLog2Pi + logdet);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double quad = ((x.col(i) - mu).array().square() / var.array()).sum();
            out(j, i) = base - 0.5 * quad;
        }
    }
    return out;
}

// log-sum-exp per column; also normalizes `m` into responsibilities in place.
Eigen::VectorXd lse_normalize(Eigen::MatrixXd& m) {
    Eigen::VectorXd lse(m.cols());
    for (Eigen::Index i = 0; i < m.cols(); ++i) {
        const double hi = m.col(i).maxCoeff();
        const double s = (m.col(i).array() - hi).exp().sum();
        lse(i) = hi + std::log(s);
        m.col(i) = (m.col(i).array() - lse(i)).exp();
    }
    return lse;
}

Eigen::MatrixXd init_means(const Eigen::MatrixXd& x, int k, const GmmOptions& opts,
                           std::mt19937_64& rng) {
    const Eigen::Index n = x.cols();
    const Eigen::Index d = x.rows();
    Eigen::MatrixXd means(d, k);

    if (opts.init == GmmInit::GlobalDraw) {
        const Eigen::VectorXd mu = x.rowwise().mean();
        Eigen::VectorXd sd(d);
        for (Eigen::Index r = 0; r < d; ++r)
            sd(r) = std::sqrt((x.row(r).array() - mu(r)).square().mean());
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int j = 0; j < k; ++j)
            for (Eigen::Index r = 0; r < d; ++r) means(r, j) = mu(r) + sd(r) * gauss(rng);
        return means;
    }

    // k-means++: first center uniform, then distance-squared weighted draws.
    std::uniform_int_distribution<Eigen::Index> uni(0, n - 1);
    means.col(0) = x.col(uni(rng));
    Eigen::VectorXd d2 = (x.colwise() - means.col(0)).colwise().squaredNorm();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int j = 1; j < k; ++j) {
        const double total = d2.sum();
        Eigen::Index pick;
        if (total <= 0.0) {
            pick = uni(rng);
        } else {
            double u = unit(rng) * total;
            pick = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                u -= d2(i);
                if (u <= 0.0) {
                    pick = i;
                    break;
                }
            }
        }
        means.col(j) = x.col(pick);
        d2 = d2.cwiseMin((x.colwise() - means.col(j)).colwise().squaredNorm().transpose());
    }
    return means;
}

// Point farthest from every current mean, for re-seeding a dead component.
Eigen::Index farthest_point(const Eigen::MatrixXd& x, const Eigen::MatrixXd& means) {
    Eigen::Index best = 0;
    double best_d = -1.0;
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
        double nearest = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < means.cols(); ++j)
            nearest = std::min(nearest, (x.col(i) - means.col(j)).squaredNorm());
        if (nearest > best_d) {
            best_d = nearest;
            best = i;
        }
    }
    return best;
}

}  // namespace

GaussianMixture gmm_fit(const Eigen::MatrixXd& points, int k, const GmmOptions& opts) {
    const Eigen::Index n = points.cols();
    const Eigen::Index d = points.rows();
    if (k < 1) throw DataError("gmm component count must be >= 1");
    if (n < k)
        throw TooFewPoints("gmm needs at least " + std::to_string(k) + " points, got " +
                           std::to_string(n));

    std::mt19937_64 rng(opts.seed);
    GaussianMixture g;
    g.k = k;
    g.weights = Eigen::VectorXd::Constant(k, 1.0 / k);
    g.means = init_means(points, k, opts, rng);
    Eigen::VectorXd global_var(d);
    const Eigen::VectorXd mu = points.rowwise().mean();
    for (Eigen::Index r = 0; r < d; ++r)
        global_var(r) =
            std::max((points.row(r).array() - mu(r)).square().mean(), opts.variance_floor);
    g.variances = global_var.replicate(1, k);

    std::vector<bool> reseeded(k, false);
    double prev_ll = -std::numeric_limits<double>::infinity();
    for (int it = 0; it < opts.max_iters; ++it) {
        Eigen::MatrixXd resp = weighted_log_densities(g, points);
        const Eigen::VectorXd lse = lse_normalize(resp);
        const double ll = lse.sum();
        g.log_likelihood_trace.push_back(ll);

        // M step
        const Eigen::VectorXd mass = resp.rowwise().sum();
        bool collapsed = false;
        for (int j = 0; j < k; ++j) {
            if (mass(j) < 1e-10) {
                if (reseeded[j])
                    throw DegenerateComponent("gmm component " + std::to_string(j) +
                                              " collapsed twice");
                reseeded[j] = true;
                g.means.col(j) = points.col(farthest_point(points, g.means));
                g.variances.col(j) = global_var;
                g.weights(j) = 1.0 / k;
                g.weights /= g.weights.sum();
                collapsed = true;
            }
        }
        if (collapsed) {
            // Restart the trace: the re-seed breaks likelihood monotonicity.
            g.log_likelihood_trace.clear();
            prev_ll = -std::numeric_limits<double>::infinity();
            continue;
        }

        for (int j = 0; j < k; ++j) {
            const Eigen::VectorXd mean_j = (points * resp.row(j).transpose()) / mass(j);
            Eigen::VectorXd var_j = Eigen::VectorXd::Zero(d);
            for (Eigen::Index i = 0; i < n; ++i)
                var_j += resp(j, i) * (points.col(i) - mean_j).array().square().matrix();
            var_j = (var_j / mass(j)).cwiseMax(opts.variance_floor);
            g.means.col(j) = mean_j;
            g.variances.col(j) = var_j;
            g.weights(j) = mass(j) / n;
        }
        g.weights /= g.weights.sum();

        if (std::isfinite(prev_ll) &&
            std::abs(ll - prev_ll) < opts.rel_tol * std::abs(prev_ll))
            break;
        prev_ll = ll;
    }
    return g;
}

Eigen::VectorXd gmm_posterior(const GaussianMixture& model, const Eigen::VectorXd& point) {
    if (point.size() != model.dim())
        throw DimensionMismatch("point dimension " + std::to_string(point.size()) +
                                " does not match mixture dimension " +
                                std::to_string(model.dim()));
    Eigen::MatrixXd resp = weighted_log_densities(model, point);
    lse_normalize(resp);
    return resp.col(0);
}

Eigen::MatrixXd cluster_centroids(const GaussianMixture& model) { return model.means; }

}  // namespace kineme
