#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "kineme/errors.h"

namespace kineme {

/// Diagonal-covariance Gaussian mixture over NMF coefficient vectors.
struct GaussianMixture {
    int k = 0;
    Eigen::VectorXd weights;    // length k, simplex
    Eigen::MatrixXd means;      // dim x k
    Eigen::MatrixXd variances;  // dim x k, every entry >= floor
    std::vector<double> log_likelihood_trace;  // per EM iteration since last re-seed

    int dim() const { return static_cast<int>(means.rows()); }
};

enum class GmmInit {
    KMeansPlusPlus,  // default: seeded k-means++ over the input points
    GlobalDraw,      // means drawn around the global mean; permutation-invariant
};

struct GmmOptions {
    int max_iters = 300;
    double rel_tol = 1e-8;
    std::uint64_t seed = 0;
    GmmInit init = GmmInit::KMeansPlusPlus;
    double variance_floor = 1e-6;
};

/// EM fit of a k-component mixture to `points` (dim x n, one point per
/// column). Log-likelihood is non-decreasing across iterations; a component
/// that loses all responsibility mass is re-seeded from the farthest point
/// once, after which a recurrence raises DegenerateComponent.
GaussianMixture gmm_fit(const Eigen::MatrixXd& points, int k, const GmmOptions& opts = {});

/// Posterior responsibilities P(component | point), component weights as
/// priors. Computed in log space; entries sum to 1.
Eigen::VectorXd gmm_posterior(const GaussianMixture& model, const Eigen::VectorXd& point);

/// Component means as columns, in stable component order (dim x k).
Eigen::MatrixXd cluster_centroids(const GaussianMixture& model);

}  // namespace kineme
