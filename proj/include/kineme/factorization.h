#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "kineme/errors.h"

namespace kineme {

/// Result of a non-negative factorization H ~ B * C.
struct FactorPair {
    Eigen::MatrixXd basis;         // 3*ell x r, entrywise >= 0
    Eigen::MatrixXd coefficients;  // r x n, entrywise >= 0
    int rank = 0;
    double final_objective = 0.0;         // ||H - B*C||_F at exit
    std::vector<double> objective_trace;  // one value per completed iteration
};

/// Multiplicative-update NMF for the Frobenius objective. The objective is
/// non-increasing across iterations; iteration stops at `max_iters` or when
/// the relative objective decrease drops below `rel_tol`. Deterministic for a
/// fixed seed.
FactorPair nmf_fit(const Eigen::MatrixXd& shifted, int rank, int max_iters, double rel_tol,
                   std::uint64_t seed);

/// Non-negative projection of one segment onto a basis.
struct CoeffVector {
    Eigen::VectorXd values;  // >= 0, dimension r
    double residual = 0.0;   // ||h - B*values||
};

/// Lawson-Hanson active-set solve of min_{c>=0} ||h - B c||^2. At return the
/// KKT conditions hold: with g = B^T (B c - h), g_i >= -tau where c_i = 0 and
/// |g_i| <= tau where c_i > 0, tau = 1e-6 * ||B^T h||_inf.
CoeffVector nnls_project(const Eigen::VectorXd& h, const Eigen::MatrixXd& basis);

}  // namespace kineme
