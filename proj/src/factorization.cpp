#include "kineme/factorization.h"

#include <algorithm>
#include <cmath>
#include <random>

namespace kineme {

namespace {
constexpr double kDenomFloor = 1e-12;
}

FactorPair nmf_fit(const Eigen::MatrixXd& shifted, int rank, int max_iters, double rel_tol,
                   std::uint64_t seed) {
    const Eigen::Index rows = shifted.rows();
    const Eigen::Index cols = shifted.cols();
    if (rows == 0 || cols == 0) throw EmptyInput("nmf input matrix is empty");
    if (shifted.minCoeff() < 0.0) throw NegativeInput("nmf input has negative entries");
    if (rank < 1 || rank > std::min(rows, cols))
        throw RankTooLarge("rank " + std::to_string(rank) + " outside [1, min(" +
                           std::to_string(rows) + ", " + std::to_string(cols) + ")]");
    if (max_iters < 1) throw DataError("nmf max_iters must be >= 1");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double mean = shifted.mean();
    const double scale = mean > 0.0 ? mean / rank : 1.0;
    auto draw = [&] { return (1.0 - unit(rng)) * scale; };  // uniform (0, 1] * scale

    FactorPair fp;
    fp.rank = rank;
    fp.basis.resize(rows, rank);
    fp.coefficients.resize(rank, cols);
    for (Eigen::Index j = 0; j < rank; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) fp.basis(i, j) = draw();
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rank; ++i) fp.coefficients(i, j) = draw();

    Eigen::MatrixXd& b = fp.basis;
    Eigen::MatrixXd& c = fp.coefficients;
    double prev = (shifted - b * c).norm();
    fp.objective_trace.reserve(max_iters);
    for (int it = 0; it < max_iters; ++it) {
        {
            const Eigen::MatrixXd numer = shifted * c.transpose();
            const Eigen::MatrixXd denom = b * (c * c.transpose());
            b.array() *= numer.array() / denom.array().max(kDenomFloor);
        }
        {
            const Eigen::MatrixXd numer = b.transpose() * shifted;
            const Eigen::MatrixXd denom = (b.transpose() * b) * c;
            c.array() *= numer.array() / denom.array().max(kDenomFloor);
        }
        const double obj = (shifted - b * c).norm();
        fp.objective_trace.push_back(obj);
        const double drop = (prev - obj) / std::max(prev, kDenomFloor);
        prev = obj;
        if (drop < rel_tol && it > 0) break;
    }
    fp.final_objective = prev;
    return fp;
}

CoeffVector nnls_project(const Eigen::VectorXd& h, const Eigen::MatrixXd& basis) {
    const Eigen::Index m = basis.rows();
    const Eigen::Index n = basis.cols();
    if (h.size() != m)
        throw DimensionMismatch("segment dimension " + std::to_string(h.size()) +
                                " does not match basis rows " + std::to_string(m));

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<bool> passive(n, false);
    std::vector<Eigen::Index> pset;
    pset.reserve(n);

    const double gscale = (basis.transpose() * h).cwiseAbs().maxCoeff();
    const double tol_w = 1e-10 * (1.0 + gscale);
    const int max_outer = 10 * static_cast<int>(n) + 10;

    auto solve_passive = [&](Eigen::VectorXd& z) {
        Eigen::MatrixXd bp(m, pset.size());
        for (std::size_t j = 0; j < pset.size(); ++j) bp.col(j) = basis.col(pset[j]);
        z = bp.colPivHouseholderQr().solve(h);
    };

    for (int outer = 0; outer < max_outer; ++outer) {
        const Eigen::VectorXd w = basis.transpose() * (h - basis * x);
        Eigen::Index best = -1;
        double best_w = tol_w;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!passive[i] && w(i) > best_w) {
                best_w = w(i);
                best = i;
            }
        }
        if (best < 0) break;
        passive[best] = true;
        pset.push_back(best);

        // Inner loop: restore feasibility of the passive-set solution.
        for (int inner = 0; inner < max_outer; ++inner) {
            Eigen::VectorXd z;
            solve_passive(z);
            bool all_positive = true;
            for (Eigen::Index j = 0; j < z.size(); ++j)
                if (z(j) <= 0.0) all_positive = false;
            if (all_positive) {
                x.setZero();
                for (std::size_t j = 0; j < pset.size(); ++j) x(pset[j]) = z(j);
                break;
            }
            double alpha = 1.0;
            for (std::size_t j = 0; j < pset.size(); ++j) {
                if (z(j) <= 0.0) {
                    const double xj = x(pset[j]);
                    const double step = xj / (xj - z(j));
                    alpha = std::min(alpha, step);
                }
            }
            for (std::size_t j = 0; j < pset.size(); ++j)
                x(pset[j]) += alpha * (z(j) - x(pset[j]));
            // Drop variables pinned at zero from the passive set.
            std::vector<Eigen::Index> keep;
            keep.reserve(pset.size());
            for (Eigen::Index idx : pset) {
                if (x(idx) > 1e-14) {
                    keep.push_back(idx);
                } else {
                    x(idx) = 0.0;
                    passive[idx] = false;
                }
            }
            pset = std::move(keep);
            if (pset.empty()) break;
        }
    }

    CoeffVector out;
    out.values = x;
    out.residual = (h - basis * x).norm();
    return out;
}

}  // namespace kineme
