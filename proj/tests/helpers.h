#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

#include "kineme/pose.h"

namespace testutil {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline kineme::HeadPoseSeries random_series(int frames, double fps, std::uint64_t seed,
                                            const std::string& id = "test") {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> gauss(0.0, 0.2);
    kineme::HeadPoseSeries s;
    s.video_id = id;
    s.fps = fps;
    for (int i = 0; i < frames; ++i) {
        s.timestamps.push_back(i / fps);
        s.pitch.push_back(gauss(gen));
        s.yaw.push_back(gauss(gen));
        s.roll.push_back(gauss(gen));
    }
    return s;
}

inline Eigen::MatrixXd random_nonneg(Eigen::Index rows, Eigen::Index cols,
                                     std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = unit(gen);
    return m;
}

inline Eigen::MatrixXd random_gaussian(Eigen::Index rows, Eigen::Index cols,
                                       std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = gauss(gen);
    return m;
}

/// Exhaustive active-set oracle for min_{x>=0} ||h - B x||^2: tries every
/// support, keeps the best feasible unconstrained solve. Exact for small n.
inline Eigen::VectorXd nnls_bruteforce(const Eigen::VectorXd& h, const Eigen::MatrixXd& b) {
    const int n = static_cast<int>(b.cols());
    Eigen::VectorXd best = Eigen::VectorXd::Zero(n);
    double best_obj = h.squaredNorm();
    for (int mask = 1; mask < (1 << n); ++mask) {
        std::vector<int> cols;
        for (int j = 0; j < n; ++j)
            if (mask & (1 << j)) cols.push_back(j);
        Eigen::MatrixXd sub(b.rows(), cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j) sub.col(j) = b.col(cols[j]);
        const Eigen::VectorXd z = sub.colPivHouseholderQr().solve(h);
        if ((z.array() < -1e-12).any()) continue;
        const double obj = (h - sub * z.cwiseMax(0.0)).squaredNorm();
        if (obj < best_obj) {
            best_obj = obj;
            best.setZero();
            for (std::size_t j = 0; j < cols.size(); ++j) best(cols[j]) = std::max(0.0, z(j));
        }
    }
    return best;
}

}  // namespace testutil
