#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "kineme/factorization.h"
#include "kineme/mixture.h"
#include "kineme/pose.h"

namespace kineme {

struct KinemeConfig {
    int kineme_count = 16;  // K
    int nmf_rank = 0;       // r; 0 means "use K"
    double segment_len_s = 2.0;
    double overlap_fraction = 0.5;
    double canonical_fps = 30.0;
    int nmf_max_iters = 400;
    double nmf_rel_tol = 1e-7;
    int gmm_max_iters = 300;
    double gmm_rel_tol = 1e-8;
    std::uint64_t seed = 0;

    int rank() const { return nmf_rank > 0 ? nmf_rank : kineme_count; }
};

/// Everything needed to encode a pose series as a kineme sequence: the NMF
/// basis, the mixture over coefficient space, the centroid matrix and the
/// channel offsets, plus the K kineme trajectories back in angle space.
struct Codebook {
    int kineme_count = 0;        // K
    int rank = 0;                // r
    int segment_len_frames = 0;  // ell
    int step_frames = 0;
    double fps = 0.0;
    ChannelOffsets offsets;
    Eigen::MatrixXd basis;         // 3*ell x r
    GaussianMixture mixture;       // K components over dim r
    Eigen::MatrixXd centroids;     // r x K
    Eigen::MatrixXd trajectories;  // 3*ell x K, angle space (pitch|yaw|roll)

    /// Throws DataError when the stored shape relations are broken or
    /// trajectories diverge from unshift(B * C*).
    void validate() const;
};

/// Per-window kineme symbols for one series. Symbols are 1-based in [1, K].
struct KinemeSequence {
    std::string video_id;
    std::vector<double> window_starts;  // seconds
    std::vector<int> symbols;

    std::size_t size() const { return symbols.size(); }
};

/// Learns a codebook: segment -> stack/shift -> NMF -> GMM over coefficient
/// columns -> centroids -> trajectories. Kineme indices are ordered by
/// descending mixture weight so "kineme 1" is stable for a fixed seed.
Codebook learn_kinemes(const std::vector<HeadPoseSeries>& training, const KinemeConfig& config);

/// Encodes a series against a learned codebook: shift (clamping below-training
/// values at 0), NNLS-project onto the basis, take the posterior argmax.
/// Ties break to the lowest component index.
KinemeSequence encode_series(const HeadPoseSeries& series, const Codebook& codebook);

/// Trajectory of one kineme (1-based index) in angle space.
AngleTrajectory kineme_trajectory(const Codebook& codebook, int kineme);

/// Plot-ready long table of all K trajectories, kineme index 1..K outer,
/// window time inner.
struct TrajectoryRow {
    int kineme = 0;
    double time_s = 0.0;
    double pitch = 0.0;
    double yaw = 0.0;
    double roll = 0.0;
};
std::vector<TrajectoryRow> kineme_trajectories(const Codebook& codebook);

}  // namespace kineme
