#include "kineme/codebook.h"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

namespace kineme {

namespace {

// splitmix64, for deriving independent stage seeds from one user seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stage) {
    std::uint64_t z = seed + stage * 0x9e3779b97f4a7c15ULL + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Eigen::VectorXd shift_vector(const ChannelOffsets& off, Eigen::Index ell) {
    Eigen::VectorXd v(3 * ell);
    v.segment(0, ell).setConstant(off.pitch);
    v.segment(ell, ell).setConstant(off.yaw);
    v.segment(2 * ell, ell).setConstant(off.roll);
    return v;
}

}  // namespace

void Codebook::validate() const {
    const Eigen::Index ell = segment_len_frames;
    if (kineme_count < 1 || rank < 1 || ell < 2 || step_frames < 1 || !(fps > 0.0))
        throw DataError("codebook has invalid scalar parameters");
    if (basis.rows() != 3 * ell || basis.cols() != rank)
        throw DataError("codebook basis shape mismatch");
    if (mixture.k != kineme_count || mixture.dim() != rank)
        throw DataError("codebook mixture shape mismatch");
    if (centroids.rows() != rank || centroids.cols() != kineme_count)
        throw DataError("codebook centroid shape mismatch");
    if (trajectories.rows() != 3 * ell || trajectories.cols() != kineme_count)
        throw DataError("codebook trajectory shape mismatch");
    const Eigen::VectorXd shift = shift_vector(offsets, ell);
    for (int j = 0; j < kineme_count; ++j) {
        const Eigen::VectorXd expect = basis * centroids.col(j) - shift;
        if ((trajectories.col(j) - expect).cwiseAbs().maxCoeff() > 1e-9)
            throw DataError("codebook trajectory " + std::to_string(j + 1) +
                            " inconsistent with unshift(B * C*)");
    }
}

Codebook learn_kinemes(const std::vector<HeadPoseSeries>& training,
                       const KinemeConfig& config) {
    if (training.empty()) throw EmptyInput("no training series");
    const int k = config.kineme_count;
    const int r = config.rank();
    if (k < 1) throw DataError("kineme count must be >= 1");

    std::vector<SegmentMatrix> per_video;
    per_video.reserve(training.size());
    for (const auto& series : training) {
        const HeadPoseSeries at_fps = resample(series, config.canonical_fps);
        per_video.push_back(
            segment_series(at_fps, config.segment_len_s, config.overlap_fraction));
    }
    auto [stacked, offsets] = stack_and_shift(per_video);

    const Eigen::Index total = stacked.cols();
    const Eigen::Index required = std::max<Eigen::Index>(10LL * k, r + 1);
    if (total < required)
        throw InsufficientData("have " + std::to_string(total) + " training segments, need " +
                               std::to_string(required));

    FactorPair nmf =
        nmf_fit(stacked.columns, r, config.nmf_max_iters, config.nmf_rel_tol,
                mix_seed(config.seed, 1));

    GmmOptions gopts;
    gopts.max_iters = config.gmm_max_iters;
    gopts.rel_tol = config.gmm_rel_tol;
    gopts.seed = mix_seed(config.seed, 2);
    GaussianMixture mixture = gmm_fit(nmf.coefficients, k, gopts);

    // Stable kineme numbering: sort components by descending weight.
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return mixture.weights(a) > mixture.weights(b);
    });
    GaussianMixture sorted = mixture;
    for (int j = 0; j < k; ++j) {
        sorted.weights(j) = mixture.weights(order[j]);
        sorted.means.col(j) = mixture.means.col(order[j]);
        sorted.variances.col(j) = mixture.variances.col(order[j]);
    }

    Codebook cb;
    cb.kineme_count = k;
    cb.rank = r;
    cb.segment_len_frames = stacked.segment_len_frames;
    cb.step_frames = stacked.step_frames;
    cb.fps = config.canonical_fps;
    cb.offsets = offsets;
    cb.basis = std::move(nmf.basis);
    cb.mixture = std::move(sorted);
    cb.centroids = cluster_centroids(cb.mixture);
    const Eigen::VectorXd shift = shift_vector(offsets, cb.segment_len_frames);
    cb.trajectories = (cb.basis * cb.centroids).colwise() - shift;
    return cb;
}

KinemeSequence encode_series(const HeadPoseSeries& series, const Codebook& codebook) {
    const HeadPoseSeries at_fps = resample(series, codebook.fps);
    if (static_cast<int>(at_fps.frames()) < codebook.segment_len_frames)
        throw SeriesTooShort("series '" + series.video_id + "' shorter than one window");
    const SegmentMatrix segs =
        segment_by_frames(at_fps, codebook.segment_len_frames, codebook.step_frames);

    KinemeSequence seq;
    seq.video_id = series.video_id;
    seq.window_starts.reserve(segs.cols());
    seq.symbols.reserve(segs.cols());
    int clamped = 0;
    for (Eigen::Index i = 0; i < segs.cols(); ++i) {
        const Eigen::VectorXd shifted =
            apply_offsets(segs.columns.col(i), codebook.offsets, &clamped);
        const CoeffVector coeff = nnls_project(shifted, codebook.basis);
        const Eigen::VectorXd post = gmm_posterior(codebook.mixture, coeff.values);
        int best = 0;
        for (int j = 1; j < codebook.kineme_count; ++j)
            if (post(j) > post(best)) best = j;
        seq.window_starts.push_back(i * codebook.step_frames / codebook.fps);
        seq.symbols.push_back(best + 1);
    }
    if (clamped > 0)
        std::cerr << "warning: " << series.video_id << ": " << clamped
                  << " values below the training minimum clamped to 0\n";
    return seq;
}

AngleTrajectory kineme_trajectory(const Codebook& codebook, int kineme) {
    if (kineme < 1 || kineme > codebook.kineme_count)
        throw DataError("kineme index " + std::to_string(kineme) + " outside [1, " +
                        std::to_string(codebook.kineme_count) + "]");
    return unshift_column(
        codebook.basis * codebook.centroids.col(kineme - 1), codebook.offsets);
}

std::vector<TrajectoryRow> kineme_trajectories(const Codebook& codebook) {
    std::vector<TrajectoryRow> rows;
    const int ell = codebook.segment_len_frames;
    rows.reserve(static_cast<std::size_t>(codebook.kineme_count) * ell);
    for (int j = 0; j < codebook.kineme_count; ++j) {
        for (int f = 0; f < ell; ++f) {
            rows.push_back({j + 1, f / codebook.fps, codebook.trajectories(f, j),
                            codebook.trajectories(ell + f, j),
                            codebook.trajectories(2 * ell + f, j)});
        }
    }
    return rows;
}

}  // namespace kineme
