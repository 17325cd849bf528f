#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "kineme/action_units.h"
#include "kineme/codebook.h"
#include "kineme/pose.h"

namespace kineme {

/// Ground-truth generator: videos are concatenations of planted kineme
/// trajectories chosen by a seeded Markov chain, plus i.i.d. Gaussian noise.
/// Trait scores are the frequency of the configured high-symbol set.
struct SynthConfig {
    int kineme_count = 4;  // K >= 2
    double segment_len_s = 2.0;
    double fps = 30.0;
    int blocks_per_video = 10;  // video length = blocks * segment_len_s
    int n_videos = 200;
    double noise_sigma = 0.005;  // radians, per sample
    double class_bias = 0.9;     // transition mass kept inside the class symbol set
    double high_fraction = 0.5;  // share of videos drawn from the high set
    std::vector<int> high_symbols = {1, 2};  // 1-based; the rest form the low set
    // AU channels (0-based, OpenFace order) elevated for each class, so the
    // dominant-AU explanation separates the classes too.
    std::vector<int> au_high_channels = {8, 14};  // AU12, AU25
    std::vector<int> au_low_channels = {2, 5};    // AU04, AU07
    std::uint64_t seed = 0;
    std::string trait = "synthetic";

    int ell() const;  // planted segment length in frames
};

struct SynthVideo {
    HeadPoseSeries pose;
    AUFrameTrack aus;
    std::vector<int> planted_blocks;  // ground-truth symbol per ell-frame block
    double score = 0.0;
    bool high_class = false;
};

struct SynthDataset {
    SynthConfig config;
    Eigen::MatrixXd planted_trajectories;  // 3*ell x K, angle space
    std::vector<SynthVideo> videos;
};

/// Deterministic well-separated planted trajectories (3*ell x K).
Eigen::MatrixXd planted_trajectories(int kineme_count, int ell);

SynthDataset synth_generate(const SynthConfig& cfg);

/// Codebook whose basis is exactly the planted (shifted) trajectories, with a
/// sharply peaked one-hot mixture: encoding a clean planted segment recovers
/// its symbol. Useful as a construction oracle.
Codebook make_planted_codebook(const Eigen::MatrixXd& trajectories, double fps,
                               double overlap_fraction = 0.5);

/// Fraction of block-aligned windows whose encoded symbol matches the planted
/// block under the best symbol permutation (exhaustive for small K).
double matched_symbol_accuracy(const std::vector<std::vector<int>>& planted,
                               const std::vector<std::vector<int>>& encoded, int kineme_count);

/// Writes the dataset as OpenFace-style CSVs plus a manifest (and ground-truth
/// JSON) under `dir`. Returns the manifest path.
std::string write_synth_dataset(const SynthDataset& data, const std::string& dir);

}  // namespace kineme
