#include "kineme/synth.h"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

namespace kineme {

namespace {

// Min-cost perfect assignment (Jonker/e-maxx potentials), O(n^3).
std::vector<int> hungarian_min(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = -1;
            double delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> assign(n, 0);  // truth symbol -> predicted symbol
    for (int j = 1; j <= n; ++j)
        if (p[j] > 0) assign[p[j] - 1] = j - 1;
    return assign;
}

}  // namespace

int SynthConfig::ell() const { return static_cast<int>(std::lround(segment_len_s * fps)); }

Eigen::MatrixXd planted_trajectories(int kineme_count, int ell) {
    if (kineme_count < 2) throw DataError("planted codebook needs K >= 2");
    if (ell < 2) throw DataError("planted segment needs at least 2 frames");
    Eigen::MatrixXd traj(3 * ell, kineme_count);
    constexpr double kPi = std::numbers::pi;
    for (int j = 0; j < kineme_count; ++j) {
        const int dominant = j % 3;
        const double freq = 1.0 + j / 3;
        const double phase = (j % 2) * kPi / 2.0;
        for (int ch = 0; ch < 3; ++ch) {
            const double amp = ch == dominant ? 0.25 : 0.06;
            for (int f = 0; f < ell; ++f)
                traj(ch * ell + f, j) =
                    amp * std::sin(2.0 * kPi * freq * f / ell + phase + ch * 0.7);
        }
    }
    return traj;
}

SynthDataset synth_generate(const SynthConfig& cfg) {
    if (cfg.kineme_count < 2) throw DataError("synth needs K >= 2");
    if (cfg.noise_sigma < 0.0) throw DataError("noise sigma must be >= 0");
    if (cfg.blocks_per_video < 1 || cfg.n_videos < 1)
        throw DataError("synth needs at least one block and one video");
    std::vector<int> high = cfg.high_symbols;
    std::sort(high.begin(), high.end());
    for (int s : high)
        if (s < 1 || s > cfg.kineme_count)
            throw DataError("high symbol " + std::to_string(s) + " outside [1, K]");
    std::vector<int> low;
    for (int s = 1; s <= cfg.kineme_count; ++s)
        if (!std::binary_search(high.begin(), high.end(), s)) low.push_back(s);
    if (high.empty() || low.empty())
        throw DataError("high symbol set must be a proper non-empty subset");

    const int ell = cfg.ell();
    SynthDataset data;
    data.config = cfg;
    data.planted_trajectories = planted_trajectories(cfg.kineme_count, ell);

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int n_high = static_cast<int>(std::lround(cfg.high_fraction * cfg.n_videos));

    for (int v = 0; v < cfg.n_videos; ++v) {
        SynthVideo video;
        video.high_class = v < n_high;
        const std::vector<int>& class_set = video.high_class ? high : low;

        // Sticky Markov chain over symbols, biased toward the class set.
        auto draw_symbol = [&](int current) {
            if (current > 0 && unit(rng) < 0.2) return current;
            if (unit(rng) < cfg.class_bias)
                return class_set[static_cast<std::size_t>(unit(rng) * class_set.size()) %
                                 class_set.size()];
            return 1 + static_cast<int>(unit(rng) * cfg.kineme_count) % cfg.kineme_count;
        };

        int current = 0;
        int high_blocks = 0;
        for (int b = 0; b < cfg.blocks_per_video; ++b) {
            current = draw_symbol(current);
            video.planted_blocks.push_back(current);
            if (std::binary_search(high.begin(), high.end(), current)) ++high_blocks;
        }
        video.score = static_cast<double>(high_blocks) / cfg.blocks_per_video;

        const int t = cfg.blocks_per_video * ell;
        char name[32];
        std::snprintf(name, sizeof(name), "synth_%04d", v);
        video.pose.video_id = name;
        video.pose.fps = cfg.fps;
        video.pose.timestamps.resize(t);
        video.pose.pitch.resize(t);
        video.pose.yaw.resize(t);
        video.pose.roll.resize(t);
        for (int b = 0; b < cfg.blocks_per_video; ++b) {
            const int symbol = video.planted_blocks[b] - 1;
            for (int f = 0; f < ell; ++f) {
                const int i = b * ell + f;
                video.pose.timestamps[i] = i / cfg.fps;
                video.pose.pitch[i] = data.planted_trajectories(f, symbol) +
                                      cfg.noise_sigma * gauss(rng);
                video.pose.yaw[i] = data.planted_trajectories(ell + f, symbol) +
                                    cfg.noise_sigma * gauss(rng);
                video.pose.roll[i] = data.planted_trajectories(2 * ell + f, symbol) +
                                     cfg.noise_sigma * gauss(rng);
            }
        }

        video.aus.video_id = video.pose.video_id;
        video.aus.fps = cfg.fps;
        video.aus.timestamps = video.pose.timestamps;
        video.aus.intensities.resize(kAuChannels, t);
        const std::vector<int>& boosted =
            video.high_class ? cfg.au_high_channels : cfg.au_low_channels;
        for (int i = 0; i < t; ++i)
            for (int a = 0; a < kAuChannels; ++a)
                video.aus.intensities(a, i) = 0.15 + 0.05 * std::abs(gauss(rng));
        for (int a : boosted)
            for (int i = 0; i < t; ++i)
                video.aus.intensities(a, i) = 2.0 + 0.1 * std::abs(gauss(rng));

        data.videos.push_back(std::move(video));
    }
    return data;
}

Codebook make_planted_codebook(const Eigen::MatrixXd& trajectories, double fps,
                               double overlap_fraction) {
    if (trajectories.rows() % 3 != 0)
        throw DimensionMismatch("trajectory rows must be divisible by 3");
    const int ell = static_cast<int>(trajectories.rows() / 3);
    const int k = static_cast<int>(trajectories.cols());

    Codebook cb;
    cb.kineme_count = k;
    cb.rank = k;
    cb.segment_len_frames = ell;
    cb.step_frames =
        std::max(1, static_cast<int>(std::lround(ell * (1.0 - overlap_fraction))));
    cb.fps = fps;
    double* fields[3] = {&cb.offsets.pitch, &cb.offsets.yaw, &cb.offsets.roll};
    cb.basis = trajectories;
    for (int c = 0; c < 3; ++c) {
        const double lo = trajectories.middleRows(c * ell, ell).minCoeff();
        *fields[c] = lo < 0.0 ? -lo : 0.0;
        cb.basis.middleRows(c * ell, ell).array() += *fields[c];
    }
    cb.centroids = Eigen::MatrixXd::Identity(k, k);
    cb.mixture.k = k;
    cb.mixture.weights = Eigen::VectorXd::Constant(k, 1.0 / k);
    cb.mixture.means = Eigen::MatrixXd::Identity(k, k);
    cb.mixture.variances = Eigen::MatrixXd::Constant(k, k, 1e-4);
    cb.trajectories = trajectories;
    return cb;
}

double matched_symbol_accuracy(const std::vector<std::vector<int>>& planted,
                               const std::vector<std::vector<int>>& encoded,
                               int kineme_count) {
    if (planted.size() != encoded.size())
        throw LengthMismatch("planted and encoded corpora differ in size");
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(kineme_count, kineme_count);
    long total = 0;
    for (std::size_t v = 0; v < planted.size(); ++v) {
        if (planted[v].size() != encoded[v].size())
            throw LengthMismatch("planted and encoded sequences differ in length for video " +
                                 std::to_string(v));
        for (std::size_t i = 0; i < planted[v].size(); ++i) {
            counts(planted[v][i] - 1, encoded[v][i] - 1) += 1.0;
            ++total;
        }
    }
    if (total == 0) throw EmptyScores("no symbols to match");
    const double peak = counts.maxCoeff();
    const std::vector<int> assign = hungarian_min((-counts).array() + peak);
    double matched = 0.0;
    for (int s = 0; s < kineme_count; ++s) matched += counts(s, assign[s]);
    return matched / static_cast<double>(total);
}

std::string write_synth_dataset(const SynthDataset& data, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    nlohmann::json manifest;
    manifest["dataset"] = "synthetic";
    manifest["traits"] = {data.config.trait};
    manifest["videos"] = nlohmann::json::array();
    nlohmann::json truth;

    for (const auto& video : data.videos) {
        const std::string csv_name = video.pose.video_id + ".csv";
        std::ofstream csv(fs::path(dir) / csv_name);
        csv << "frame, timestamp, pose_Rx, pose_Ry, pose_Rz";
        for (int au : kAuNumbers) {
            char col[16];
            std::snprintf(col, sizeof(col), ", AU%02d_r", au);
            csv << col;
        }
        csv << "\n";
        csv.precision(17);
        for (std::size_t i = 0; i < video.pose.frames(); ++i) {
            csv << i + 1 << ", " << video.pose.timestamps[i] << ", " << video.pose.pitch[i]
                << ", " << video.pose.yaw[i] << ", " << video.pose.roll[i];
            for (int a = 0; a < kAuChannels; ++a)
                csv << ", " << video.aus.intensities(a, static_cast<Eigen::Index>(i));
            csv << "\n";
        }

        nlohmann::json entry;
        entry["video_id"] = video.pose.video_id;
        entry["features_csv"] = csv_name;
        entry["scores"] = {{data.config.trait, video.score}};
        manifest["videos"].push_back(std::move(entry));
        truth[video.pose.video_id] = video.planted_blocks;
    }

    const std::string manifest_path = (fs::path(dir) / "manifest.json").string();
    std::ofstream mf(manifest_path);
    mf << manifest.dump(2) << "\n";
    std::ofstream tf(fs::path(dir) / "ground_truth.json");
    tf << truth.dump(2) << "\n";
    return manifest_path;
}

}  // namespace kineme
