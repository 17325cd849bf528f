#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "kineme/errors.h"

namespace kineme {

/// FACS action units carried by OpenFace intensity output, in column order.
inline constexpr std::array<int, 17> kAuNumbers = {1,  2,  4,  5,  6,  7,  9,  10, 12,
                                                   14, 15, 17, 20, 23, 25, 26, 45};
inline constexpr int kAuChannels = 17;

/// Per-frame AU intensities for one video (OpenFace 0-5 scale).
struct AUFrameTrack {
    std::string video_id;
    double fps = 0.0;
    std::vector<double> timestamps;
    Eigen::MatrixXd intensities;  // 17 x frames, entrywise >= 0

    std::size_t frames() const { return static_cast<std::size_t>(intensities.cols()); }
    void validate() const;
};

/// Per-window binary dominance vectors aligned with kineme windows.
struct AUSequence {
    std::string video_id;
    std::vector<double> window_starts;  // seconds
    Eigen::MatrixXi dominance;          // 17 x windows, entries in {0,1}
    double window_len_s = 2.0;
    double step_s = 1.0;

    Eigen::Index windows() const { return dominance.cols(); }
};

/// An AU is dominant in a window iff its maximum intensity there strictly
/// exceeds the mean intensity over all 17 channels and frames of the window.
AUSequence dominant_au_sequence(const AUFrameTrack& track, double window_s = 2.0,
                                double step_s = 1.0);

}  // namespace kineme
