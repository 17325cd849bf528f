#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "kineme/errors.h"

namespace kineme {

/// Per-frame head orientation angles (radians) for one video or chunk.
struct HeadPoseSeries {
    std::string video_id;
    double fps = 0.0;
    std::vector<double> timestamps;  // seconds, strictly increasing
    std::vector<double> pitch;
    std::vector<double> yaw;
    std::vector<double> roll;

    std::size_t frames() const { return pitch.size(); }

    /// Throws DataError when the channel lengths disagree, timestamps are not
    /// strictly increasing, fps <= 0 or the series is empty.
    void validate() const;
};

/// Provenance of one segment column.
struct SegmentSource {
    std::string video_id;
    int window_index = 0;
};

/// Columns are flattened pitch|yaw|roll windows, 3*ell values each.
struct SegmentMatrix {
    Eigen::MatrixXd columns;  // 3*ell x s
    int segment_len_frames = 0;
    int step_frames = 0;
    std::vector<SegmentSource> source_ids;

    Eigen::Index cols() const { return columns.cols(); }
};

/// Additive per-channel shifts (radians) that make stacked values non-negative.
struct ChannelOffsets {
    double pitch = 0.0;
    double yaw = 0.0;
    double roll = 0.0;
};

/// One segment decoded back to angle space.
struct AngleTrajectory {
    Eigen::VectorXd pitch;
    Eigen::VectorXd yaw;
    Eigen::VectorXd roll;
};

/// Number of length-`segment_len` windows with hop `step` that fit in `frames`.
int segment_count(int frames, int segment_len, int step);

/// Linear resampling onto a uniform grid at `target_fps`. Returns the input
/// unchanged when it is already at the target rate.
HeadPoseSeries resample(const HeadPoseSeries& series, double target_fps);

SegmentMatrix segment_by_frames(const HeadPoseSeries& series, int segment_len_frames,
                                int step_frames);

/// Cuts the series into overlapping windows of `segment_len_s` seconds.
/// ell = round(segment_len_s * fps), step = round(ell * (1 - overlap_fraction)).
SegmentMatrix segment_series(const HeadPoseSeries& series, double segment_len_s,
                             double overlap_fraction);

/// Concatenates per-video segment matrices and shifts each channel by the
/// negated global channel minimum so every entry is >= 0. Channels that are
/// already non-negative are left unchanged (offset 0).
std::pair<SegmentMatrix, ChannelOffsets> stack_and_shift(
    const std::vector<SegmentMatrix>& per_video);

/// Shifts a raw segment column into the non-negative training frame. Values
/// below the training minimum clamp to 0; the clamp count is added to
/// `clamped` when non-null.
Eigen::VectorXd apply_offsets(const Eigen::VectorXd& column, const ChannelOffsets& offsets,
                              int* clamped = nullptr);

/// Inverse of the shift: subtracts the per-channel offset from each third of
/// the column and splits it into pitch/yaw/roll.
AngleTrajectory unshift_column(const Eigen::VectorXd& column, const ChannelOffsets& offsets);

}  // namespace kineme
