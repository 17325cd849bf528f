#include "kineme/pose.h"

#include <algorithm>
#include <cmath>

namespace kineme {

void HeadPoseSeries::validate() const {
    const std::size_t t = pitch.size();
    if (t == 0) throw DataError("pose series '" + video_id + "' is empty");
    if (yaw.size() != t || roll.size() != t || timestamps.size() != t)
        throw DataError("pose series '" + video_id + "' has unequal channel lengths");
    if (!(fps > 0.0)) throw DataError("pose series '" + video_id + "' has non-positive fps");
    for (std::size_t i = 1; i < t; ++i)
        if (!(timestamps[i] > timestamps[i - 1]))
            throw DataError("pose series '" + video_id +
                            "' timestamps not strictly increasing at frame " + std::to_string(i));
}

int segment_count(int frames, int segment_len, int step) {
    if (frames < segment_len) return 0;
    return (frames - segment_len) / step + 1;
}

HeadPoseSeries resample(const HeadPoseSeries& series, double target_fps) {
    series.validate();
    if (!(target_fps > 0.0)) throw DataError("target fps must be positive");
    if (std::abs(series.fps - target_fps) < 1e-9) return series;

    const std::size_t t = series.frames();
    HeadPoseSeries out;
    out.video_id = series.video_id;
    out.fps = target_fps;
    if (t == 1) {
        out.timestamps = series.timestamps;
        out.pitch = series.pitch;
        out.yaw = series.yaw;
        out.roll = series.roll;
        return out;
    }

    const double t0 = series.timestamps.front();
    const double t1 = series.timestamps.back();
    const std::size_t n = static_cast<std::size_t>(std::floor((t1 - t0) * target_fps)) + 1;
    out.timestamps.resize(n);
    out.pitch.resize(n);
    out.yaw.resize(n);
    out.roll.resize(n);

    std::size_t seg = 0;  // index of the source interval [seg, seg+1]
    for (std::size_t i = 0; i < n; ++i) {
        const double ts = t0 + static_cast<double>(i) / target_fps;
        while (seg + 2 < t && series.timestamps[seg + 1] <= ts) ++seg;
        const double a = series.timestamps[seg];
        const double b = series.timestamps[seg + 1];
        const double w = std::clamp((ts - a) / (b - a), 0.0, 1.0);
        out.timestamps[i] = ts;
        out.pitch[i] = series.pitch[seg] + w * (series.pitch[seg + 1] - series.pitch[seg]);
        out.yaw[i] = series.yaw[seg] + w * (series.yaw[seg + 1] - series.yaw[seg]);
        out.roll[i] = series.roll[seg] + w * (series.roll[seg + 1] - series.roll[seg]);
    }
    return out;
}

SegmentMatrix segment_by_frames(const HeadPoseSeries& series, int segment_len_frames,
                                int step_frames) {
    series.validate();
    if (segment_len_frames < 2) throw DataError("segment window must span at least 2 frames");
    if (step_frames < 1) throw DataError("segment step must be at least 1 frame");
    const int t = static_cast<int>(series.frames());
    if (t < segment_len_frames)
        throw SeriesTooShort("series '" + series.video_id + "' has " + std::to_string(t) +
                             " frames, window needs " + std::to_string(segment_len_frames));

    const int s = segment_count(t, segment_len_frames, step_frames);
    SegmentMatrix out;
    out.segment_len_frames = segment_len_frames;
    out.step_frames = step_frames;
    out.columns.resize(3 * segment_len_frames, s);
    out.source_ids.reserve(s);
    for (int i = 0; i < s; ++i) {
        const int start = i * step_frames;
        for (int f = 0; f < segment_len_frames; ++f) {
            out.columns(f, i) = series.pitch[start + f];
            out.columns(segment_len_frames + f, i) = series.yaw[start + f];
            out.columns(2 * segment_len_frames + f, i) = series.roll[start + f];
        }
        out.source_ids.push_back({series.video_id, i});
    }
    return out;
}

SegmentMatrix segment_series(const HeadPoseSeries& series, double segment_len_s,
                             double overlap_fraction) {
    if (overlap_fraction < 0.0 || overlap_fraction >= 1.0)
        throw InvalidOverlap("overlap fraction " + std::to_string(overlap_fraction) +
                             " outside [0,1)");
    series.validate();
    const int ell = static_cast<int>(std::lround(segment_len_s * series.fps));
    if (ell < 2) throw DataError("segment window must span at least 2 frames");
    const int step =
        std::max(1, static_cast<int>(std::lround(ell * (1.0 - overlap_fraction))));
    return segment_by_frames(series, ell, step);
}

std::pair<SegmentMatrix, ChannelOffsets> stack_and_shift(
    const std::vector<SegmentMatrix>& per_video) {
    Eigen::Index total = 0;
    int ell = -1;
    int step = -1;
    for (const auto& m : per_video) {
        if (m.cols() == 0) continue;
        if (ell < 0) {
            ell = m.segment_len_frames;
            step = m.step_frames;
        } else if (m.segment_len_frames != ell) {
            throw MixedSegmentLength("segment length differs across inputs: " +
                                     std::to_string(ell) + " vs " +
                                     std::to_string(m.segment_len_frames));
        } else if (m.step_frames != step) {
            throw MixedSegmentLength("segment step differs across inputs: " +
                                     std::to_string(step) + " vs " +
                                     std::to_string(m.step_frames));
        }
        total += m.cols();
    }
    if (total == 0) throw EmptyInput("no segment columns to stack");

    SegmentMatrix stacked;
    stacked.segment_len_frames = ell;
    stacked.step_frames = step;
    stacked.columns.resize(3 * ell, total);
    stacked.source_ids.reserve(total);
    Eigen::Index at = 0;
    for (const auto& m : per_video) {
        if (m.cols() == 0) continue;
        stacked.columns.middleCols(at, m.cols()) = m.columns;
        stacked.source_ids.insert(stacked.source_ids.end(), m.source_ids.begin(),
                                  m.source_ids.end());
        at += m.cols();
    }

    ChannelOffsets offsets;
    double* fields[3] = {&offsets.pitch, &offsets.yaw, &offsets.roll};
    for (int c = 0; c < 3; ++c) {
        const double lo = stacked.columns.middleRows(c * ell, ell).minCoeff();
        *fields[c] = lo < 0.0 ? -lo : 0.0;
        if (*fields[c] != 0.0)
            stacked.columns.middleRows(c * ell, ell).array() += *fields[c];
    }
    return {std::move(stacked), offsets};
}

Eigen::VectorXd apply_offsets(const Eigen::VectorXd& column, const ChannelOffsets& offsets,
                              int* clamped) {
    if (column.size() % 3 != 0)
        throw DimensionMismatch("segment dimension " + std::to_string(column.size()) +
                                " not divisible by 3");
    const Eigen::Index ell = column.size() / 3;
    const double off[3] = {offsets.pitch, offsets.yaw, offsets.roll};
    Eigen::VectorXd out(column.size());
    int clamps = 0;
    for (int c = 0; c < 3; ++c) {
        for (Eigen::Index f = 0; f < ell; ++f) {
            double v = column(c * ell + f) + off[c];
            if (v < 0.0) {
                v = 0.0;
                ++clamps;
            }
            out(c * ell + f) = v;
        }
    }
    if (clamped) *clamped += clamps;
    return out;
}

AngleTrajectory unshift_column(const Eigen::VectorXd& column, const ChannelOffsets& offsets) {
    if (column.size() % 3 != 0)
        throw DimensionMismatch("column dimension " + std::to_string(column.size()) +
                                " not divisible by 3");
    const Eigen::Index ell = column.size() / 3;
    AngleTrajectory traj;
    traj.pitch = column.segment(0, ell).array() - offsets.pitch;
    traj.yaw = column.segment(ell, ell).array() - offsets.yaw;
    traj.roll = column.segment(2 * ell, ell).array() - offsets.roll;
    return traj;
}

}  // namespace kineme
