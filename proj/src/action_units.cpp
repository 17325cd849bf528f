#include "kineme/action_units.h"

#include <cmath>

namespace kineme {

void AUFrameTrack::validate() const {
    if (intensities.rows() != kAuChannels)
        throw DataError("au track '" + video_id + "' must have 17 channels, got " +
                        std::to_string(intensities.rows()));
    if (intensities.cols() == 0) throw DataError("au track '" + video_id + "' is empty");
    if (timestamps.size() != frames())
        throw DataError("au track '" + video_id + "' timestamp count mismatch");
    if (!(fps > 0.0)) throw DataError("au track '" + video_id + "' has non-positive fps");
    if (intensities.minCoeff() < 0.0)
        throw DataError("au track '" + video_id + "' has negative intensities");
}

AUSequence dominant_au_sequence(const AUFrameTrack& track, double window_s, double step_s) {
    track.validate();
    if (!(window_s > 0.0) || !(step_s > 0.0))
        throw DataError("au window and step must both be positive");
    const int wlen = static_cast<int>(std::lround(window_s * track.fps));
    const int step = std::max(1, static_cast<int>(std::lround(step_s * track.fps)));
    const int t = static_cast<int>(track.frames());
    if (wlen < 1 || t < wlen)
        throw TrackTooShort("au track '" + track.video_id + "' has " + std::to_string(t) +
                            " frames, window needs " + std::to_string(wlen));

    const int windows = (t - wlen) / step + 1;
    AUSequence seq;
    seq.video_id = track.video_id;
    seq.window_len_s = window_s;
    seq.step_s = step_s;
    seq.dominance.resize(kAuChannels, windows);
    seq.window_starts.reserve(windows);
    for (int w = 0; w < windows; ++w) {
        const auto block = track.intensities.middleCols(w * step, wlen);
        const double threshold = block.mean();
        for (int a = 0; a < kAuChannels; ++a)
            seq.dominance(a, w) = block.row(a).maxCoeff() > threshold ? 1 : 0;
        seq.window_starts.push_back(w * step / track.fps);
    }
    return seq;
}

}  // namespace kineme
