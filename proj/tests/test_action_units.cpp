#include <doctest.h>

#include "helpers.h"
#include "kineme/action_units.h"

using namespace kineme;

namespace {

AUFrameTrack flat_track(int frames, double fps, double value) {
    AUFrameTrack t;
    t.video_id = "au";
    t.fps = fps;
    for (int i = 0; i < frames; ++i) t.timestamps.push_back(i / fps);
    t.intensities = Eigen::MatrixXd::Constant(kAuChannels, frames, value);
    return t;
}

}  // namespace

TEST_SUITE("action_units") {

TEST_CASE("an AU whose max exceeds the window mean is dominant") {
    AUFrameTrack t = flat_track(20, 10.0, 1.0);
    // Channel index 8 is AU12; give it a spike to 3.0.
    t.intensities(8, 5) = 3.0;
    const AUSequence seq = dominant_au_sequence(t, 2.0, 1.0);
    REQUIRE(seq.windows() == 1);
    CHECK(seq.dominance(8, 0) == 1);
    // Window mean just above 1.0; flat channels at 1.0 fail the strict rule.
    CHECK(seq.dominance(0, 0) == 0);
    CHECK(seq.dominance(16, 0) == 0);
}

TEST_CASE("all-equal intensities produce no dominant AU") {
    const AUFrameTrack t = flat_track(30, 10.0, 0.7);
    const AUSequence seq = dominant_au_sequence(t, 2.0, 1.0);
    for (Eigen::Index w = 0; w < seq.windows(); ++w)
        CHECK(seq.dominance.col(w).sum() == 0);
}

TEST_CASE("defaults are 2 s windows with 1 s step") {
    AUFrameTrack t = flat_track(100, 10.0, 0.5);
    const AUSequence seq = dominant_au_sequence(t);
    CHECK(seq.window_len_s == 2.0);
    CHECK(seq.step_s == 1.0);
    CHECK(seq.windows() == (100 - 20) / 10 + 1);
    CHECK(seq.window_starts[1] == doctest::Approx(1.0));
}

TEST_CASE("dominance is invariant under uniform positive scaling") {
    std::mt19937_64 gen(41);
    std::uniform_real_distribution<double> unit(0.0, 2.0);
    AUFrameTrack t = flat_track(40, 10.0, 0.0);
    for (int a = 0; a < kAuChannels; ++a)
        for (int i = 0; i < 40; ++i) t.intensities(a, i) = unit(gen);
    const AUSequence base = dominant_au_sequence(t, 2.0, 1.0);
    for (double lambda : {0.25, 3.0, 17.5}) {
        AUFrameTrack scaled = t;
        scaled.intensities *= lambda;
        const AUSequence seq = dominant_au_sequence(scaled, 2.0, 1.0);
        CHECK((seq.dominance - base.dominance).cwiseAbs().maxCoeff() == 0);
    }
}

TEST_CASE("window count follows floor((duration - window)/step) + 1") {
    for (int frames : {20, 25, 31, 57, 100}) {
        const AUFrameTrack t = flat_track(frames, 10.0, 0.4);
        const AUSequence seq = dominant_au_sequence(t, 2.0, 1.0);
        CHECK(seq.windows() == (frames - 20) / 10 + 1);
    }
}

TEST_CASE("some AU is dominant whenever the window is not constant") {
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> unit(0.0, 1.5);
    for (int trial = 0; trial < 20; ++trial) {
        AUFrameTrack t = flat_track(20, 10.0, 0.0);
        for (int a = 0; a < kAuChannels; ++a)
            for (int i = 0; i < 20; ++i) t.intensities(a, i) = unit(gen);
        const AUSequence seq = dominant_au_sequence(t, 2.0, 1.0);
        for (Eigen::Index w = 0; w < seq.windows(); ++w)
            CHECK(seq.dominance.col(w).sum() >= 1);
    }
}

TEST_CASE("short tracks and malformed tracks are rejected") {
    const AUFrameTrack t = flat_track(10, 10.0, 0.5);
    CHECK_THROWS_AS(dominant_au_sequence(t, 2.0, 1.0), TrackTooShort);

    AUFrameTrack bad = flat_track(30, 10.0, 0.5);
    bad.intensities(3, 3) = -0.1;
    CHECK_THROWS_AS(dominant_au_sequence(bad, 2.0, 1.0), DataError);
}

}  // TEST_SUITE
