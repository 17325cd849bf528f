#include <doctest.h>

#include "helpers.h"
#include "kineme/pose.h"

using namespace kineme;

TEST_SUITE("pose") {

TEST_CASE("450 frames at 30fps with 2s windows and 50% overlap give 14 columns") {
    const HeadPoseSeries s = testutil::random_series(450, 30.0, 1);
    const SegmentMatrix m = segment_series(s, 2.0, 0.5);
    CHECK(m.segment_len_frames == 60);
    CHECK(m.step_frames == 30);
    CHECK(m.cols() == 14);
    CHECK(m.columns.rows() == 180);

    // Brute-force enumeration of valid window starts.
    int count = 0;
    for (int start = 0; start + 60 <= 450; start += 30) ++count;
    CHECK(m.cols() == count);
}

TEST_CASE("a series exactly one window long gives a single column") {
    const HeadPoseSeries s = testutil::random_series(60, 30.0, 2);
    CHECK(segment_series(s, 2.0, 0.5).cols() == 1);
    CHECK(segment_series(s, 2.0, 0.0).cols() == 1);
    CHECK(segment_series(s, 2.0, 0.9).cols() == 1);
}

TEST_CASE("segment count formula matches brute force over a parameter sweep") {
    for (int t : {2, 3, 7, 20, 41}) {
        const HeadPoseSeries s = testutil::random_series(t, 10.0, 100 + t);
        for (int ell = 2; ell <= t; ++ell) {
            for (int step = 1; step <= ell; ++step) {
                int expected = 0;
                for (int start = 0; start + ell <= t; start += step) ++expected;
                CHECK(segment_by_frames(s, ell, step).cols() == expected);
                CHECK(segment_count(t, ell, step) == expected);
            }
        }
    }
}

TEST_CASE("consecutive 50%-overlap segments share exactly ell/2 frames") {
    const HeadPoseSeries s = testutil::random_series(240, 30.0, 3);
    const SegmentMatrix m = segment_series(s, 2.0, 0.5);
    const int ell = m.segment_len_frames;
    REQUIRE(m.cols() >= 2);
    for (Eigen::Index i = 0; i + 1 < m.cols(); ++i) {
        // Second half of column i equals first half of column i+1, per channel.
        for (int ch = 0; ch < 3; ++ch) {
            const auto tail = m.columns.col(i).segment(ch * ell + ell / 2, ell / 2);
            const auto head = m.columns.col(i + 1).segment(ch * ell, ell / 2);
            CHECK((tail - head).cwiseAbs().maxCoeff() == 0.0);
        }
    }
}

TEST_CASE("segment column layout is pitch then yaw then roll") {
    HeadPoseSeries s = testutil::random_series(4, 2.0, 4);
    const SegmentMatrix m = segment_by_frames(s, 2, 2);
    CHECK(m.columns(0, 0) == s.pitch[0]);
    CHECK(m.columns(2, 0) == s.yaw[0]);
    CHECK(m.columns(4, 0) == s.roll[0]);
    CHECK(m.columns(1, 1) == s.pitch[3]);
}

TEST_CASE("segmentation errors") {
    const HeadPoseSeries s = testutil::random_series(30, 30.0, 5);
    CHECK_THROWS_AS(segment_series(s, 2.0, 0.5), SeriesTooShort);
    CHECK_THROWS_AS(segment_series(s, 0.5, 1.0), InvalidOverlap);
    CHECK_THROWS_AS(segment_series(s, 0.5, -0.1), InvalidOverlap);
    CHECK_THROWS_AS(segment_series(s, 0.01, 0.5), DataError);  // < 2 frames
}

TEST_CASE("stack_and_shift offsets negated channel minima") {
    HeadPoseSeries s = testutil::random_series(4, 2.0, 6);
    s.pitch = {-0.2, 0.3, 0.1, 0.0};
    s.yaw = {0.1, 0.2, 0.3, 0.4};
    s.roll = {-0.5, -0.1, -0.2, -0.3};
    const SegmentMatrix m = segment_by_frames(s, 2, 2);
    const auto [stacked, offsets] = stack_and_shift({m});
    CHECK(offsets.pitch == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(offsets.yaw == 0.0);  // already non-negative: unchanged
    CHECK(offsets.roll == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(stacked.columns.minCoeff() >= 0.0);
    CHECK(stacked.columns(0, 0) == doctest::Approx(0.0));   // -0.2 + 0.2
    CHECK(stacked.columns(1, 0) == doctest::Approx(0.5));   // 0.3 + 0.2
    CHECK(stacked.columns(2, 0) == doctest::Approx(0.1));   // yaw untouched
    // The shifted minimum of a previously-negative channel is exactly 0.
    CHECK(stacked.columns.middleRows(0, 2).minCoeff() == 0.0);
    CHECK(stacked.columns.middleRows(4, 2).minCoeff() == 0.0);
}

TEST_CASE("all-non-negative input is left unchanged") {
    HeadPoseSeries s = testutil::random_series(6, 3.0, 7);
    for (auto* ch : {&s.pitch, &s.yaw, &s.roll})
        for (double& v : *ch) v = std::abs(v) + 0.01;
    const SegmentMatrix m = segment_by_frames(s, 3, 1);
    const auto [stacked, offsets] = stack_and_shift({m});
    CHECK(offsets.pitch == 0.0);
    CHECK(offsets.yaw == 0.0);
    CHECK(offsets.roll == 0.0);
    CHECK((stacked.columns - m.columns).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("shift then unshift reproduces the original column") {
    const HeadPoseSeries s = testutil::random_series(300, 30.0, 8);
    const SegmentMatrix m = segment_series(s, 2.0, 0.5);
    const auto [stacked, offsets] = stack_and_shift({m});
    const int ell = m.segment_len_frames;
    for (Eigen::Index i = 0; i < m.cols(); ++i) {
        const AngleTrajectory traj = unshift_column(stacked.columns.col(i), offsets);
        for (int f = 0; f < ell; ++f) {
            CHECK(traj.pitch(f) == doctest::Approx(m.columns(f, i)).epsilon(1e-12));
            CHECK(traj.yaw(f) == doctest::Approx(m.columns(ell + f, i)).epsilon(1e-12));
            CHECK(traj.roll(f) == doctest::Approx(m.columns(2 * ell + f, i)).epsilon(1e-12));
        }
    }
}

TEST_CASE("unshift with zero offsets reshapes the column") {
    Eigen::VectorXd col(6);
    col << 1, 2, 3, 4, 5, 6;
    const AngleTrajectory traj = unshift_column(col, {});
    CHECK(traj.pitch(0) == 1.0);
    CHECK(traj.pitch(1) == 2.0);
    CHECK(traj.yaw(0) == 3.0);
    CHECK(traj.roll(1) == 6.0);
}

TEST_CASE("constant column equal to the pitch offset unshifts to zero pitch") {
    Eigen::VectorXd col = Eigen::VectorXd::Constant(9, 0.2);
    ChannelOffsets offsets;
    offsets.pitch = 0.2;
    const AngleTrajectory traj = unshift_column(col, offsets);
    CHECK(traj.pitch.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    CHECK(traj.yaw(0) == doctest::Approx(0.2));
}

TEST_CASE("stack_and_shift errors") {
    const HeadPoseSeries s = testutil::random_series(10, 5.0, 9);
    const SegmentMatrix a = segment_by_frames(s, 4, 2);
    const SegmentMatrix b = segment_by_frames(s, 5, 2);
    CHECK_THROWS_AS(stack_and_shift({a, b}), MixedSegmentLength);
    CHECK_THROWS_AS(stack_and_shift({}), EmptyInput);
    Eigen::VectorXd bad(7);
    bad.setZero();
    CHECK_THROWS_AS(unshift_column(bad, {}), DimensionMismatch);
}

TEST_CASE("apply_offsets clamps below-training values and counts them") {
    Eigen::VectorXd col(3);
    col << -0.5, 0.0, 0.4;
    ChannelOffsets offsets;
    offsets.pitch = 0.2;
    offsets.yaw = 0.1;
    int clamped = 0;
    const Eigen::VectorXd shifted = apply_offsets(col, offsets, &clamped);
    CHECK(clamped == 1);            // -0.5 + 0.2 clamps at 0
    CHECK(shifted(0) == 0.0);
    CHECK(shifted(1) == doctest::Approx(0.1));
    CHECK(shifted(2) == doctest::Approx(0.4));
}

TEST_CASE("resampling preserves a linear ramp") {
    HeadPoseSeries s;
    s.video_id = "ramp";
    s.fps = 10.0;
    for (int i = 0; i < 50; ++i) {
        s.timestamps.push_back(i / 10.0);
        s.pitch.push_back(0.01 * i);
        s.yaw.push_back(-0.02 * i);
        s.roll.push_back(0.0);
    }
    const HeadPoseSeries r = resample(s, 30.0);
    CHECK(r.fps == 30.0);
    CHECK(r.frames() == 148);  // floor(4.9 * 30) + 1
    for (std::size_t i = 0; i < r.frames(); ++i) {
        CHECK(r.pitch[i] == doctest::Approx(0.1 * r.timestamps[i]).epsilon(1e-9));
        CHECK(r.yaw[i] == doctest::Approx(-0.2 * r.timestamps[i]).epsilon(1e-9));
    }
    // Identity when already at the target rate.
    const HeadPoseSeries same = resample(s, 10.0);
    CHECK(same.frames() == s.frames());
    CHECK(same.pitch == s.pitch);
}

}  // TEST_SUITE
