#include <doctest.h>

#include "helpers.h"
#include "kineme/crossval.h"
#include "kineme/synth.h"

using namespace kineme;

namespace {

// 30 well-separated synthetic videos encoded with the planted codebook.
EncodedDataset make_dataset(int n_videos, double chunk_s, std::uint64_t seed) {
    SynthConfig cfg;
    cfg.kineme_count = 4;
    cfg.n_videos = n_videos;
    cfg.blocks_per_video = 8;  // 16 s videos
    cfg.seed = seed;
    const SynthDataset data = synth_generate(cfg);
    const Codebook cb = make_planted_codebook(data.planted_trajectories, cfg.fps);

    EncodedDataset out;
    out.kineme_count = cfg.kineme_count;
    ChunkSpec spec;
    spec.chunk_len_s = chunk_s;
    for (const auto& v : data.videos)
        out.videos.push_back(encode_video(v.pose, v.aus, v.score, cb, spec));
    return out;
}

}  // namespace

TEST_SUITE("crossval") {

TEST_CASE("encode_video aligns kineme and AU windows") {
    const EncodedDataset data = make_dataset(2, 8.0, 21);
    for (const auto& v : data.videos) {
        CHECK(v.chunks.size() == 2);  // 16 s / 8 s
        for (const auto& c : v.chunks) {
            CHECK(c.kin.size() == static_cast<std::size_t>(c.aus.windows()));
            CHECK(c.kin.size() == 7);  // floor((240-60)/30)+1
            CHECK(c.pose_concat.size() == 3 * 240);
        }
    }
}

TEST_CASE("10 folds x 5 repeats run exactly 50 times and reproduce bit-identically") {
    const EncodedDataset data = make_dataset(30, 8.0, 22);
    CrossvalConfig cfg;
    cfg.task = Task::Classification;
    cfg.model = ModelKind::HmmKin;
    cfg.hmm_states = 2;
    cfg.seed = 5;
    const CrossvalReport a = run_crossval(data, cfg);
    CHECK(a.runs.size() == 50);
    for (int run = 0; run < 50; ++run) {
        CHECK(a.runs[run].repeat == run / 10);
        CHECK(a.runs[run].fold == run % 10);
    }

    const CrossvalReport b = run_crossval(data, cfg);
    CHECK(a.chunk_level.acc_cls.mean == b.chunk_level.acc_cls.mean);
    CHECK(a.chunk_level.f1.std == b.chunk_level.f1.std);
    CHECK(a.video_level.acc_cls.mean == b.video_level.acc_cls.mean);
    for (int run = 0; run < 50; ++run)
        CHECK(a.runs[run].chunk.f1.mean == b.runs[run].chunk.f1.mean);
}

TEST_CASE("parallel execution matches the sequential report") {
    const EncodedDataset data = make_dataset(20, 8.0, 23);
    CrossvalConfig cfg;
    cfg.folds = 5;
    cfg.repeats = 2;
    cfg.task = Task::Classification;
    cfg.model = ModelKind::HmmKin;
    cfg.hmm_states = 2;
    cfg.seed = 7;
    cfg.jobs = 1;
    const CrossvalReport seq = run_crossval(data, cfg);
    cfg.jobs = 4;
    const CrossvalReport par = run_crossval(data, cfg);
    for (std::size_t run = 0; run < seq.runs.size(); ++run) {
        CHECK(seq.runs[run].chunk.acc_cls.mean == par.runs[run].chunk.acc_cls.mean);
        CHECK(seq.runs[run].video.f1.mean == par.runs[run].video.f1.mean);
    }
}

TEST_CASE("a perfectly separable corpus yields zero spread across runs") {
    const EncodedDataset data = make_dataset(30, 8.0, 24);
    CrossvalConfig cfg;
    cfg.folds = 5;
    cfg.repeats = 2;
    cfg.task = Task::Classification;
    cfg.model = ModelKind::HmmKin;
    cfg.hmm_states = 2;
    cfg.seed = 11;
    const CrossvalReport rep = run_crossval(data, cfg);
    CHECK(rep.video_level.acc_cls.mean == doctest::Approx(1.0));
    CHECK(rep.video_level.acc_cls.std == doctest::Approx(0.0));
    CHECK(rep.video_level.f1.std == doctest::Approx(0.0));
}

TEST_CASE("pca regression baseline runs under cross validation") {
    const EncodedDataset data = make_dataset(20, 8.0, 25);
    CrossvalConfig cfg;
    cfg.folds = 4;
    cfg.repeats = 1;
    cfg.task = Task::Regression;
    cfg.model = ModelKind::PcaLinReg;
    cfg.seed = 3;
    const CrossvalReport rep = run_crossval(data, cfg);
    CHECK(rep.runs.size() == 4);
    CHECK(rep.chunk_level.acc_reg.mean > 0.0);
    CHECK(rep.chunk_level.acc_reg.mean <= 1.0);

    cfg.task = Task::Classification;
    CHECK_THROWS_AS(run_crossval(data, cfg), DataError);
}

TEST_CASE("dataset size and parameters are validated") {
    const EncodedDataset data = make_dataset(6, 8.0, 26);
    CrossvalConfig cfg;
    cfg.folds = 10;
    CHECK_THROWS_AS(run_crossval(data, cfg), TooFewVideos);
    cfg.folds = 1;
    CHECK_THROWS_AS(run_crossval(data, cfg), DataError);
}

TEST_CASE("model names round-trip") {
    for (ModelKind kind :
         {ModelKind::PcaLinReg, ModelKind::HmmKin, ModelKind::LstmKin, ModelKind::LstmAu,
          ModelKind::LstmFusion, ModelKind::LstmDecisionFusion})
        CHECK(model_kind_from_name(model_kind_name(kind)) == kind);
    CHECK_THROWS_AS(model_kind_from_name("resnet"), DataError);
}

TEST_CASE("lstm decision fusion over cross validation produces grid alphas") {
    const EncodedDataset data = make_dataset(12, 8.0, 27);
    CrossvalConfig cfg;
    cfg.folds = 3;
    cfg.repeats = 1;
    cfg.task = Task::Classification;
    cfg.model = ModelKind::LstmDecisionFusion;
    cfg.lstm_hidden = 8;
    cfg.lstm.epochs = 12;
    cfg.lstm.batch_size = 8;
    cfg.seed = 13;
    const CrossvalReport rep = run_crossval(data, cfg);
    CHECK(rep.runs.size() == 3);
    for (const auto& run : rep.runs) {
        CHECK(run.alpha >= 0.0);
        CHECK(run.alpha <= 1.0);
        CHECK(run.alpha == doctest::Approx(std::round(run.alpha * 100) / 100));
    }
}

}  // TEST_SUITE
