#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kineme/analytics.h"
#include "kineme/codebook.h"
#include "kineme/dataset.h"
#include "kineme/hmm.h"
#include "kineme/lstm.h"

namespace kineme {

enum class ModelKind {
    PcaLinReg,           // regression baseline on raw pose values
    HmmKin,              // per-class discrete HMMs on kineme sequences
    LstmKin,             // single-branch LSTM on kineme one-hots
    LstmAu,              // single-branch LSTM on AU dominance vectors
    LstmFusion,          // two-branch feature fusion
    LstmDecisionFusion,  // unimodal LSTMs + alpha-grid decision fusion
};

ModelKind model_kind_from_name(const std::string& name);
std::string model_kind_name(ModelKind kind);

/// One encoded thin slice: aligned kineme and AU windows plus the flattened
/// pose for the PCA baseline.
struct EncodedChunk {
    KinemeSequence kin;
    AUSequence aus;
    Eigen::VectorXd pose_concat;
};

struct VideoChunks {
    std::string video_id;
    double score = 0.0;
    std::vector<EncodedChunk> chunks;
};

struct EncodedDataset {
    int kineme_count = 0;
    std::vector<VideoChunks> videos;
};

/// Chunks one video and encodes every chunk against the codebook. Kineme and
/// AU windows use the codebook geometry so fusion inputs align; a stray
/// off-by-one between the two window counts is truncated to the common length.
VideoChunks encode_video(const HeadPoseSeries& pose, const AUFrameTrack& aus, double score,
                         const Codebook& codebook, const ChunkSpec& spec);

struct CrossvalConfig {
    int folds = 10;
    int repeats = 5;
    double val_fraction = 0.10;
    std::uint64_t seed = 0;
    int jobs = 1;
    Task task = Task::Classification;
    ModelKind model = ModelKind::HmmKin;
    // model hyper-parameters
    int hmm_states = 4;
    HmmOptions hmm;
    int lstm_hidden = 32;
    double lstm_dropout = 0.2;
    TrainConfig lstm;
    double pca_variance = 0.90;
};

struct RunResult {
    int repeat = 0;
    int fold = 0;
    MetricsReport chunk;
    MetricsReport video;
    double alpha = -1.0;  // decision fusion only
};

struct CrossvalReport {
    Task task = Task::Classification;
    int folds = 0;
    int repeats = 0;
    std::vector<RunResult> runs;  // ordered by (repeat, fold)
    MetricsReport chunk_level;
    MetricsReport video_level;
};

/// repeats x folds video-level cross validation: per run, one fold is the test
/// set, `val_fraction` of the remaining videos are held out for validation
/// (early stopping, fusion alpha search) and the rest train the model. Chunk
/// labels inherit the video label; classification medians come from the run's
/// training videos only. Deterministic for a fixed seed, independent of
/// `jobs`.
CrossvalReport run_crossval(const EncodedDataset& dataset, const CrossvalConfig& cfg);

}  // namespace kineme
