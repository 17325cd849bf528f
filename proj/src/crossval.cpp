#include "kineme/crossval.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <thread>

namespace kineme {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (a * 1000003ULL + b + 1ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

Eigen::MatrixXd kin_one_hot(const KinemeSequence& seq, int k) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k, static_cast<Eigen::Index>(seq.size()));
    for (std::size_t w = 0; w < seq.size(); ++w) m(seq.symbols[w] - 1, w) = 1.0;
    return m;
}

Eigen::MatrixXd au_binary(const AUSequence& seq) {
    return seq.dominance.cast<double>();
}

struct ChunkRef {
    int video = 0;  // index into the dataset
    int chunk = 0;
};

// Per-run working set, resolved from the fold assignment.
struct RunSplit {
    std::vector<int> train_videos, val_videos, test_videos;
    std::vector<ChunkRef> train_chunks, val_chunks, test_chunks;
};

std::vector<ChunkRef> chunks_of(const EncodedDataset& data, const std::vector<int>& videos) {
    std::vector<ChunkRef> refs;
    for (int v : videos)
        for (std::size_t c = 0; c < data.videos[v].chunks.size(); ++c)
            refs.push_back({v, static_cast<int>(c)});
    return refs;
}

// Predicted (score, label) per chunk; label is meaningful for classification.
struct ChunkPrediction {
    double score = 0.0;
    int label = 0;
};

class ModelRunner {
  public:
    ModelRunner(const EncodedDataset& data, const CrossvalConfig& cfg, std::uint64_t seed)
        : data_(data), cfg_(cfg), seed_(seed) {}

    // Trains on the split and returns per-chunk predictions for `chunks`,
    // exposing validation predictions to the decision-fusion path.
    std::vector<ChunkPrediction> run(const RunSplit& split, double median, double* alpha_out) {
        switch (cfg_.model) {
            case ModelKind::PcaLinReg:
                return run_pca(split);
            case ModelKind::HmmKin:
                return run_hmm(split, median);
            case ModelKind::LstmKin:
            case ModelKind::LstmAu:
            case ModelKind::LstmFusion:
                return run_lstm(split, median, cfg_.model);
            case ModelKind::LstmDecisionFusion:
                return run_decision_fusion(split, median, alpha_out);
        }
        throw DataError("unknown model kind");
    }

  private:
    const EncodedChunk& chunk(const ChunkRef& r) const {
        return data_.videos[r.video].chunks[r.chunk];
    }
    double video_score(const ChunkRef& r) const { return data_.videos[r.video].score; }

    std::vector<Eigen::MatrixXd> lstm_inputs(const ChunkRef& r, ModelKind kind) const {
        const EncodedChunk& c = chunk(r);
        switch (kind) {
            case ModelKind::LstmKin:
                return {kin_one_hot(c.kin, data_.kineme_count)};
            case ModelKind::LstmAu:
                return {au_binary(c.aus)};
            default:
                return {kin_one_hot(c.kin, data_.kineme_count), au_binary(c.aus)};
        }
    }

    std::vector<ChunkPrediction> run_pca(const RunSplit& split) const {
        if (cfg_.task != Task::Regression)
            throw DataError("pca baseline supports regression only");
        const Eigen::Index dim = chunk(split.train_chunks.front()).pose_concat.size();
        Eigen::MatrixXd x(split.train_chunks.size(), dim);
        Eigen::VectorXd y(split.train_chunks.size());
        for (std::size_t i = 0; i < split.train_chunks.size(); ++i) {
            x.row(i) = chunk(split.train_chunks[i]).pose_concat;
            y(i) = video_score(split.train_chunks[i]);
        }
        const PcaRegression model = pca_linreg_fit(x, y, cfg_.pca_variance);
        std::vector<ChunkPrediction> preds(split.test_chunks.size());
        for (std::size_t i = 0; i < split.test_chunks.size(); ++i) {
            Eigen::MatrixXd row(1, dim);
            row.row(0) = chunk(split.test_chunks[i]).pose_concat;
            preds[i].score = clamp01(pca_linreg_predict(model, row)(0));
        }
        return preds;
    }

    std::vector<ChunkPrediction> run_hmm(const RunSplit& split, double median) const {
        if (cfg_.task != Task::Classification)
            throw DataError("the hmm model supports classification only");
        std::vector<KinemeSequence> low, high;
        for (const ChunkRef& r : split.train_chunks) {
            (video_score(r) > median ? high : low).push_back(chunk(r).kin);
        }
        if (low.empty() || high.empty())
            throw DataError("a class has no training sequences; need both labels present");
        HmmOptions opts = cfg_.hmm;
        opts.seed = mix_seed(seed_, 11, 0);
        const DiscreteHMM neg = hmm_fit(low, cfg_.hmm_states, data_.kineme_count, opts);
        opts.seed = mix_seed(seed_, 11, 1);
        const DiscreteHMM pos = hmm_fit(high, cfg_.hmm_states, data_.kineme_count, opts);

        std::vector<ChunkPrediction> preds(split.test_chunks.size());
        for (std::size_t i = 0; i < split.test_chunks.size(); ++i) {
            const KinemeSequence& seq = chunk(split.test_chunks[i]).kin;
            preds[i].label = hmm_classify(neg, pos, seq);
            const double llr = hmm_loglik(pos, seq) - hmm_loglik(neg, seq);
            preds[i].score = std::isfinite(llr) ? sigmoid(llr) : (llr > 0 ? 1.0 : 0.0);
        }
        return preds;
    }

    SeqNet train_one_lstm(const RunSplit& split, double median, ModelKind kind,
                          std::uint64_t salt) const {
        std::vector<SeqSample> train, val;
        auto to_sample = [&](const ChunkRef& r) {
            SeqSample s;
            s.inputs = lstm_inputs(r, kind);
            s.target = cfg_.task == Task::Regression
                           ? video_score(r)
                           : (video_score(r) > median ? 1.0 : 0.0);
            return s;
        };
        for (const ChunkRef& r : split.train_chunks) train.push_back(to_sample(r));
        for (const ChunkRef& r : split.val_chunks) val.push_back(to_sample(r));

        const HeadType head = cfg_.task == Task::Regression ? HeadType::Regression
                                                            : HeadType::Classification;
        std::vector<int> widths;
        for (const auto& input : train.front().inputs)
            widths.push_back(static_cast<int>(input.rows()));
        SeqNet net = make_seqnet(widths, cfg_.lstm_hidden, head, cfg_.lstm_dropout,
                                 mix_seed(seed_, 21, salt));
        TrainConfig tc = cfg_.lstm;
        tc.loss = cfg_.task == Task::Regression ? LossType::MeanAbsoluteError
                                                : LossType::BinaryCrossEntropy;
        tc.seed = mix_seed(seed_, 22, salt);
        seqnet_train(net, train, val, tc);
        return net;
    }

    ChunkPrediction lstm_predict(const SeqNet& net, const ChunkRef& r, ModelKind kind) const {
        ChunkPrediction p;
        if (cfg_.task == Task::Regression) {
            p.score = clamp01(seqnet_score(net, lstm_inputs(r, kind)));
        } else {
            const Eigen::VectorXd out = seqnet_forward(net, lstm_inputs(r, kind));
            p.label = out(1) > out(0) ? 1 : 0;
            p.score = out(1);
        }
        return p;
    }

    std::vector<ChunkPrediction> run_lstm(const RunSplit& split, double median,
                                          ModelKind kind) const {
        const SeqNet net = train_one_lstm(split, median, kind, 0);
        std::vector<ChunkPrediction> preds(split.test_chunks.size());
        for (std::size_t i = 0; i < split.test_chunks.size(); ++i)
            preds[i] = lstm_predict(net, split.test_chunks[i], kind);
        return preds;
    }

    std::vector<ChunkPrediction> run_decision_fusion(const RunSplit& split, double median,
                                                     double* alpha_out) const {
        const SeqNet kin_net = train_one_lstm(split, median, ModelKind::LstmKin, 0);
        const SeqNet au_net = train_one_lstm(split, median, ModelKind::LstmAu, 1);

        auto scores = [&](const SeqNet& net, ModelKind kind,
                          const std::vector<ChunkRef>& refs) {
            std::vector<double> out(refs.size());
            for (std::size_t i = 0; i < refs.size(); ++i)
                out[i] = lstm_predict(net, refs[i], kind).score;
            return out;
        };
        const std::vector<double> val_kin = scores(kin_net, ModelKind::LstmKin, split.val_chunks);
        const std::vector<double> val_au = scores(au_net, ModelKind::LstmAu, split.val_chunks);
        std::vector<double> reference(split.val_chunks.size());
        for (std::size_t i = 0; i < split.val_chunks.size(); ++i) {
            const double s = video_score(split.val_chunks[i]);
            reference[i] = cfg_.task == Task::Regression ? s : (s > median ? 1.0 : 0.0);
        }
        const FusionResult fr = fuse_decisions(val_kin, val_au, reference, cfg_.task);
        if (alpha_out) *alpha_out = fr.alpha;

        const std::vector<double> test_kin =
            scores(kin_net, ModelKind::LstmKin, split.test_chunks);
        const std::vector<double> test_au = scores(au_net, ModelKind::LstmAu, split.test_chunks);
        const std::vector<double> fused = fuse_scores(test_kin, test_au, fr.alpha);
        std::vector<ChunkPrediction> preds(split.test_chunks.size());
        for (std::size_t i = 0; i < preds.size(); ++i) {
            preds[i].score = cfg_.task == Task::Regression ? clamp01(fused[i]) : fused[i];
            preds[i].label = fused[i] >= 0.5 ? 1 : 0;
        }
        return preds;
    }

    const EncodedDataset& data_;
    const CrossvalConfig& cfg_;
    std::uint64_t seed_;
};

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
    if (jobs <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    const int threads = std::min(jobs, n);
    workers.reserve(threads);
    for (int w = 0; w < threads; ++w)
        workers.emplace_back([&, w] {
            for (int i = w; i < n; i += threads) fn(i);
        });
    for (auto& t : workers) t.join();
}

}  // namespace

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "pca") return ModelKind::PcaLinReg;
    if (name == "hmm") return ModelKind::HmmKin;
    if (name == "lstm-kin") return ModelKind::LstmKin;
    if (name == "lstm-au") return ModelKind::LstmAu;
    if (name == "lstm-ff") return ModelKind::LstmFusion;
    if (name == "lstm-df") return ModelKind::LstmDecisionFusion;
    throw DataError("unknown model '" + name +
                    "' (expected pca, hmm, lstm-kin, lstm-au, lstm-ff or lstm-df)");
}

std::string model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::PcaLinReg: return "pca";
        case ModelKind::HmmKin: return "hmm";
        case ModelKind::LstmKin: return "lstm-kin";
        case ModelKind::LstmAu: return "lstm-au";
        case ModelKind::LstmFusion: return "lstm-ff";
        case ModelKind::LstmDecisionFusion: return "lstm-df";
    }
    return "?";
}

VideoChunks encode_video(const HeadPoseSeries& pose, const AUFrameTrack& aus, double score,
                         const Codebook& codebook, const ChunkSpec& spec) {
    VideoChunks out;
    out.video_id = pose.video_id;
    out.score = score;
    const double window_s = codebook.segment_len_frames / codebook.fps;
    const double step_s = codebook.step_frames / codebook.fps;
    const int concat_frames =
        static_cast<int>(std::lround(spec.chunk_len_s * codebook.fps));

    for (ChunkPair& pair : chunk_series(pose, aus, spec)) {
        EncodedChunk chunk;
        const HeadPoseSeries at_fps = resample(pair.pose, codebook.fps);
        chunk.kin = encode_series(at_fps, codebook);
        chunk.aus = dominant_au_sequence(pair.aus, window_s, step_s);
        const Eigen::Index nw = std::min<Eigen::Index>(chunk.kin.size(), chunk.aus.windows());
        chunk.kin.symbols.resize(nw);
        chunk.kin.window_starts.resize(nw);
        chunk.aus.dominance.conservativeResize(Eigen::NoChange, nw);
        chunk.aus.window_starts.resize(nw);

        chunk.pose_concat.resize(3 * concat_frames);
        const int have = static_cast<int>(at_fps.frames());
        for (int f = 0; f < concat_frames; ++f) {
            const int i = std::min(f, have - 1);
            chunk.pose_concat(f) = at_fps.pitch[i];
            chunk.pose_concat(concat_frames + f) = at_fps.yaw[i];
            chunk.pose_concat(2 * concat_frames + f) = at_fps.roll[i];
        }
        out.chunks.push_back(std::move(chunk));
    }
    return out;
}

CrossvalReport run_crossval(const EncodedDataset& dataset, const CrossvalConfig& cfg) {
    const int n_videos = static_cast<int>(dataset.videos.size());
    if (cfg.folds < 2) throw DataError("need at least 2 folds");
    if (cfg.repeats < 1) throw DataError("need at least 1 repeat");
    if (n_videos < cfg.folds)
        throw TooFewVideos("have " + std::to_string(n_videos) + " videos for " +
                           std::to_string(cfg.folds) + " folds");
    for (const auto& v : dataset.videos)
        if (v.chunks.empty())
            throw DataError("video '" + v.video_id + "' has no chunks");

    // Fold assignment per repeat: seeded shuffle, dealt round-robin.
    std::vector<std::vector<int>> fold_of(cfg.repeats, std::vector<int>(n_videos));
    for (int rep = 0; rep < cfg.repeats; ++rep) {
        std::vector<int> order(n_videos);
        std::iota(order.begin(), order.end(), 0);
        std::mt19937_64 rng(mix_seed(cfg.seed, 1, rep));
        std::shuffle(order.begin(), order.end(), rng);
        for (int i = 0; i < n_videos; ++i) fold_of[rep][order[i]] = i % cfg.folds;
    }

    const int n_runs = cfg.repeats * cfg.folds;
    std::vector<RunResult> results(n_runs);
    std::vector<std::string> failures(n_runs);

    parallel_for(n_runs, cfg.jobs, [&](int run) {
        try {
            const int rep = run / cfg.folds;
            const int fold = run % cfg.folds;
            const std::uint64_t run_seed = mix_seed(cfg.seed, 2 + rep, fold);

            RunSplit split;
            std::vector<int> pool;
            for (int v = 0; v < n_videos; ++v) {
                if (fold_of[rep][v] == fold)
                    split.test_videos.push_back(v);
                else
                    pool.push_back(v);
            }
            std::mt19937_64 rng(run_seed);
            std::shuffle(pool.begin(), pool.end(), rng);
            int n_val = std::max(1, static_cast<int>(std::lround(cfg.val_fraction *
                                                                 pool.size())));
            n_val = std::min<int>(n_val, static_cast<int>(pool.size()) - 1);
            split.val_videos.assign(pool.begin(), pool.begin() + n_val);
            split.train_videos.assign(pool.begin() + n_val, pool.end());
            split.train_chunks = chunks_of(dataset, split.train_videos);
            split.val_chunks = chunks_of(dataset, split.val_videos);
            split.test_chunks = chunks_of(dataset, split.test_videos);

            double median = 0.0;
            if (cfg.task == Task::Classification) {
                std::vector<double> train_scores;
                for (int v : split.train_videos)
                    train_scores.push_back(dataset.videos[v].score);
                median = binarize_median(train_scores).median;
            }

            ModelRunner runner(dataset, cfg, run_seed);
            double alpha = -1.0;
            const std::vector<ChunkPrediction> preds = runner.run(split, median, &alpha);

            RunResult rr;
            rr.repeat = rep;
            rr.fold = fold;
            rr.alpha = alpha;

            // Chunk-level metrics.
            std::vector<double> chunk_pred, chunk_gt;
            for (std::size_t i = 0; i < split.test_chunks.size(); ++i) {
                const double gt_score = dataset.videos[split.test_chunks[i].video].score;
                if (cfg.task == Task::Regression) {
                    chunk_pred.push_back(preds[i].score);
                    chunk_gt.push_back(gt_score);
                } else {
                    chunk_pred.push_back(preds[i].label);
                    chunk_gt.push_back(gt_score > median ? 1.0 : 0.0);
                }
            }
            rr.chunk = eval_metrics(chunk_pred, chunk_gt, cfg.task);

            // Video-level metrics via chunk aggregation.
            std::vector<double> video_pred, video_gt;
            for (int v : split.test_videos) {
                std::vector<double> scores;
                std::vector<int> labels;
                for (std::size_t i = 0; i < split.test_chunks.size(); ++i) {
                    if (split.test_chunks[i].video != v) continue;
                    scores.push_back(preds[i].score);
                    labels.push_back(preds[i].label);
                }
                if (cfg.task == Task::Regression) {
                    video_pred.push_back(aggregate_video_score(scores));
                    video_gt.push_back(dataset.videos[v].score);
                } else {
                    video_pred.push_back(aggregate_video_label(labels, scores));
                    video_gt.push_back(dataset.videos[v].score > median ? 1.0 : 0.0);
                }
            }
            rr.video = eval_metrics(video_pred, video_gt, cfg.task);
            results[run] = std::move(rr);
        } catch (const std::exception& e) {
            failures[run] = e.what();
        }
    });

    for (int run = 0; run < n_runs; ++run)
        if (!failures[run].empty())
            throw NumericalError("cross-validation run " + std::to_string(run) +
                                 " failed: " + failures[run]);

    CrossvalReport report;
    report.task = cfg.task;
    report.folds = cfg.folds;
    report.repeats = cfg.repeats;
    report.runs = std::move(results);
    std::vector<MetricsReport> chunk_runs, video_runs;
    for (const auto& rr : report.runs) {
        chunk_runs.push_back(rr.chunk);
        video_runs.push_back(rr.video);
    }
    report.chunk_level = aggregate_reports(chunk_runs);
    report.video_level = aggregate_reports(video_runs);
    return report;
}

}  // namespace kineme
