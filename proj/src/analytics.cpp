#include "kineme/analytics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace kineme {

namespace {

double quantile_linear(std::vector<double> sorted, double p) {
    const std::size_t n = sorted.size();
    const double h = (n - 1) * p;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, n - 1);
    return sorted[lo] + (h - lo) * (sorted[hi] - sorted[lo]);
}

std::vector<ExplainEntry> top_entries(const std::map<int, long>& counts, std::size_t top_n) {
    std::vector<ExplainEntry> all;
    all.reserve(counts.size());
    for (const auto& [symbol, count] : counts) all.push_back({symbol, count});
    std::stable_sort(all.begin(), all.end(), [](const ExplainEntry& a, const ExplainEntry& b) {
        return a.count > b.count;  // stable keeps ascending symbol order on ties
    });
    if (all.size() > top_n) all.resize(top_n);
    return all;
}

ExplainRow explain_set(const std::vector<const EncodedVideo*>& set, const std::string& trait,
                       bool high, int kineme_count) {
    ExplainRow row;
    row.trait = trait;
    row.high = high;
    row.n_videos = static_cast<int>(set.size());

    std::map<int, long> kin_counts;
    for (int s = 1; s <= kineme_count; ++s) kin_counts[s] = 0;
    std::map<int, long> au_counts;
    for (int au : kAuNumbers) au_counts[au] = 0;

    for (const EncodedVideo* v : set) {
        for (int s : v->kin.symbols) {
            ++kin_counts[s];
            ++row.kineme_windows;
        }
        for (Eigen::Index w = 0; w < v->aus.windows(); ++w) {
            ++row.au_windows;
            for (int a = 0; a < kAuChannels; ++a)
                if (v->aus.dominance(a, w)) ++au_counts[kAuNumbers[a]];
        }
    }
    row.kinemes = top_entries(kin_counts, 4);
    row.aus = top_entries(au_counts, 5);
    return row;
}

}  // namespace

TraitLabels binarize_median(const std::vector<double>& scores, const std::string& trait) {
    if (scores.size() < 2) throw EmptyScores("median binarization needs at least 2 scores");
    std::vector<double> sorted = scores;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double median =
        n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

    TraitLabels out;
    out.trait = trait;
    out.median = median;
    out.scores = scores;
    out.labels = apply_threshold(scores, median);
    return out;
}

std::vector<int> apply_threshold(const std::vector<double>& scores, double median) {
    std::vector<int> labels(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) labels[i] = scores[i] > median ? 1 : 0;
    return labels;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y, bool* degenerate) {
    if (x.size() != y.size())
        throw LengthMismatch("pearson inputs differ in length: " + std::to_string(x.size()) +
                             " vs " + std::to_string(y.size()));
    if (degenerate) *degenerate = false;
    const std::size_t n = x.size();
    if (n == 0) throw EmptyScores("pearson of empty vectors");
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        if (degenerate) *degenerate = true;
        return 0.0;
    }
    return sxy / std::sqrt(sxx * syy);
}

MetricsReport eval_metrics(const std::vector<double>& predictions,
                           const std::vector<double>& ground_truth, Task task) {
    if (predictions.size() != ground_truth.size())
        throw LengthMismatch("predictions and ground truth differ in length");
    if (predictions.empty()) throw EmptyScores("nothing to evaluate");

    MetricsReport r;
    r.task = task;
    r.n_runs = 1;
    if (task == Task::Regression) {
        double mae = 0.0;
        for (std::size_t i = 0; i < predictions.size(); ++i) {
            if (predictions[i] < 0.0 || predictions[i] > 1.0 || ground_truth[i] < 0.0 ||
                ground_truth[i] > 1.0)
                throw DataError("regression values must lie in [0,1]");
            mae += std::abs(predictions[i] - ground_truth[i]);
        }
        r.acc_reg.mean = 1.0 - mae / predictions.size();
        r.pcc.mean = pearson(predictions, ground_truth, &r.pcc_degenerate);
    } else {
        long tp = 0, fp = 0, fn = 0, correct = 0;
        for (std::size_t i = 0; i < predictions.size(); ++i) {
            if ((predictions[i] != 0.0 && predictions[i] != 1.0) ||
                (ground_truth[i] != 0.0 && ground_truth[i] != 1.0))
                throw DataError("classification values must be 0/1 labels");
            const bool p = predictions[i] == 1.0;
            const bool g = ground_truth[i] == 1.0;
            if (p == g) ++correct;
            if (p && g) ++tp;
            if (p && !g) ++fp;
            if (!p && g) ++fn;
        }
        r.acc_cls.mean = static_cast<double>(correct) / predictions.size();
        const double prec = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
        const double rec = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
        r.f1.mean = prec + rec > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
    }
    return r;
}

MetricsReport aggregate_reports(const std::vector<MetricsReport>& runs) {
    if (runs.empty()) throw EmptyScores("no runs to aggregate");
    MetricsReport out;
    out.task = runs.front().task;
    out.n_runs = static_cast<int>(runs.size());
    auto collect = [&](auto pick) {
        std::vector<double> v;
        v.reserve(runs.size());
        for (const auto& r : runs) v.push_back(pick(r));
        Stat s;
        s.mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
        double ss = 0.0;
        for (double q : v) ss += (q - s.mean) * (q - s.mean);
        s.std = std::sqrt(ss / v.size());
        return s;
    };
    if (out.task == Task::Regression) {
        out.acc_reg = collect([](const MetricsReport& r) { return r.acc_reg.mean; });
        out.pcc = collect([](const MetricsReport& r) { return r.pcc.mean; });
        for (const auto& r : runs) out.pcc_degenerate |= r.pcc_degenerate;
    } else {
        out.acc_cls = collect([](const MetricsReport& r) { return r.acc_cls.mean; });
        out.f1 = collect([](const MetricsReport& r) { return r.f1.mean; });
    }
    return out;
}

int aggregate_video_label(const std::vector<int>& labels, const std::vector<double>& scores) {
    if (labels.empty()) throw EmptyScores("no chunk labels to aggregate");
    if (labels.size() != scores.size())
        throw LengthMismatch("labels and scores differ in length");
    long high = 0;
    for (int l : labels) high += l == 1;
    const long low = static_cast<long>(labels.size()) - high;
    if (high != low) return high > low ? 1 : 0;

    double conf_high = 0.0, conf_low = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == 1)
            conf_high += scores[i];
        else
            conf_low += 1.0 - scores[i];
    }
    return conf_high / high > conf_low / low ? 1 : 0;
}

double aggregate_video_score(const std::vector<double>& scores) {
    if (scores.empty()) throw EmptyScores("no chunk scores to aggregate");
    return std::accumulate(scores.begin(), scores.end(), 0.0) / scores.size();
}

std::vector<double> fuse_scores(const std::vector<double>& p_kin,
                                const std::vector<double>& p_au, double alpha) {
    if (p_kin.size() != p_au.size())
        throw LengthMismatch("fusion inputs differ in length");
    std::vector<double> fused(p_kin.size());
    for (std::size_t i = 0; i < fused.size(); ++i)
        fused[i] = alpha * p_kin[i] + (1.0 - alpha) * p_au[i];
    return fused;
}

FusionResult fuse_decisions(const std::vector<double>& p_kin, const std::vector<double>& p_au,
                            const std::vector<double>& reference, Task mode) {
    if (p_kin.size() != p_au.size() || p_kin.size() != reference.size())
        throw LengthMismatch("fusion inputs and reference differ in length");
    if (p_kin.empty()) throw EmptyScores("nothing to fuse");

    FusionResult best;
    best.metric = -std::numeric_limits<double>::infinity();
    for (int grid = 0; grid <= 100; ++grid) {
        const double alpha = grid / 100.0;
        std::vector<double> fused = fuse_scores(p_kin, p_au, alpha);
        double metric;
        if (mode == Task::Regression) {
            metric = pearson(fused, reference);
        } else {
            std::vector<double> labels(fused.size());
            for (std::size_t i = 0; i < fused.size(); ++i)
                labels[i] = fused[i] >= 0.5 ? 1.0 : 0.0;
            metric = eval_metrics(labels, reference, Task::Classification).f1.mean;
        }
        if (metric > best.metric) {
            best.metric = metric;
            best.alpha = alpha;
            best.fused = std::move(fused);
        }
    }
    return best;
}

ExplainReport percentile_explain(const std::vector<EncodedVideo>& corpus,
                                 const std::string& trait, int kineme_count,
                                 double percentile) {
    if (corpus.size() < 10)
        throw TooFewVideos("percentile explanation needs at least 10 videos, got " +
                           std::to_string(corpus.size()));
    if (percentile <= 0.0 || percentile >= 50.0)
        throw DataError("percentile must lie in (0, 50)");

    std::vector<double> scores;
    scores.reserve(corpus.size());
    for (const auto& v : corpus) scores.push_back(v.score);
    std::sort(scores.begin(), scores.end());
    const double lo_cut = quantile_linear(scores, percentile / 100.0);
    const double hi_cut = quantile_linear(scores, 1.0 - percentile / 100.0);

    std::vector<const EncodedVideo*> top, bottom;
    for (const auto& v : corpus) {
        if (v.score >= hi_cut) top.push_back(&v);
        if (v.score <= lo_cut) bottom.push_back(&v);
    }
    ExplainReport report;
    report.high = explain_set(top, trait, true, kineme_count);
    report.low = explain_set(bottom, trait, false, kineme_count);
    return report;
}

PcaRegression pca_linreg_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             double variance_threshold) {
    const Eigen::Index n = x.rows();
    const Eigen::Index d = x.cols();
    if (n < 2) throw DataError("pca regression needs at least 2 training rows");
    if (y.size() != n) throw LengthMismatch("feature rows and targets differ in length");

    PcaRegression model;
    model.feature_mean = x.colwise().mean();
    const Eigen::MatrixXd centered = x.rowwise() - model.feature_mean.transpose();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd sv = svd.singularValues();
    const double total = sv.array().square().sum();
    if (total <= 0.0) throw DegenerateCovariance("all features are constant");

    double cum = 0.0;
    Eigen::Index m = 0;
    while (m < sv.size()) {
        cum += sv(m) * sv(m);
        ++m;
        if (cum / total >= variance_threshold - 1e-12) break;
    }
    model.retained = static_cast<int>(m);
    model.explained = cum / total;
    model.components = svd.matrixV().leftCols(m);

    Eigen::MatrixXd design(n, m + 1);
    design.leftCols(m) = centered * model.components;
    design.col(m).setOnes();
    const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(y);
    model.coef = beta.head(m);
    model.intercept = beta(m);
    (void)d;
    return model;
}

Eigen::VectorXd pca_linreg_predict(const PcaRegression& model, const Eigen::MatrixXd& x) {
    if (x.cols() != model.feature_mean.size())
        throw DimensionMismatch("feature width " + std::to_string(x.cols()) +
                                " does not match training width " +
                                std::to_string(model.feature_mean.size()));
    const Eigen::MatrixXd centered = x.rowwise() - model.feature_mean.transpose();
    return (centered * model.components) * model.coef +
           Eigen::VectorXd::Constant(x.rows(), model.intercept);
}

Eigen::VectorXd pca_linreg(const Eigen::MatrixXd& x_train, const Eigen::VectorXd& y_train,
                           const Eigen::MatrixXd& x_test, double variance_threshold) {
    return pca_linreg_predict(pca_linreg_fit(x_train, y_train, variance_threshold), x_test);
}

}  // namespace kineme
