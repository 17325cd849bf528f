#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "kineme/action_units.h"
#include "kineme/codebook.h"
#include "kineme/errors.h"

namespace kineme {

enum class Task {
    Regression,
    Classification,
};

/// Continuous trait scores with their median-threshold binarization.
/// Label 1 = High (score strictly above the median), 0 = Low.
struct TraitLabels {
    std::string trait;
    double median = 0.0;
    std::vector<double> scores;
    std::vector<int> labels;
};

/// Median of the given scores (average of the two middle order statistics for
/// even counts). The median should be computed on the training split and
/// reused for test videos via apply_threshold.
TraitLabels binarize_median(const std::vector<double>& scores, const std::string& trait = "");
std::vector<int> apply_threshold(const std::vector<double>& scores, double median);

/// One evaluation plus the mean/std aggregation shape used for CV summaries.
struct Stat {
    double mean = 0.0;
    double std = 0.0;
};

struct MetricsReport {
    Task task = Task::Regression;
    int n_runs = 0;
    Stat acc_reg;  // 1 - MAE
    Stat pcc;      // Pearson correlation
    Stat acc_cls;
    Stat f1;               // positive class = High
    bool pcc_degenerate = false;  // some run had a zero-variance side (pcc set to 0)
};

/// Regression: acc = 1 - mean|pred - gt| and PCC, inputs in [0,1].
/// Classification: values are 0/1 labels; accuracy and F1 with High positive.
MetricsReport eval_metrics(const std::vector<double>& predictions,
                           const std::vector<double>& ground_truth, Task task);

/// Mean +- std (population) over single-run reports of the same task.
MetricsReport aggregate_reports(const std::vector<MetricsReport>& runs);

/// Pearson correlation; 0 with `degenerate` set when either side has zero
/// variance.
double pearson(const std::vector<double>& x, const std::vector<double>& y,
               bool* degenerate = nullptr);

/// Majority vote over chunk labels; ties go to the side whose chunks carry the
/// higher mean confidence (score for High voters, 1-score for Low voters),
/// then to Low. `scores` are the per-chunk P(high).
int aggregate_video_label(const std::vector<int>& labels, const std::vector<double>& scores);

/// Mean of the chunk scores (continuous analogue of majority voting).
double aggregate_video_score(const std::vector<double>& scores);

// --- decision fusion ---

struct FusionResult {
    double alpha = 0.0;  // on the {0.00, 0.01, ..., 1.00} grid
    std::vector<double> fused;
    double metric = 0.0;  // selection metric value at alpha
};

std::vector<double> fuse_scores(const std::vector<double>& p_kin,
                                const std::vector<double>& p_au, double alpha);

/// Grid search alpha in steps of 0.01 maximizing PCC (regression, reference =
/// scores) or F1 (classification, reference = 0/1 labels, fused thresholded at
/// 0.5). Ties resolve to the smallest alpha.
FusionResult fuse_decisions(const std::vector<double>& p_kin, const std::vector<double>& p_au,
                            const std::vector<double>& reference, Task mode);

// --- percentile explanations ---

/// One encoded video of the explanation corpus.
struct EncodedVideo {
    std::string video_id;
    double score = 0.0;
    KinemeSequence kin;
    AUSequence aus;
};

struct ExplainEntry {
    int symbol = 0;  // kineme index, or FACS AU number for AU rows
    long count = 0;
};

struct ExplainRow {
    std::string trait;
    bool high = false;
    std::vector<ExplainEntry> kinemes;  // top 4 by frequency, non-increasing
    std::vector<ExplainEntry> aus;      // top 5 by frequency, non-increasing
    long kineme_windows = 0;            // window count of the selected set
    long au_windows = 0;
    int n_videos = 0;
};

struct ExplainReport {
    ExplainRow high;
    ExplainRow low;
};

/// Top/bottom percentile sets by trait score (linear-interpolation quantile),
/// symbol histograms over all windows of each set, ranked descending with
/// stable index tie-break.
ExplainReport percentile_explain(const std::vector<EncodedVideo>& corpus,
                                 const std::string& trait, int kineme_count,
                                 double percentile = 10.0);

// --- PCA + linear regression baseline ---

struct PcaRegression {
    Eigen::VectorXd feature_mean;
    Eigen::MatrixXd components;  // d x m, orthonormal columns
    Eigen::VectorXd coef;        // m
    double intercept = 0.0;
    int retained = 0;
    double explained = 0.0;  // cumulative variance ratio of the retained set
};

/// Keeps the minimal leading principal components whose cumulative variance
/// ratio reaches `variance_threshold`, then ordinary least squares in
/// component space. Rows of `x` are samples.
PcaRegression pca_linreg_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             double variance_threshold = 0.90);
Eigen::VectorXd pca_linreg_predict(const PcaRegression& model, const Eigen::MatrixXd& x);

/// Fit on train, predict for test.
Eigen::VectorXd pca_linreg(const Eigen::MatrixXd& x_train, const Eigen::VectorXd& y_train,
                           const Eigen::MatrixXd& x_test, double variance_threshold = 0.90);

}  // namespace kineme
