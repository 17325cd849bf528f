#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "kineme/errors.h"

namespace kineme {

enum class HeadType {
    Classification,  // 2 sigmoid outputs, argmax decides the label
    Regression,      // 1 linear output
};

enum class LossType {
    BinaryCrossEntropy,  // classification head only
    MeanAbsoluteError,   // regression head only
};

/// Single-hidden-layer LSTM with one branch per modality (kineme one-hot,
/// AU binary). Final hidden states are concatenated and fed to a dense head.
struct SeqNet {
    /// Gate blocks stacked along rows in the order input, forget, candidate,
    /// output.
    struct Branch {
        int input_width = 0;
        int hidden_width = 0;
        Eigen::MatrixXd wx;  // 4h x input_width
        Eigen::MatrixXd wh;  // 4h x hidden_width
        Eigen::VectorXd b;   // 4h
    };

    std::vector<Branch> branches;  // one or two
    Eigen::MatrixXd head_w;        // outputs x merged width
    Eigen::VectorXd head_b;
    HeadType head = HeadType::Classification;
    double dropout = 0.2;

    int merged_width() const;
    int outputs() const { return head == HeadType::Classification ? 2 : 1; }
};

/// Builds a net with seeded Glorot-uniform weights, zero biases and
/// forget-gate bias 1.
SeqNet make_seqnet(const std::vector<int>& input_widths, int hidden_width, HeadType head,
                   double dropout, std::uint64_t seed);

/// One training example: per-branch input matrices (width x windows) plus the
/// target (score in [0,1] for regression, 0/1 label for classification).
struct SeqSample {
    std::vector<Eigen::MatrixXd> inputs;
    double target = 0.0;
};

/// Head outputs for one sample: sigmoid activations (classification) or the
/// raw linear value (regression). Fusion nets require equal window counts
/// across branches.
Eigen::VectorXd seqnet_forward(const SeqNet& net, const std::vector<Eigen::MatrixXd>& inputs);

/// P(high) for classification nets (the positive neuron), the linear output
/// for regression nets.
double seqnet_score(const SeqNet& net, const std::vector<Eigen::MatrixXd>& inputs);

/// Loss of one sample under the given loss type, no dropout.
double seqnet_loss(const SeqNet& net, const SeqSample& sample, LossType loss);

/// Analytic parameter gradients of seqnet_loss for one sample, shaped like the
/// net itself (dropout off). Used by training and by the finite-difference
/// checks.
SeqNet seqnet_gradients(const SeqNet& net, const SeqSample& sample, LossType loss);

struct TrainConfig {
    LossType loss = LossType::BinaryCrossEntropy;
    int epochs = 100;
    int batch_size = 32;
    int patience = 10;  // early-stopping patience on validation loss
    double learning_rate = 0.01;
    std::uint64_t seed = 0;
};

struct TrainTrace {
    std::vector<double> train_loss;  // mean sample loss per epoch, dropout off
    std::vector<double> val_loss;    // empty when no validation set given
    int best_epoch = -1;             // epoch whose parameters were kept
};

/// Mini-batch BPTT with Adam. Dropout (inverted scaling) is applied to the
/// merged recurrent output during training only. When a validation set is
/// given, training stops after `patience` epochs without improvement and the
/// best parameters are restored. Deterministic for a fixed seed.
TrainTrace seqnet_train(SeqNet& net, const std::vector<SeqSample>& train,
                        const std::vector<SeqSample>& validation, const TrainConfig& cfg);

/// Named views over every parameter tensor, in a stable order.
struct TensorRef {
    std::string name;
    double* data = nullptr;
    Eigen::Index size = 0;
};
std::vector<TensorRef> seqnet_params(SeqNet& net);

}  // namespace kineme
