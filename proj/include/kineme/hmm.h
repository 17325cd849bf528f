#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "kineme/codebook.h"
#include "kineme/errors.h"

namespace kineme {

/// Discrete-emission hidden Markov model over kineme symbols.
struct DiscreteHMM {
    Eigen::VectorXd initial;      // n, simplex
    Eigen::MatrixXd transitions;  // n x n, row-stochastic
    Eigen::MatrixXd emissions;    // n x K, row-stochastic
    std::vector<double> log_likelihood_trace;  // corpus log-likelihood per BW iteration

    int states() const { return static_cast<int>(initial.size()); }
    int symbols() const { return static_cast<int>(emissions.cols()); }
};

struct HmmOptions {
    int max_iters = 100;
    double rel_tol = 1e-6;
    std::uint64_t seed = 0;
    // Laplace mass added to emission rows after fitting so unseen test symbols
    // never score -inf. Set 0 for the exact maximum-likelihood solution.
    double emission_smoothing = 1e-3;
};

/// Baum-Welch over a corpus of kineme sequences (scaled forward-backward).
/// Corpus log-likelihood is non-decreasing across iterations. Deterministic
/// for a fixed seed.
DiscreteHMM hmm_fit(const std::vector<KinemeSequence>& sequences, int n_states, int n_symbols,
                    const HmmOptions& opts = {});

/// Scaled-forward log-likelihood of one sequence; -inf when the sequence
/// contains a symbol no state can emit. An empty sequence scores 0.
double hmm_loglik(const DiscreteHMM& model, const KinemeSequence& seq);

/// Maximum-likelihood class decision between two per-class models.
/// Returns 1 for the positive model, 0 otherwise; ties go to the negative
/// class.
int hmm_classify(const DiscreteHMM& negative, const DiscreteHMM& positive,
                 const KinemeSequence& seq);

}  // namespace kineme
