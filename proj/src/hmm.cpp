#include "kineme/hmm.h"

#include <cmath>
#include <limits>
#include <random>

namespace kineme {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_symbols(const std::vector<KinemeSequence>& sequences, int n_symbols) {
    for (const auto& seq : sequences)
        for (int s : seq.symbols)
            if (s < 1 || s > n_symbols)
                throw SymbolOutOfRange("symbol " + std::to_string(s) + " outside [1, " +
                                       std::to_string(n_symbols) + "] in '" + seq.video_id +
                                       "'");
}

Eigen::MatrixXd random_stochastic(Eigen::Index rows, Eigen::Index cols,
                                  std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.1, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < cols; ++j) sum += (m(i, j) = unit(rng));
        m.row(i) /= sum;
    }
    return m;
}

struct ForwardResult {
    Eigen::MatrixXd alpha;   // n x T, scaled
    Eigen::VectorXd scales;  // T
    double loglik = 0.0;
};

bool scaled_forward(const DiscreteHMM& m, const std::vector<int>& obs, ForwardResult& fr) {
    const int n = m.states();
    const int t_len = static_cast<int>(obs.size());
    fr.alpha.resize(n, t_len);
    fr.scales.resize(t_len);
    fr.loglik = 0.0;

    fr.alpha.col(0) = m.initial.cwiseProduct(m.emissions.col(obs[0]));
    for (int t = 0; t < t_len; ++t) {
        if (t > 0)
            fr.alpha.col(t) = (m.transitions.transpose() * fr.alpha.col(t - 1))
                                  .cwiseProduct(m.emissions.col(obs[t]));
        const double s = fr.alpha.col(t).sum();
        if (!(s > 0.0)) return false;  // impossible observation
        fr.alpha.col(t) /= s;
        fr.scales(t) = s;
        fr.loglik += std::log(s);
    }
    return true;
}

}  // namespace

DiscreteHMM hmm_fit(const std::vector<KinemeSequence>& sequences, int n_states, int n_symbols,
                    const HmmOptions& opts) {
    if (n_states < 1) throw DataError("hmm needs at least one state");
    if (n_symbols < 1) throw DataError("hmm needs at least one symbol");
    std::size_t total_obs = 0;
    for (const auto& s : sequences) total_obs += s.symbols.size();
    if (sequences.empty() || total_obs == 0) throw EmptyCorpus("no observations to fit");
    check_symbols(sequences, n_symbols);

    std::mt19937_64 rng(opts.seed);
    DiscreteHMM m;
    m.initial = random_stochastic(1, n_states, rng).row(0);
    m.transitions = random_stochastic(n_states, n_states, rng);
    m.emissions = random_stochastic(n_states, n_symbols, rng);

    const int n = n_states;
    double prev_ll = kNegInf;
    for (int it = 0; it < opts.max_iters; ++it) {
        Eigen::VectorXd init_acc = Eigen::VectorXd::Zero(n);
        Eigen::MatrixXd trans_num = Eigen::MatrixXd::Zero(n, n);
        Eigen::VectorXd trans_den = Eigen::VectorXd::Zero(n);
        Eigen::MatrixXd emit_num = Eigen::MatrixXd::Zero(n, n_symbols);
        Eigen::VectorXd emit_den = Eigen::VectorXd::Zero(n);
        double ll = 0.0;
        int used_sequences = 0;

        for (const auto& seq : sequences) {
            if (seq.symbols.empty()) continue;
            std::vector<int> obs(seq.symbols.size());
            for (std::size_t i = 0; i < obs.size(); ++i) obs[i] = seq.symbols[i] - 1;
            const int t_len = static_cast<int>(obs.size());

            ForwardResult fr;
            if (!scaled_forward(m, obs, fr))
                throw NumericalError("zero-probability observation during Baum-Welch");
            ll += fr.loglik;
            ++used_sequences;

            // Scaled backward: beta_hat(T-1) = 1, divide by the forward scales.
            Eigen::MatrixXd beta(n, t_len);
            beta.col(t_len - 1).setOnes();
            for (int t = t_len - 2; t >= 0; --t)
                beta.col(t) = (m.transitions *
                               m.emissions.col(obs[t + 1]).cwiseProduct(beta.col(t + 1))) /
                              fr.scales(t + 1);

            // Gamma: with this scaling alpha_hat .* beta_hat already sums to 1.
            for (int t = 0; t < t_len; ++t) {
                Eigen::VectorXd gamma = fr.alpha.col(t).cwiseProduct(beta.col(t));
                gamma /= gamma.sum();
                if (t == 0) init_acc += gamma;
                emit_num.col(obs[t]) += gamma;
                emit_den += gamma;
                if (t + 1 < t_len) trans_den += gamma;
            }
            for (int t = 0; t + 1 < t_len; ++t) {
                const Eigen::VectorXd right =
                    m.emissions.col(obs[t + 1]).cwiseProduct(beta.col(t + 1)) /
                    fr.scales(t + 1);
                trans_num += (fr.alpha.col(t) * right.transpose()).cwiseProduct(m.transitions);
            }
        }

        m.log_likelihood_trace.push_back(ll);
        m.initial = init_acc / used_sequences;
        for (int i = 0; i < n; ++i) {
            if (trans_den(i) > 0.0) m.transitions.row(i) = trans_num.row(i) / trans_den(i);
            if (emit_den(i) > 0.0) m.emissions.row(i) = emit_num.row(i) / emit_den(i);
        }

        if (std::isfinite(prev_ll) && std::abs(ll - prev_ll) < opts.rel_tol * std::abs(prev_ll))
            break;
        prev_ll = ll;
    }

    if (opts.emission_smoothing > 0.0) {
        m.emissions.array() += opts.emission_smoothing;
        for (int i = 0; i < n; ++i) m.emissions.row(i) /= m.emissions.row(i).sum();
    }
    return m;
}

double hmm_loglik(const DiscreteHMM& model, const KinemeSequence& seq) {
    if (seq.symbols.empty()) return 0.0;
    std::vector<int> obs(seq.symbols.size());
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const int s = seq.symbols[i];
        if (s < 1 || s > model.symbols())
            throw SymbolOutOfRange("symbol " + std::to_string(s) + " outside [1, " +
                                   std::to_string(model.symbols()) + "]");
        obs[i] = s - 1;
    }
    ForwardResult fr;
    if (!scaled_forward(model, obs, fr)) return kNegInf;
    return fr.loglik;
}

int hmm_classify(const DiscreteHMM& negative, const DiscreteHMM& positive,
                 const KinemeSequence& seq) {
    const double ll_neg = hmm_loglik(negative, seq);
    const double ll_pos = hmm_loglik(positive, seq);
    return ll_pos > ll_neg ? 1 : 0;
}

}  // namespace kineme
