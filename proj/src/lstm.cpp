#include "kineme/lstm.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace kineme {

namespace {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct BranchCache {
    Eigen::MatrixXd i, f, g, o;  // gate activations, h x T
    Eigen::MatrixXd c, h;        // cell and hidden states, h x T
    Eigen::MatrixXd tanh_c;      // tanh(c), h x T
};

void check_inputs(const SeqNet& net, const std::vector<Eigen::MatrixXd>& inputs) {
    if (inputs.size() != net.branches.size())
        throw WidthMismatch("expected " + std::to_string(net.branches.size()) +
                            " input streams, got " + std::to_string(inputs.size()));
    Eigen::Index t_len = -1;
    for (std::size_t b = 0; b < inputs.size(); ++b) {
        if (inputs[b].rows() != net.branches[b].input_width)
            throw WidthMismatch("branch " + std::to_string(b) + " expects width " +
                                std::to_string(net.branches[b].input_width) + ", got " +
                                std::to_string(inputs[b].rows()));
        if (inputs[b].cols() < 1) throw DataError("empty input sequence");
        if (t_len < 0)
            t_len = inputs[b].cols();
        else if (inputs[b].cols() != t_len)
            throw LengthMismatch("fusion branches need equal window counts: " +
                                 std::to_string(t_len) + " vs " +
                                 std::to_string(inputs[b].cols()));
    }
}

BranchCache run_branch(const SeqNet::Branch& br, const Eigen::MatrixXd& x) {
    const int h = br.hidden_width;
    const Eigen::Index t_len = x.cols();
    BranchCache cache;
    cache.i.resize(h, t_len);
    cache.f.resize(h, t_len);
    cache.g.resize(h, t_len);
    cache.o.resize(h, t_len);
    cache.c.resize(h, t_len);
    cache.h.resize(h, t_len);
    cache.tanh_c.resize(h, t_len);

    Eigen::VectorXd h_prev = Eigen::VectorXd::Zero(h);
    Eigen::VectorXd c_prev = Eigen::VectorXd::Zero(h);
    for (Eigen::Index t = 0; t < t_len; ++t) {
        const Eigen::VectorXd pre = br.wx * x.col(t) + br.wh * h_prev + br.b;
        for (int u = 0; u < h; ++u) {
            cache.i(u, t) = sigmoid(pre(u));
            cache.f(u, t) = sigmoid(pre(h + u));
            cache.g(u, t) = std::tanh(pre(2 * h + u));
            cache.o(u, t) = sigmoid(pre(3 * h + u));
        }
        cache.c.col(t) = cache.f.col(t).cwiseProduct(c_prev) +
                         cache.i.col(t).cwiseProduct(cache.g.col(t));
        cache.tanh_c.col(t) = cache.c.col(t).array().tanh();
        cache.h.col(t) = cache.o.col(t).cwiseProduct(cache.tanh_c.col(t));
        h_prev = cache.h.col(t);
        c_prev = cache.c.col(t);
    }
    return cache;
}

// Backprop through one branch. d_h_last is the gradient at the final hidden
// state; parameter gradients are accumulated into `grad`.
void backprop_branch(const SeqNet::Branch& br, const Eigen::MatrixXd& x,
                     const BranchCache& cache, const Eigen::VectorXd& d_h_last,
                     SeqNet::Branch& grad) {
    const int h = br.hidden_width;
    const Eigen::Index t_len = x.cols();
    Eigen::VectorXd dh = d_h_last;
    Eigen::VectorXd dc = Eigen::VectorXd::Zero(h);
    Eigen::VectorXd dpre(4 * h);
    for (Eigen::Index t = t_len - 1; t >= 0; --t) {
        const auto i = cache.i.col(t);
        const auto f = cache.f.col(t);
        const auto g = cache.g.col(t);
        const auto o = cache.o.col(t);
        const auto tc = cache.tanh_c.col(t);
        dc += dh.cwiseProduct(o).cwiseProduct(
            (1.0 - tc.array().square()).matrix());
        const Eigen::VectorXd c_prev =
            t > 0 ? cache.c.col(t - 1).eval() : Eigen::VectorXd::Zero(h).eval();
        const Eigen::VectorXd di = dc.cwiseProduct(g);
        const Eigen::VectorXd df = dc.cwiseProduct(c_prev);
        const Eigen::VectorXd dg = dc.cwiseProduct(i);
        const Eigen::VectorXd dout = dh.cwiseProduct(tc);
        dpre.segment(0, h) = di.cwiseProduct(i).cwiseProduct((1.0 - i.array()).matrix());
        dpre.segment(h, h) = df.cwiseProduct(f).cwiseProduct((1.0 - f.array()).matrix());
        dpre.segment(2 * h, h) = dg.cwiseProduct((1.0 - g.array().square()).matrix());
        dpre.segment(3 * h, h) = dout.cwiseProduct(o).cwiseProduct((1.0 - o.array()).matrix());

        grad.wx += dpre * x.col(t).transpose();
        if (t > 0) grad.wh += dpre * cache.h.col(t - 1).transpose();
        grad.b += dpre;

        dh = br.wh.transpose() * dpre;
        dc = dc.cwiseProduct(f);
    }
}

SeqNet zeros_like(const SeqNet& net) {
    SeqNet z = net;
    for (auto& br : z.branches) {
        br.wx.setZero();
        br.wh.setZero();
        br.b.setZero();
    }
    z.head_w.setZero();
    z.head_b.setZero();
    return z;
}

// Loss and gradient accumulation for one sample. `drop_mask` (merged width)
// carries the inverted-dropout factors, or null for no dropout.
double loss_and_grad(const SeqNet& net, const SeqSample& sample, LossType loss,
                     const Eigen::VectorXd* drop_mask, SeqNet* grad) {
    check_inputs(net, sample.inputs);
    std::vector<BranchCache> caches;
    caches.reserve(net.branches.size());
    Eigen::VectorXd merged(net.merged_width());
    Eigen::Index at = 0;
    for (std::size_t b = 0; b < net.branches.size(); ++b) {
        caches.push_back(run_branch(net.branches[b], sample.inputs[b]));
        const auto& hcol = caches[b].h.col(sample.inputs[b].cols() - 1);
        merged.segment(at, hcol.size()) = hcol;
        at += hcol.size();
    }
    Eigen::VectorXd z = merged;
    if (drop_mask) z = z.cwiseProduct(*drop_mask);

    const Eigen::VectorXd logits = net.head_w * z + net.head_b;
    double value = 0.0;
    Eigen::VectorXd dlogits(logits.size());
    if (loss == LossType::BinaryCrossEntropy) {
        // Targets one-hot over (low, high); BCE summed over the two outputs.
        Eigen::Vector2d target(sample.target > 0.5 ? 0.0 : 1.0,
                               sample.target > 0.5 ? 1.0 : 0.0);
        for (Eigen::Index j = 0; j < logits.size(); ++j) {
            const double y = sigmoid(logits(j));
            const double yc = std::clamp(y, 1e-12, 1.0 - 1e-12);
            value -= target(j) * std::log(yc) + (1.0 - target(j)) * std::log(1.0 - yc);
            dlogits(j) = y - target(j);
        }
    } else {
        const double y = logits(0);
        value = std::abs(y - sample.target);
        dlogits(0) = y > sample.target ? 1.0 : (y < sample.target ? -1.0 : 0.0);
    }
    if (!grad) return value;

    grad->head_w += dlogits * z.transpose();
    grad->head_b += dlogits;
    Eigen::VectorXd dz = net.head_w.transpose() * dlogits;
    if (drop_mask) dz = dz.cwiseProduct(*drop_mask);
    at = 0;
    for (std::size_t b = 0; b < net.branches.size(); ++b) {
        const int h = net.branches[b].hidden_width;
        backprop_branch(net.branches[b], sample.inputs[b], caches[b], dz.segment(at, h),
                        grad->branches[b]);
        at += h;
    }
    return value;
}

void check_loss_head(const SeqNet& net, LossType loss) {
    const bool bce = loss == LossType::BinaryCrossEntropy;
    if (bce != (net.head == HeadType::Classification))
        throw LossHeadMismatch(bce ? "binary cross-entropy needs a classification head"
                                   : "mean absolute error needs a regression head");
}

}  // namespace

int SeqNet::merged_width() const {
    int w = 0;
    for (const auto& br : branches) w += br.hidden_width;
    return w;
}

SeqNet make_seqnet(const std::vector<int>& input_widths, int hidden_width, HeadType head,
                   double dropout, std::uint64_t seed) {
    if (input_widths.empty() || input_widths.size() > 2)
        throw DataError("seqnet supports one or two branches");
    if (hidden_width < 1) throw DataError("hidden width must be >= 1");
    if (dropout < 0.0 || dropout >= 1.0) throw DataError("dropout outside [0,1)");

    std::mt19937_64 rng(seed);
    auto glorot = [&](Eigen::MatrixXd& m, int fan_in, int fan_out) {
        const double a = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> u(-a, a);
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = u(rng);
    };

    SeqNet net;
    net.head = head;
    net.dropout = dropout;
    for (int in : input_widths) {
        if (in < 1) throw DataError("input width must be >= 1");
        SeqNet::Branch br;
        br.input_width = in;
        br.hidden_width = hidden_width;
        br.wx.resize(4 * hidden_width, in);
        br.wh.resize(4 * hidden_width, hidden_width);
        br.b = Eigen::VectorXd::Zero(4 * hidden_width);
        br.b.segment(hidden_width, hidden_width).setOnes();  // forget-gate bias
        glorot(br.wx, in, hidden_width);
        glorot(br.wh, hidden_width, hidden_width);
        net.branches.push_back(std::move(br));
    }
    const int merged = net.merged_width();
    net.head_w.resize(net.outputs(), merged);
    net.head_b = Eigen::VectorXd::Zero(net.outputs());
    glorot(net.head_w, merged, net.outputs());
    return net;
}

Eigen::VectorXd seqnet_forward(const SeqNet& net, const std::vector<Eigen::MatrixXd>& inputs) {
    check_inputs(net, inputs);
    Eigen::VectorXd merged(net.merged_width());
    Eigen::Index at = 0;
    for (std::size_t b = 0; b < net.branches.size(); ++b) {
        const BranchCache cache = run_branch(net.branches[b], inputs[b]);
        const auto& hcol = cache.h.col(inputs[b].cols() - 1);
        merged.segment(at, hcol.size()) = hcol;
        at += hcol.size();
    }
    Eigen::VectorXd out = net.head_w * merged + net.head_b;
    if (net.head == HeadType::Classification)
        for (Eigen::Index j = 0; j < out.size(); ++j) out(j) = sigmoid(out(j));
    return out;
}

double seqnet_score(const SeqNet& net, const std::vector<Eigen::MatrixXd>& inputs) {
    const Eigen::VectorXd out = seqnet_forward(net, inputs);
    return net.head == HeadType::Classification ? out(1) : out(0);
}

double seqnet_loss(const SeqNet& net, const SeqSample& sample, LossType loss) {
    check_loss_head(net, loss);
    return loss_and_grad(net, sample, loss, nullptr, nullptr);
}

SeqNet seqnet_gradients(const SeqNet& net, const SeqSample& sample, LossType loss) {
    check_loss_head(net, loss);
    SeqNet grad = zeros_like(net);
    loss_and_grad(net, sample, loss, nullptr, &grad);
    return grad;
}

std::vector<TensorRef> seqnet_params(SeqNet& net) {
    std::vector<TensorRef> refs;
    for (std::size_t b = 0; b < net.branches.size(); ++b) {
        auto& br = net.branches[b];
        const std::string p = "branch" + std::to_string(b) + ".";
        refs.push_back({p + "wx", br.wx.data(), br.wx.size()});
        refs.push_back({p + "wh", br.wh.data(), br.wh.size()});
        refs.push_back({p + "b", br.b.data(), br.b.size()});
    }
    refs.push_back({"head_w", net.head_w.data(), net.head_w.size()});
    refs.push_back({"head_b", net.head_b.data(), net.head_b.size()});
    return refs;
}

TrainTrace seqnet_train(SeqNet& net, const std::vector<SeqSample>& train,
                        const std::vector<SeqSample>& validation, const TrainConfig& cfg) {
    check_loss_head(net, cfg.loss);
    if (train.empty()) throw EmptyCorpus("no training samples");
    if (cfg.epochs < 1 || cfg.batch_size < 1)
        throw DataError("epochs and batch size must be positive");
    for (const auto& s : train) {
        if (cfg.loss == LossType::BinaryCrossEntropy) {
            if (s.target != 0.0 && s.target != 1.0)
                throw DataError("classification targets must be 0 or 1");
        } else if (s.target < 0.0 || s.target > 1.0) {
            throw DataError("regression targets must lie in [0,1]");
        }
    }

    std::mt19937_64 rng(cfg.seed);
    std::bernoulli_distribution keep(1.0 - net.dropout);

    // Adam state, one slot per parameter tensor.
    std::vector<TensorRef> params = seqnet_params(net);
    std::vector<Eigen::VectorXd> m1(params.size()), m2(params.size());
    for (std::size_t p = 0; p < params.size(); ++p) {
        m1[p] = Eigen::VectorXd::Zero(params[p].size);
        m2[p] = Eigen::VectorXd::Zero(params[p].size);
    }
    constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
    long step = 0;

    auto mean_loss = [&](const std::vector<SeqSample>& set) {
        double sum = 0.0;
        for (const auto& s : set) sum += loss_and_grad(net, s, cfg.loss, nullptr, nullptr);
        return sum / static_cast<double>(set.size());
    };

    TrainTrace trace;
    SeqNet best = net;
    double best_val = std::numeric_limits<double>::infinity();
    int since_best = 0;

    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            SeqNet grad = zeros_like(net);
            for (std::size_t idx = start; idx < stop; ++idx) {
                const SeqSample& s = train[order[idx]];
                if (net.dropout > 0.0) {
                    Eigen::VectorXd mask(net.merged_width());
                    const double scale = 1.0 / (1.0 - net.dropout);
                    for (Eigen::Index u = 0; u < mask.size(); ++u)
                        mask(u) = keep(rng) ? scale : 0.0;
                    loss_and_grad(net, s, cfg.loss, &mask, &grad);
                } else {
                    loss_and_grad(net, s, cfg.loss, nullptr, &grad);
                }
            }
            const double inv = 1.0 / static_cast<double>(stop - start);
            std::vector<TensorRef> grefs = seqnet_params(grad);
            ++step;
            const double bc1 = 1.0 - std::pow(kBeta1, step);
            const double bc2 = 1.0 - std::pow(kBeta2, step);
            for (std::size_t p = 0; p < params.size(); ++p) {
                Eigen::Map<Eigen::VectorXd> w(params[p].data, params[p].size);
                Eigen::Map<Eigen::VectorXd> gmap(grefs[p].data, grefs[p].size);
                const Eigen::VectorXd g = gmap * inv;
                m1[p] = kBeta1 * m1[p] + (1.0 - kBeta1) * g;
                m2[p] = kBeta2 * m2[p] + (1.0 - kBeta2) * g.cwiseProduct(g);
                w.array() -= cfg.learning_rate * (m1[p].array() / bc1) /
                             ((m2[p].array() / bc2).sqrt() + kEps);
            }
        }

        trace.train_loss.push_back(mean_loss(train));
        if (!validation.empty()) {
            const double vl = mean_loss(validation);
            trace.val_loss.push_back(vl);
            if (vl < best_val) {
                best_val = vl;
                best = net;
                trace.best_epoch = epoch;
                since_best = 0;
            } else if (++since_best >= cfg.patience) {
                break;
            }
        } else {
            trace.best_epoch = epoch;
        }
    }
    if (!validation.empty()) net = best;
    return trace;
}

}  // namespace kineme
