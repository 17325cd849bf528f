#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.h"
#include "kineme/lstm.h"

using namespace kineme;

namespace {

SeqSample random_sample(const std::vector<int>& widths, int t_len, double target,
                        std::uint64_t seed) {
    SeqSample s;
    for (std::size_t b = 0; b < widths.size(); ++b)
        s.inputs.push_back(testutil::random_gaussian(widths[b], t_len, seed + 17 * b));
    s.target = target;
    return s;
}

// Central finite differences against the analytic gradient, per tensor.
double max_gradcheck_error(SeqNet net, const SeqSample& sample, LossType loss) {
    const SeqNet analytic = seqnet_gradients(net, sample, loss);
    SeqNet analytic_copy = analytic;  // mutable for seqnet_params
    std::vector<TensorRef> params = seqnet_params(net);
    std::vector<TensorRef> grads = seqnet_params(analytic_copy);
    constexpr double kEps = 1e-4;
    double worst = 0.0;
    for (std::size_t p = 0; p < params.size(); ++p) {
        for (Eigen::Index i = 0; i < params[p].size; ++i) {
            const double saved = params[p].data[i];
            params[p].data[i] = saved + kEps;
            const double up = seqnet_loss(net, sample, loss);
            params[p].data[i] = saved - kEps;
            const double down = seqnet_loss(net, sample, loss);
            params[p].data[i] = saved;
            const double fd = (up - down) / (2.0 * kEps);
            const double an = grads[p].data[i];
            const double err = std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-4});
            worst = std::max(worst, err);
        }
    }
    return worst;
}

// Motif task: class 1 sequences contain the symbol pattern (2, 3, 2).
std::vector<SeqSample> motif_dataset(int count, int k, int t_len, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<int> sym(1, k);
    std::uniform_int_distribution<int> pos(0, t_len - 3);
    std::vector<SeqSample> out;
    for (int i = 0; i < count; ++i) {
        const int label = i % 2;
        std::vector<int> symbols(t_len);
        bool has_motif = true;
        do {
            for (int& s : symbols) s = sym(gen);
            has_motif = false;
            for (int t = 0; t + 2 < t_len; ++t)
                if (symbols[t] == 2 && symbols[t + 1] == 3 && symbols[t + 2] == 2)
                    has_motif = true;
        } while (label == 0 && has_motif);
        if (label == 1) {
            const int at = pos(gen);
            symbols[at] = 2;
            symbols[at + 1] = 3;
            symbols[at + 2] = 2;
        }
        SeqSample s;
        Eigen::MatrixXd one_hot = Eigen::MatrixXd::Zero(k, t_len);
        for (int t = 0; t < t_len; ++t) one_hot(symbols[t] - 1, t) = 1.0;
        s.inputs = {one_hot};
        s.target = label;
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

TEST_SUITE("lstm") {

TEST_CASE("analytic gradients match central finite differences") {
    SUBCASE("single branch, classification") {
        const SeqNet net = make_seqnet({3}, 4, HeadType::Classification, 0.0, 71);
        const SeqSample s = random_sample({3}, 6, 1.0, 72);
        CHECK(max_gradcheck_error(net, s, LossType::BinaryCrossEntropy) <= 1e-4);
    }
    SUBCASE("single branch, regression") {
        const SeqNet net = make_seqnet({3}, 4, HeadType::Regression, 0.0, 73);
        const SeqSample s = random_sample({3}, 6, 0.9, 74);
        CHECK(max_gradcheck_error(net, s, LossType::MeanAbsoluteError) <= 1e-4);
    }
    SUBCASE("fusion, classification") {
        const SeqNet net = make_seqnet({3, 5}, 4, HeadType::Classification, 0.0, 75);
        const SeqSample s = random_sample({3, 5}, 5, 0.0, 76);
        CHECK(max_gradcheck_error(net, s, LossType::BinaryCrossEntropy) <= 1e-4);
    }
    SUBCASE("fusion, regression") {
        const SeqNet net = make_seqnet({2, 3}, 3, HeadType::Regression, 0.0, 77);
        const SeqSample s = random_sample({2, 3}, 4, 0.8, 78);
        CHECK(max_gradcheck_error(net, s, LossType::MeanAbsoluteError) <= 1e-4);
    }
}

TEST_CASE("all-zero weights give 0.5 on both classification outputs") {
    SeqNet net = make_seqnet({4}, 3, HeadType::Classification, 0.0, 79);
    for (auto& br : net.branches) {
        br.wx.setZero();
        br.wh.setZero();
        br.b.setZero();
    }
    net.head_w.setZero();
    net.head_b.setZero();
    const Eigen::MatrixXd x = testutil::random_gaussian(4, 7, 80);
    const Eigen::VectorXd out = seqnet_forward(net, {x});
    CHECK(out(0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(out(1) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("zeroed recurrence reduces to a hand-computable map of the last input") {
    SeqNet net = make_seqnet({2}, 2, HeadType::Regression, 0.0, 81);
    auto& br = net.branches[0];
    br.wh.setZero();
    br.wx.setZero();
    br.b.setZero();
    // Candidate gate reads the input; forget gate is shut so the cell state
    // carries nothing across time.
    br.wx(4, 0) = 0.3;  // candidate block rows are [2h, 3h)
    br.wx(5, 1) = -0.4;
    br.b.segment(0, 2).setConstant(40.0);    // input gate ~ 1
    br.b.segment(2, 2).setConstant(-40.0);   // forget gate ~ 0  (rows [h,2h))
    br.b.segment(4, 2).setZero();            // candidate bias 0
    br.b.segment(6, 2).setConstant(40.0);    // output gate ~ 1
    net.head_w.setOnes();
    net.head_b.setConstant(0.25);

    Eigen::MatrixXd x(2, 3);
    x << 0.1, -0.2, 0.5, 0.3, 0.0, -0.6;
    const double c0 = std::tanh(0.3 * 0.5);
    const double c1 = std::tanh(-0.4 * -0.6);
    const double expected = std::tanh(c0) + std::tanh(c1) + 0.25;
    const Eigen::VectorXd out = seqnet_forward(net, {x});
    CHECK(out(0) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("fusion nets merge to 64 hidden units with paper hyperparameters") {
    const SeqNet net = make_seqnet({16, 17}, 32, HeadType::Classification, 0.2, 82);
    CHECK(net.merged_width() == 64);
    CHECK(net.branches[0].hidden_width == 32);
    CHECK(net.branches[1].hidden_width == 32);
    CHECK(net.dropout == 0.2);
    CHECK(net.head_w.cols() == 64);
    CHECK(net.outputs() == 2);
    const TrainConfig cfg;
    CHECK(cfg.learning_rate == 0.01);
}

TEST_CASE("training on one example decreases the loss monotonically") {
    SeqNet net = make_seqnet({4}, 6, HeadType::Classification, 0.0, 83);
    std::vector<SeqSample> data = {random_sample({4}, 5, 1.0, 84)};
    TrainConfig cfg;
    cfg.loss = LossType::BinaryCrossEntropy;
    cfg.epochs = 10;
    cfg.batch_size = 1;
    cfg.seed = 85;
    const TrainTrace trace = seqnet_train(net, data, {}, cfg);
    REQUIRE(trace.train_loss.size() == 10);
    for (std::size_t e = 1; e < trace.train_loss.size(); ++e)
        CHECK(trace.train_loss[e] < trace.train_loss[e - 1]);
}

TEST_CASE("planted motif classification reaches 0.9 held-out accuracy") {
    const int k = 16;
    std::vector<SeqSample> train = motif_dataset(160, k, 12, 86);
    std::vector<SeqSample> val = motif_dataset(40, k, 12, 87);
    std::vector<SeqSample> test = motif_dataset(50, k, 12, 88);

    SeqNet net = make_seqnet({k}, 32, HeadType::Classification, 0.2, 89);
    TrainConfig cfg;
    cfg.loss = LossType::BinaryCrossEntropy;
    cfg.epochs = 60;
    cfg.batch_size = 32;
    cfg.patience = 10;
    cfg.learning_rate = 0.01;
    cfg.seed = 90;
    seqnet_train(net, train, val, cfg);

    int correct = 0;
    for (const auto& s : test) {
        const Eigen::VectorXd out = seqnet_forward(net, s.inputs);
        const int label = out(1) > out(0) ? 1 : 0;
        correct += label == static_cast<int>(s.target);
    }
    CHECK(static_cast<double>(correct) / test.size() >= 0.9);
}

TEST_CASE("training is bit-reproducible for a fixed seed") {
    auto run = [](double dropout) {
        SeqNet net = make_seqnet({3}, 4, HeadType::Regression, dropout, 91);
        std::vector<SeqSample> data;
        for (int i = 0; i < 12; ++i)
            data.push_back(random_sample({3}, 5, (i % 10) / 10.0, 92 + i));
        TrainConfig cfg;
        cfg.loss = LossType::MeanAbsoluteError;
        cfg.epochs = 8;
        cfg.batch_size = 4;
        cfg.seed = 93;
        seqnet_train(net, data, {}, cfg);
        return net;
    };
    for (double dropout : {0.0, 0.2}) {
        SeqNet a = run(dropout);
        SeqNet b = run(dropout);
        const auto pa = seqnet_params(a);
        const auto pb = seqnet_params(b);
        for (std::size_t p = 0; p < pa.size(); ++p)
            for (Eigen::Index i = 0; i < pa[p].size; ++i)
                CHECK(pa[p].data[i] == pb[p].data[i]);
    }
}

TEST_CASE("early stopping restores the best validation parameters") {
    std::vector<SeqSample> train = motif_dataset(60, 4, 8, 94);
    std::vector<SeqSample> val = motif_dataset(20, 4, 8, 95);
    SeqNet net = make_seqnet({4}, 8, HeadType::Classification, 0.0, 96);
    TrainConfig cfg;
    cfg.epochs = 40;
    cfg.patience = 5;
    cfg.seed = 97;
    const TrainTrace trace = seqnet_train(net, train, val, cfg);
    REQUIRE(trace.best_epoch >= 0);
    REQUIRE(!trace.val_loss.empty());
    double val_loss = 0.0;
    for (const auto& s : val) val_loss += seqnet_loss(net, s, cfg.loss);
    val_loss /= val.size();
    CHECK(val_loss == doctest::Approx(trace.val_loss[trace.best_epoch]).epsilon(1e-12));
}

TEST_CASE("input validation") {
    const SeqNet net = make_seqnet({3, 4}, 4, HeadType::Classification, 0.0, 98);
    const Eigen::MatrixXd a = testutil::random_gaussian(3, 5, 99);
    const Eigen::MatrixXd b = testutil::random_gaussian(4, 6, 100);
    CHECK_THROWS_AS(seqnet_forward(net, {a}), WidthMismatch);
    CHECK_THROWS_AS(seqnet_forward(net, {a, b}), LengthMismatch);
    CHECK_THROWS_AS(seqnet_forward(net, {b, a}), WidthMismatch);

    SeqNet reg = make_seqnet({3}, 4, HeadType::Regression, 0.0, 101);
    SeqSample s = random_sample({3}, 5, 1.0, 102);
    CHECK_THROWS_AS(seqnet_loss(reg, s, LossType::BinaryCrossEntropy), LossHeadMismatch);
    SeqNet cls = make_seqnet({3}, 4, HeadType::Classification, 0.0, 103);
    CHECK_THROWS_AS(seqnet_loss(cls, s, LossType::MeanAbsoluteError), LossHeadMismatch);
}

}  // TEST_SUITE
