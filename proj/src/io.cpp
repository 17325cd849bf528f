#include "kineme/io.h"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace kineme {

namespace {

using nlohmann::json;

json matrix_to_array(const Eigen::MatrixXd& m) {
    json arr = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) arr.push_back(m(r, c));
    return arr;
}

Eigen::MatrixXd matrix_from_array(const json& arr, Eigen::Index rows, Eigen::Index cols,
                                  const std::string& what) {
    if (static_cast<Eigen::Index>(arr.size()) != rows * cols)
        throw DataError(what + ": expected " + std::to_string(rows * cols) +
                        " values, got " + std::to_string(arr.size()));
    Eigen::MatrixXd m(rows, cols);
    Eigen::Index i = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = arr[i++];
    return m;
}

json vector_to_array(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

Eigen::VectorXd vector_from_array(const json& arr) {
    Eigen::VectorXd v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) v(i) = arr[i];
    return v;
}

json parse_document(const std::string& text, const std::string& expected_type) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("invalid JSON document: ") + e.what());
    }
    if (doc.value("type", "") != expected_type)
        throw DataError("expected a '" + expected_type + "' document");
    if (doc.value("version", 0) != 1)
        throw DataError("unsupported document version");
    return doc;
}

std::string join_symbols(const std::vector<ExplainEntry>& entries) {
    std::string out;
    for (const auto& e : entries) {
        if (!out.empty()) out += ", ";
        out += std::to_string(e.symbol);
    }
    return out;
}

}  // namespace

std::string codebook_to_json(const Codebook& cb) {
    json doc;
    doc["version"] = 1;
    doc["type"] = "codebook";
    doc["K"] = cb.kineme_count;
    doc["r"] = cb.rank;
    doc["ell"] = cb.segment_len_frames;
    doc["step"] = cb.step_frames;
    doc["fps"] = cb.fps;
    doc["offsets"] = {{"pitch", cb.offsets.pitch},
                      {"yaw", cb.offsets.yaw},
                      {"roll", cb.offsets.roll}};
    doc["B"] = matrix_to_array(cb.basis);
    doc["weights"] = vector_to_array(cb.mixture.weights);
    doc["means"] = matrix_to_array(cb.mixture.means);
    doc["variances"] = matrix_to_array(cb.mixture.variances);
    doc["centroids"] = matrix_to_array(cb.centroids);
    return doc.dump(2) + "\n";
}

Codebook codebook_from_json(const std::string& text) {
    const json doc = parse_document(text, "codebook");
    Codebook cb;
    cb.kineme_count = doc.at("K");
    cb.rank = doc.at("r");
    cb.segment_len_frames = doc.at("ell");
    cb.step_frames = doc.at("step");
    cb.fps = doc.at("fps");
    cb.offsets.pitch = doc.at("offsets").at("pitch");
    cb.offsets.yaw = doc.at("offsets").at("yaw");
    cb.offsets.roll = doc.at("offsets").at("roll");
    cb.basis = matrix_from_array(doc.at("B"), 3 * cb.segment_len_frames, cb.rank, "B");
    cb.mixture.k = cb.kineme_count;
    cb.mixture.weights = vector_from_array(doc.at("weights"));
    cb.mixture.means =
        matrix_from_array(doc.at("means"), cb.rank, cb.kineme_count, "means");
    cb.mixture.variances =
        matrix_from_array(doc.at("variances"), cb.rank, cb.kineme_count, "variances");
    cb.centroids =
        matrix_from_array(doc.at("centroids"), cb.rank, cb.kineme_count, "centroids");

    Eigen::VectorXd shift(3 * cb.segment_len_frames);
    shift.segment(0, cb.segment_len_frames).setConstant(cb.offsets.pitch);
    shift.segment(cb.segment_len_frames, cb.segment_len_frames).setConstant(cb.offsets.yaw);
    shift.segment(2 * cb.segment_len_frames, cb.segment_len_frames)
        .setConstant(cb.offsets.roll);
    cb.trajectories = (cb.basis * cb.centroids).colwise() - shift;
    cb.validate();
    return cb;
}

void save_codebook(const Codebook& codebook, const std::string& path) {
    save_text(codebook_to_json(codebook), path);
}

Codebook load_codebook(const std::string& path) {
    return codebook_from_json(load_text(path));
}

std::string hmm_to_json(const DiscreteHMM& model) {
    json doc;
    doc["version"] = 1;
    doc["type"] = "hmm";
    doc["states"] = model.states();
    doc["symbols"] = model.symbols();
    doc["initial"] = vector_to_array(model.initial);
    doc["transitions"] = matrix_to_array(model.transitions);
    doc["emissions"] = matrix_to_array(model.emissions);
    return doc.dump(2) + "\n";
}

DiscreteHMM hmm_from_json(const std::string& text) {
    const json doc = parse_document(text, "hmm");
    const int n = doc.at("states");
    const int k = doc.at("symbols");
    DiscreteHMM m;
    m.initial = vector_from_array(doc.at("initial"));
    m.transitions = matrix_from_array(doc.at("transitions"), n, n, "transitions");
    m.emissions = matrix_from_array(doc.at("emissions"), n, k, "emissions");
    return m;
}

std::string seqnet_to_json(const SeqNet& net) {
    json doc;
    doc["version"] = 1;
    doc["type"] = "seqnet";
    doc["head"] = net.head == HeadType::Classification ? "classification" : "regression";
    doc["dropout"] = net.dropout;
    doc["branches"] = json::array();
    for (const auto& br : net.branches) {
        json b;
        b["input"] = br.input_width;
        b["hidden"] = br.hidden_width;
        b["wx"] = matrix_to_array(br.wx);
        b["wh"] = matrix_to_array(br.wh);
        b["b"] = vector_to_array(br.b);
        doc["branches"].push_back(std::move(b));
    }
    doc["head_w"] = matrix_to_array(net.head_w);
    doc["head_b"] = vector_to_array(net.head_b);
    return doc.dump(2) + "\n";
}

SeqNet seqnet_from_json(const std::string& text) {
    const json doc = parse_document(text, "seqnet");
    SeqNet net;
    net.head = doc.at("head") == "classification" ? HeadType::Classification
                                                  : HeadType::Regression;
    net.dropout = doc.at("dropout");
    for (const auto& b : doc.at("branches")) {
        SeqNet::Branch br;
        br.input_width = b.at("input");
        br.hidden_width = b.at("hidden");
        br.wx = matrix_from_array(b.at("wx"), 4 * br.hidden_width, br.input_width, "wx");
        br.wh = matrix_from_array(b.at("wh"), 4 * br.hidden_width, br.hidden_width, "wh");
        br.b = vector_from_array(b.at("b"));
        net.branches.push_back(std::move(br));
    }
    const int merged = net.merged_width();
    net.head_w = matrix_from_array(doc.at("head_w"), net.outputs(), merged, "head_w");
    net.head_b = vector_from_array(doc.at("head_b"));
    return net;
}

void save_text(const std::string& text, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << text;
}

std::string load_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string explain_csv(const std::vector<ExplainRow>& rows) {
    std::ostringstream out;
    out << "trait,level,rank,kineme,kineme_count,au,au_count\n";
    for (const auto& row : rows) {
        const std::size_t n = std::max(row.kinemes.size(), row.aus.size());
        for (std::size_t i = 0; i < n; ++i) {
            out << row.trait << "," << (row.high ? "H" : "L") << "," << i + 1 << ",";
            if (i < row.kinemes.size())
                out << row.kinemes[i].symbol << "," << row.kinemes[i].count;
            else
                out << ",";
            out << ",";
            if (i < row.aus.size()) out << row.aus[i].symbol << "," << row.aus[i].count;
            else
                out << ",";
            out << "\n";
        }
    }
    return out.str();
}

std::string explain_table(const std::string& dataset, const std::vector<ExplainRow>& rows) {
    std::ostringstream out;
    out << std::left << std::setw(10) << "Dataset" << std::setw(10) << "Trait"
        << std::setw(18) << "Dominant Kin" << std::setw(22) << "Dominant AUs"
        << "Videos\n";
    out << std::string(66, '-') << "\n";
    for (const auto& row : rows) {
        out << std::left << std::setw(10) << dataset << std::setw(10)
            << row.trait + (row.high ? " (H)" : " (L)") << std::setw(18)
            << join_symbols(row.kinemes) << std::setw(22) << join_symbols(row.aus)
            << row.n_videos << "\n";
    }
    return out.str();
}

std::string metrics_cell(const Stat& stat) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(3) << stat.mean << "+-" << std::setprecision(2)
        << stat.std;
    return out.str();
}

std::string metrics_csv(const CrossvalReport& report) {
    std::ostringstream out;
    out.precision(10);
    const bool reg = report.task == Task::Regression;
    out << "level,metric,mean,std,n_runs\n";
    auto emit = [&](const char* level, const char* name, const Stat& s) {
        out << level << "," << name << "," << s.mean << "," << s.std << ","
            << report.runs.size() << "\n";
    };
    const MetricsReport& c = report.chunk_level;
    const MetricsReport& v = report.video_level;
    if (reg) {
        emit("chunk", "acc_reg", c.acc_reg);
        emit("chunk", "pcc", c.pcc);
        emit("video", "acc_reg", v.acc_reg);
        emit("video", "pcc", v.pcc);
    } else {
        emit("chunk", "acc_cls", c.acc_cls);
        emit("chunk", "f1", c.f1);
        emit("video", "acc_cls", v.acc_cls);
        emit("video", "f1", v.f1);
    }
    return out.str();
}

std::string metrics_table(const std::string& title, const CrossvalReport& report) {
    const bool reg = report.task == Task::Regression;
    std::ostringstream out;
    out << title << " (" << report.runs.size() << " runs)\n";
    out << std::left << std::setw(10) << "Level" << std::setw(16)
        << (reg ? "Acc (1-MAE)" : "Acc") << std::setw(16) << (reg ? "PCC" : "F1") << "\n";
    out << std::string(42, '-') << "\n";
    auto line = [&](const char* level, const MetricsReport& m) {
        out << std::left << std::setw(10) << level << std::setw(16)
            << metrics_cell(reg ? m.acc_reg : m.acc_cls) << std::setw(16)
            << metrics_cell(reg ? m.pcc : m.f1) << "\n";
    };
    line("chunk", report.chunk_level);
    line("video", report.video_level);
    return out.str();
}

std::string sequences_csv(const std::vector<KinemeSequence>& sequences) {
    std::ostringstream out;
    out.precision(10);
    out << "video_id,window,start_s,kineme\n";
    for (const auto& seq : sequences)
        for (std::size_t w = 0; w < seq.size(); ++w)
            out << seq.video_id << "," << w << "," << seq.window_starts[w] << ","
                << seq.symbols[w] << "\n";
    return out.str();
}

std::string au_sequences_csv(const std::vector<AUSequence>& sequences) {
    std::ostringstream out;
    out.precision(10);
    out << "video_id,window,start_s";
    for (int au : kAuNumbers) out << ",AU" << au;
    out << "\n";
    for (const auto& seq : sequences) {
        for (Eigen::Index w = 0; w < seq.windows(); ++w) {
            out << seq.video_id << "," << w << "," << seq.window_starts[w];
            for (int a = 0; a < kAuChannels; ++a) out << "," << seq.dominance(a, w);
            out << "\n";
        }
    }
    return out.str();
}

std::string trajectories_csv(const Codebook& codebook) {
    std::ostringstream out;
    out.precision(10);
    out << "kineme,time_s,pitch,yaw,roll\n";
    for (const TrajectoryRow& row : kineme_trajectories(codebook))
        out << row.kineme << "," << row.time_s << "," << row.pitch << "," << row.yaw << ","
            << row.roll << "\n";
    return out.str();
}

std::string trajectories_svg(const Codebook& codebook) {
    const int ell = codebook.segment_len_frames;
    const int k = codebook.kineme_count;
    const int cols = std::min(4, k);
    const int rows = (k + cols - 1) / cols;
    const double cell_w = 180.0, cell_h = 110.0, pad = 24.0;
    const double width = cols * cell_w + 2 * pad;
    const double height = rows * cell_h + 2 * pad;

    const double lo = codebook.trajectories.minCoeff();
    const double hi = codebook.trajectories.maxCoeff();
    const double span = hi - lo > 1e-12 ? hi - lo : 1.0;

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='"
        << height << "' viewBox='0 0 " << width << " " << height << "'>\n";
    svg << "<rect width='100%' height='100%' fill='white'/>\n";
    const char* colors[3] = {"#d62728", "#1f77b4", "#2ca02c"};  // pitch, yaw, roll
    for (int j = 0; j < k; ++j) {
        const double x0 = pad + (j % cols) * cell_w;
        const double y0 = pad + (j / cols) * cell_h;
        svg << "<rect x='" << x0 << "' y='" << y0 << "' width='" << cell_w - 10
            << "' height='" << cell_h - 20 << "' fill='none' stroke='#cccccc'/>\n";
        svg << "<text x='" << x0 + 4 << "' y='" << y0 + 14
            << "' font-size='11' font-family='sans-serif'>kineme " << j + 1 << "</text>\n";
        for (int ch = 0; ch < 3; ++ch) {
            svg << "<polyline fill='none' stroke='" << colors[ch]
                << "' stroke-width='1' points='";
            for (int f = 0; f < ell; ++f) {
                const double v = codebook.trajectories(ch * ell + f, j);
                const double px = x0 + 4 + (cell_w - 18) * f / std::max(1, ell - 1);
                const double py = y0 + cell_h - 24 - (cell_h - 46) * (v - lo) / span;
                svg << px << "," << py << " ";
            }
            svg << "'/>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string loss_trace_csv(const TrainTrace& trace) {
    std::ostringstream out;
    out.precision(10);
    out << "epoch,train_loss,val_loss\n";
    for (std::size_t e = 0; e < trace.train_loss.size(); ++e) {
        out << e << "," << trace.train_loss[e] << ",";
        if (e < trace.val_loss.size()) out << trace.val_loss[e];
        out << "\n";
    }
    return out.str();
}

}  // namespace kineme
