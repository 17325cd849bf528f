#include "kineme/dataset.h"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace kineme {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

// Returns false for empty/NaN cells, throws MalformedRow on garbage.
bool parse_cell(const std::string& cell, std::size_t row, double* out) {
    if (cell.empty()) return false;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, *out);
    if (ec != std::errc() || ptr != end)
        throw MalformedRow("unparseable value '" + cell + "' at data row " +
                           std::to_string(row));
    return !std::isnan(*out);
}

}  // namespace

ParsedVideo parse_openface_csv(const std::string& path, const ColumnConfig& cols,
                               const std::string& video_id) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw EmptyFile("'" + path + "' has no header");
    const std::vector<std::string> header = split_csv_line(line);

    auto find_col = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : static_cast<int>(it - header.begin());
    };

    std::vector<std::string> wanted = {cols.frame, cols.timestamp, cols.pitch, cols.yaw,
                                       cols.roll};
    wanted.insert(wanted.end(), cols.au.begin(), cols.au.end());
    std::vector<int> idx;
    std::string missing;
    for (const auto& name : wanted) {
        const int i = find_col(name);
        if (i < 0) missing += missing.empty() ? name : ", " + name;
        idx.push_back(i);
    }
    if (!missing.empty()) throw MissingColumn("'" + path + "' is missing columns: " + missing);

    ParsedVideo out;
    out.pose.video_id = video_id.empty() ? std::filesystem::path(path).stem().string()
                                         : video_id;
    out.aus.video_id = out.pose.video_id;
    std::vector<std::array<double, 17>> au_rows;

    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++row;
        ++out.report.data_rows;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw MalformedRow("data row " + std::to_string(row) + " has " +
                               std::to_string(fields.size()) + " fields, header has " +
                               std::to_string(header.size()));
        double values[22];
        bool ok = true;
        for (std::size_t c = 0; c < idx.size() && ok; ++c)
            ok = parse_cell(fields[idx[c]], row, &values[c]);
        if (ok && !out.pose.timestamps.empty() && values[1] <= out.pose.timestamps.back())
            ok = false;  // timestamp did not advance
        if (!ok) {
            ++out.report.dropped_rows;
            continue;
        }
        out.pose.timestamps.push_back(values[1]);
        out.pose.pitch.push_back(values[2]);
        out.pose.yaw.push_back(values[3]);
        out.pose.roll.push_back(values[4]);
        std::array<double, 17> au;
        for (int a = 0; a < 17; ++a) au[a] = std::max(0.0, values[5 + a]);
        au_rows.push_back(au);
    }
    if (out.pose.timestamps.empty()) throw EmptyFile("'" + path + "' has no usable data rows");

    double fps = cols.fps_override;
    if (fps <= 0.0) {
        if (out.pose.timestamps.size() < 2)
            throw DataError("'" + path + "': cannot infer fps from a single frame");
        fps = (out.pose.timestamps.size() - 1) /
              (out.pose.timestamps.back() - out.pose.timestamps.front());
    }
    out.pose.fps = fps;
    out.aus.fps = fps;
    out.aus.timestamps = out.pose.timestamps;
    out.aus.intensities.resize(kAuChannels, static_cast<Eigen::Index>(au_rows.size()));
    for (std::size_t i = 0; i < au_rows.size(); ++i)
        for (int a = 0; a < kAuChannels; ++a) out.aus.intensities(a, i) = au_rows[i][a];

    out.pose.validate();
    out.aus.validate();
    return out;
}

Manifest load_manifest(const std::string& path, bool check_paths) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open manifest '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw DataError("manifest '" + path + "' is not valid JSON: " + e.what());
    }

    Manifest m;
    m.dataset = doc.value("dataset", "");
    for (const auto& t : doc.value("traits", json::array())) m.traits.push_back(t);
    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    for (const auto& v : doc.value("videos", json::array())) {
        VideoManifestEntry e;
        e.video_id = v.at("video_id");
        e.features_csv = v.at("features_csv");
        if (std::filesystem::path(e.features_csv).is_relative())
            e.features_csv = (base / e.features_csv).string();
        for (const auto& [trait, score] : v.at("scores").items()) {
            const double s = score;
            if (s < 0.0 || s > 1.0)
                throw DataError("score " + std::to_string(s) + " for '" + e.video_id +
                                "' outside [0,1]");
            e.scores[trait] = s;
        }
        e.split = v.value("split", "");
        e.fps = v.value("fps", 0.0);
        if (check_paths && !std::filesystem::exists(e.features_csv))
            throw DataError("feature file '" + e.features_csv + "' does not exist");
        m.videos.push_back(std::move(e));
    }
    return m;
}

void save_manifest(const Manifest& manifest, const std::string& path) {
    json doc;
    doc["dataset"] = manifest.dataset;
    doc["traits"] = manifest.traits;
    doc["videos"] = json::array();
    for (const auto& v : manifest.videos) {
        json e;
        e["video_id"] = v.video_id;
        e["features_csv"] = v.features_csv;
        e["scores"] = v.scores;
        if (!v.split.empty()) e["split"] = v.split;
        if (v.fps > 0.0) e["fps"] = v.fps;
        doc["videos"].push_back(std::move(e));
    }
    std::ofstream out(path);
    if (!out) throw DataError("cannot write manifest '" + path + "'");
    out << doc.dump(2) << "\n";
}

std::vector<ChunkPair> chunk_series(const HeadPoseSeries& pose, const AUFrameTrack& aus,
                                    const ChunkSpec& spec) {
    pose.validate();
    aus.validate();
    if (pose.frames() != aus.frames())
        throw DataError("pose and au tracks of '" + pose.video_id +
                        "' differ in frame count");
    if (spec.chunk_len_s < spec.min_window_s)
        throw ChunkTooShort("chunk length " + std::to_string(spec.chunk_len_s) +
                            "s below the minimum window of " +
                            std::to_string(spec.min_window_s) + "s");

    const int chunk_frames = static_cast<int>(std::lround(spec.chunk_len_s * pose.fps));
    const int t = static_cast<int>(pose.frames());
    const int n_chunks = t / chunk_frames;

    std::vector<ChunkPair> chunks;
    chunks.reserve(n_chunks);
    for (int k = 0; k < n_chunks; ++k) {
        const int start = k * chunk_frames;
        ChunkPair pair;
        pair.chunk_index = k;
        pair.pose.video_id = pose.video_id;
        pair.pose.fps = pose.fps;
        pair.pose.timestamps.assign(pose.timestamps.begin() + start,
                                    pose.timestamps.begin() + start + chunk_frames);
        pair.pose.pitch.assign(pose.pitch.begin() + start,
                               pose.pitch.begin() + start + chunk_frames);
        pair.pose.yaw.assign(pose.yaw.begin() + start,
                             pose.yaw.begin() + start + chunk_frames);
        pair.pose.roll.assign(pose.roll.begin() + start,
                              pose.roll.begin() + start + chunk_frames);
        pair.aus.video_id = aus.video_id;
        pair.aus.fps = aus.fps;
        pair.aus.timestamps.assign(aus.timestamps.begin() + start,
                                   aus.timestamps.begin() + start + chunk_frames);
        pair.aus.intensities = aus.intensities.middleCols(start, chunk_frames);
        chunks.push_back(std::move(pair));
    }
    return chunks;
}

}  // namespace kineme
