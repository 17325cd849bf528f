#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "kineme/action_units.h"
#include "kineme/errors.h"
#include "kineme/pose.h"

namespace kineme {

/// Column names expected in an OpenFace feature CSV. Header and cell values
/// are whitespace-trimmed; OpenFace pose_R* channels are radians.
struct ColumnConfig {
    std::string frame = "frame";
    std::string timestamp = "timestamp";
    std::string pitch = "pose_Rx";
    std::string yaw = "pose_Ry";
    std::string roll = "pose_Rz";
    std::array<std::string, 17> au = {"AU01_r", "AU02_r", "AU04_r", "AU05_r", "AU06_r",
                                      "AU07_r", "AU09_r", "AU10_r", "AU12_r", "AU14_r",
                                      "AU15_r", "AU17_r", "AU20_r", "AU23_r", "AU25_r",
                                      "AU26_r", "AU45_r"};
    double fps_override = 0.0;  // 0 -> infer from timestamps
};

struct ParseReport {
    std::size_t data_rows = 0;     // rows in the file after the header
    std::size_t dropped_rows = 0;  // NaN/empty values or non-increasing timestamps
};

struct ParsedVideo {
    HeadPoseSeries pose;
    AUFrameTrack aus;
    ParseReport report;
};

/// Reads one OpenFace-format CSV. Rows with NaN or empty configured fields and
/// rows whose timestamp does not increase are dropped (counted in the report);
/// rows with the wrong field count or unparseable numbers raise MalformedRow.
ParsedVideo parse_openface_csv(const std::string& path, const ColumnConfig& cols = {},
                               const std::string& video_id = "");

/// One dataset video: feature file, trait scores and an optional split tag.
struct VideoManifestEntry {
    std::string video_id;
    std::string features_csv;
    std::map<std::string, double> scores;  // trait -> [0,1]
    std::string split;                     // "train" | "val" | "test" | "" (CV decides)
    double fps = 0.0;                      // 0 -> infer from timestamps
};

struct Manifest {
    std::string dataset;
    std::vector<std::string> traits;
    std::vector<VideoManifestEntry> videos;
};

Manifest load_manifest(const std::string& path, bool check_paths = true);
void save_manifest(const Manifest& manifest, const std::string& path);

/// Thin-slice chunking policy: consecutive non-overlapping chunks, trailing
/// remainder dropped.
struct ChunkSpec {
    double chunk_len_s = 0.0;
    double min_window_s = 2.0;  // must fit at least one kineme window
};

struct ChunkPair {
    HeadPoseSeries pose;
    AUFrameTrack aus;
    int chunk_index = 0;
};

std::vector<ChunkPair> chunk_series(const HeadPoseSeries& pose, const AUFrameTrack& aus,
                                    const ChunkSpec& spec);

}  // namespace kineme
