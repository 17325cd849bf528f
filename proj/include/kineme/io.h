#pragma once

#include <string>
#include <vector>

#include "kineme/analytics.h"
#include "kineme/codebook.h"
#include "kineme/crossval.h"
#include "kineme/hmm.h"
#include "kineme/lstm.h"

namespace kineme {

// Versioned JSON model files. Serialization is stable: re-serializing a loaded
// document reproduces the bytes exactly.

std::string codebook_to_json(const Codebook& codebook);
Codebook codebook_from_json(const std::string& text);
void save_codebook(const Codebook& codebook, const std::string& path);
Codebook load_codebook(const std::string& path);

std::string hmm_to_json(const DiscreteHMM& model);
DiscreteHMM hmm_from_json(const std::string& text);

std::string seqnet_to_json(const SeqNet& net);
SeqNet seqnet_from_json(const std::string& text);

void save_text(const std::string& text, const std::string& path);
std::string load_text(const std::string& path);

// Report emission: CSV plus aligned text tables.

std::string explain_csv(const std::vector<ExplainRow>& rows);
std::string explain_table(const std::string& dataset, const std::vector<ExplainRow>& rows);

std::string metrics_csv(const CrossvalReport& report);
std::string metrics_table(const std::string& title, const CrossvalReport& report);
std::string metrics_cell(const Stat& stat);

std::string sequences_csv(const std::vector<KinemeSequence>& sequences);
std::string au_sequences_csv(const std::vector<AUSequence>& sequences);
std::string trajectories_csv(const Codebook& codebook);

/// Small-multiples SVG of all K kineme trajectories (pitch/yaw/roll curves).
std::string trajectories_svg(const Codebook& codebook);

std::string loss_trace_csv(const TrainTrace& trace);

}  // namespace kineme
