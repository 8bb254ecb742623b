#pragma once

#include <filesystem>
#include <string>

#include "reprolab/mapping.hpp"
#include "reprolab/model.hpp"
#include "reprolab/synth.hpp"
#include "reprolab/theory.hpp"
#include "reprolab/train.hpp"
#include "reprolab/vr_pattern.hpp"

namespace reprolab {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

// JSON text (UTF-8, LF, fixed key order). write -> read -> write is
// byte-identical for every format below.
std::string mapping_to_json(const MappingMatrix& m);
MappingMatrix mapping_from_json(const std::string& text);

std::string pattern_to_json(const VRPattern& p);
VRPattern pattern_from_json(const std::string& text);

std::string model_to_json(const SimPretrainedModel& m);
SimPretrainedModel model_from_json(const std::string& text);

/// Dataset file: a JSON manifest {"spec", "n", "csv"} whose csv field
/// holds the sample table "id,label,p0,...,p{d_t-1}".
std::string dataset_to_json(const Dataset& ds);
Dataset dataset_from_json(const std::string& text);

std::string theory_report_to_json(const TheoryReport& r);

std::string epoch_record_to_json_line(const EpochRecord& r);
std::vector<EpochRecord> epoch_records_from_json_lines(const std::string& text);

std::string eval_report_to_json(const EvalReport& r);

/// Fig.-style export of the strongest pretrained labels per downstream
/// label: {"count", "per_class": [{"label", "indices", "weights"}...]}.
std::string top_weighted_to_json(const TopWeighted& tw, std::size_t count);

// Logits CSV, header "id,y_true,l0,...,l{k_s-1}". Malformed rows raise
// errors naming the 1-based line number.
std::string logits_to_csv(const LogitsTable& lt);
LogitsTable logits_from_csv(const std::string& text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

} // namespace reprolab
