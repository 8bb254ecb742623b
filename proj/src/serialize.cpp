#include "reprolab/serialize.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace reprolab {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

ordered_json table_to_rows(const DenseTable& t) {
    ordered_json rows = ordered_json::array();
    for (std::size_t r = 0; r < t.rows; ++r) {
        ordered_json row = ordered_json::array();
        for (std::size_t c = 0; c < t.cols; ++c) row.push_back(t.at(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

DenseTable table_from_rows(const ordered_json& rows, const std::string& what) {
    if (!rows.is_array() || rows.empty()) {
        throw std::invalid_argument(what + ": expected a non-empty array of rows");
    }
    const std::size_t n_rows = rows.size();
    const std::size_t n_cols = rows[0].size();
    DenseTable t(n_rows, n_cols);
    for (std::size_t r = 0; r < n_rows; ++r) {
        if (rows[r].size() != n_cols) throw std::invalid_argument(what + ": ragged rows");
        for (std::size_t c = 0; c < n_cols; ++c) t.at(r, c) = rows[r][c].get<double>();
    }
    t.validate(what);
    return t;
}

ordered_json parse(const std::string& text, const std::string& what) {
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(what + ": " + e.what());
    }
}

} // namespace

std::string mapping_to_json(const MappingMatrix& m) {
    ordered_json j;
    j["k_s"] = m.k_s;
    j["k_t"] = m.k_t;
    j["method"] = to_string(m.method);
    j["lambda"] = m.lambda;
    j["alpha"] = m.alpha;
    j["omega"] = table_to_rows(m.omega);
    return j.dump(2) + "\n";
}

MappingMatrix mapping_from_json(const std::string& text) {
    const auto j = parse(text, "mapping json");
    MappingMatrix m;
    m.k_s = j.at("k_s").get<std::size_t>();
    m.k_t = j.at("k_t").get<std::size_t>();
    m.method = parse_lm_method(j.at("method").get<std::string>());
    m.lambda = j.at("lambda").get<double>();
    m.alpha = j.at("alpha").get<double>();
    m.omega = table_from_rows(j.at("omega"), "mapping omega");
    if (m.omega.rows != m.k_s || m.omega.cols != m.k_t) {
        throw std::invalid_argument("mapping json: omega shape mismatch");
    }
    return m;
}

std::string pattern_to_json(const VRPattern& p) {
    ordered_json j;
    j["kind"] = to_string(p.kind);
    j["d_s"] = p.d_s();
    j["d_t"] = p.d_t();
    j["theta"] = p.theta;
    j["mask"] = p.mask;
    return j.dump(2) + "\n";
}

VRPattern pattern_from_json(const std::string& text) {
    const auto j = parse(text, "pattern json");
    const auto kind = parse_vr_kind(j.at("kind").get<std::string>());
    const auto d_s = j.at("d_s").get<std::size_t>();
    const auto d_t = j.at("d_t").get<std::size_t>();
    const auto side_of = [](std::size_t d, const char* what) {
        const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(d))));
        if (side * side != d) {
            throw std::invalid_argument(std::string("pattern json: ") + what +
                                        " is not a perfect square");
        }
        return side;
    };
    auto p = make_pattern(kind, side_of(d_s, "d_s"), side_of(d_t, "d_t"));
    const auto theta = j.at("theta").get<std::vector<double>>();
    const auto mask = j.at("mask").get<std::vector<double>>();
    if (theta.size() != p.d_s() || mask.size() != p.d_s()) {
        throw std::invalid_argument("pattern json: theta/mask length mismatch");
    }
    if (mask != p.mask) {
        throw std::invalid_argument("pattern json: mask does not match the declared kind");
    }
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (mask[i] == 0.0 && theta[i] != 0.0) {
            throw std::invalid_argument("pattern json: masked theta entries must be zero");
        }
    }
    p.theta = theta;
    return p;
}

std::string model_to_json(const SimPretrainedModel& m) {
    ordered_json j;
    j["arch"] = to_string(m.arch);
    j["d_s"] = m.d_s;
    j["k_s"] = m.k_s;
    j["seed"] = m.seed;
    j["hidden_width"] = m.hidden_width;
    ordered_json weights = ordered_json::array();
    for (const auto& w : m.weights) weights.push_back(table_to_rows(w));
    j["weights"] = std::move(weights);
    j["biases"] = m.biases;
    return j.dump(2) + "\n";
}

SimPretrainedModel model_from_json(const std::string& text) {
    const auto j = parse(text, "model json");
    SimPretrainedModel m;
    m.arch = parse_arch(j.at("arch").get<std::string>());
    m.d_s = j.at("d_s").get<std::size_t>();
    m.k_s = j.at("k_s").get<std::size_t>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.hidden_width = j.at("hidden_width").get<std::size_t>();
    for (const auto& w : j.at("weights")) m.weights.push_back(table_from_rows(w, "model weights"));
    m.biases = j.at("biases").get<std::vector<std::vector<double>>>();
    m.validate();
    return m;
}

namespace {

ordered_json spec_to_json(const SubclassTaskSpec& s) {
    ordered_json j;
    j["k_s"] = s.k_s;
    j["k_t"] = s.k_t;
    j["m"] = s.m;
    j["side_s"] = s.side_s;
    j["side_t"] = s.side_t;
    j["noise_sigma"] = s.noise_sigma;
    j["n_train"] = s.n_train;
    j["n_test"] = s.n_test;
    j["seed"] = s.seed;
    return j;
}

SubclassTaskSpec spec_from_json(const ordered_json& j) {
    SubclassTaskSpec s;
    s.k_s = j.at("k_s").get<std::size_t>();
    s.k_t = j.at("k_t").get<std::size_t>();
    s.m = j.at("m").get<std::size_t>();
    s.side_s = j.at("side_s").get<std::size_t>();
    s.side_t = j.at("side_t").get<std::size_t>();
    s.noise_sigma = j.at("noise_sigma").get<double>();
    s.n_train = j.at("n_train").get<std::size_t>();
    s.n_test = j.at("n_test").get<std::size_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    return s;
}

} // namespace

std::string dataset_to_json(const Dataset& ds) {
    std::string csv = "id,label";
    for (std::size_t c = 0; c < ds.inputs.cols; ++c) csv += ",p" + std::to_string(c);
    csv += "\n";
    for (std::size_t i = 0; i < ds.n(); ++i) {
        csv += std::to_string(i);
        csv += ",";
        csv += std::to_string(ds.labels[i]);
        for (std::size_t c = 0; c < ds.inputs.cols; ++c) {
            csv += ",";
            csv += format_double(ds.inputs.at(i, c));
        }
        csv += "\n";
    }
    ordered_json j;
    j["spec"] = spec_to_json(ds.spec);
    j["n"] = ds.n();
    j["csv"] = std::move(csv);
    return j.dump(2) + "\n";
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

double parse_field_double(const std::string& s, std::size_t line_no, const char* what) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw std::invalid_argument(std::string(what) + " line " + std::to_string(line_no) +
                                    ": bad number '" + s + "'");
    }
    return v;
}

std::size_t parse_field_index(const std::string& s, std::size_t line_no, const char* what) {
    std::size_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw std::invalid_argument(std::string(what) + " line " + std::to_string(line_no) +
                                    ": bad index '" + s + "'");
    }
    return v;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto pos = text.find('\n', start);
        if (pos == std::string::npos) pos = text.size();
        lines.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

} // namespace

Dataset dataset_from_json(const std::string& text) {
    const auto j = parse(text, "dataset json");
    Dataset ds;
    ds.spec = spec_from_json(j.at("spec"));
    const auto n = j.at("n").get<std::size_t>();
    const auto lines = split_lines(j.at("csv").get<std::string>());
    if (lines.size() != n + 1) {
        throw std::invalid_argument("dataset csv: expected " + std::to_string(n + 1) +
                                    " lines, got " + std::to_string(lines.size()));
    }
    const std::size_t d_t = ds.spec.d_t();
    ds.inputs = DenseTable(n, d_t);
    ds.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t line_no = i + 2; // header is line 1
        const auto fields = split_fields(lines[i + 1]);
        if (fields.size() != d_t + 2) {
            throw std::invalid_argument("dataset csv line " + std::to_string(line_no) +
                                        ": expected " + std::to_string(d_t + 2) + " fields, got " +
                                        std::to_string(fields.size()));
        }
        ds.labels[i] = parse_field_index(fields[1], line_no, "dataset csv");
        if (ds.labels[i] >= ds.spec.k_t) {
            throw std::invalid_argument("dataset csv line " + std::to_string(line_no) +
                                        ": label out of range");
        }
        for (std::size_t c = 0; c < d_t; ++c) {
            ds.inputs.at(i, c) = parse_field_double(fields[c + 2], line_no, "dataset csv");
        }
    }
    ds.inputs.validate("dataset inputs");
    return ds;
}

std::string theory_report_to_json(const TheoryReport& r) {
    ordered_json j;
    j["n_joints"] = r.n_joints;
    j["n_omegas"] = r.n_omegas;
    j["lemma1_checked"] = r.lemma1_checked;
    j["lemma1_violations"] = r.lemma1_violations;
    j["lemma2_checked"] = r.lemma2_checked;
    j["lemma2_violations"] = r.lemma2_violations;
    ordered_json witnesses = ordered_json::array();
    for (const auto& w : r.corollary_counterexamples) {
        ordered_json e;
        e["rule"] = to_string(w.rule);
        e["joint"] = ordered_json::array({ordered_json::array({w.joint.p[0][0], w.joint.p[0][1]}),
                                          ordered_json::array({w.joint.p[1][0], w.joint.p[1][1]})});
        e["omega"] =
            ordered_json::array({ordered_json::array({w.omega.omega[0][0], w.omega.omega[0][1]}),
                                 ordered_json::array({w.omega.omega[1][0], w.omega.omega[1][1]})});
        e["acc_plm"] = w.acc_plm_value;
        e["acc_dlm"] = w.acc_dlm_value;
        witnesses.push_back(std::move(e));
    }
    j["corollary_counterexamples"] = std::move(witnesses);
    ordered_json summary;
    summary["identity"] = {{"checked", r.corollary_checked_identity},
                           {"violations", r.corollary_violations_identity}};
    summary["flip"] = {{"checked", r.corollary_checked_flip},
                       {"violations", r.corollary_violations_flip}};
    summary["witness_cap"] = r.witness_cap;
    j["corollary_summary"] = std::move(summary);
    return j.dump(2) + "\n";
}

std::string epoch_record_to_json_line(const EpochRecord& r) {
    ordered_json j;
    j["epoch"] = r.epoch;
    j["loss"] = r.loss;
    j["train_acc"] = r.train_acc;
    j["test_acc"] = r.test_acc;
    j["omega_delta"] = r.omega_delta;
    return j.dump() + "\n";
}

std::vector<EpochRecord> epoch_records_from_json_lines(const std::string& text) {
    std::vector<EpochRecord> out;
    for (const auto& line : split_lines(text)) {
        const auto j = parse(line, "log line");
        EpochRecord r;
        r.epoch = j.at("epoch").get<std::size_t>();
        r.loss = j.at("loss").get<double>();
        r.train_acc = j.at("train_acc").get<double>();
        r.test_acc = j.at("test_acc").get<double>();
        r.omega_delta = j.at("omega_delta").get<double>();
        out.push_back(r);
    }
    return out;
}

std::string eval_report_to_json(const EvalReport& r) {
    ordered_json j;
    j["test_acc"] = r.test_acc;
    j["per_class_acc"] = r.per_class_acc;
    return j.dump() + "\n";
}

std::string top_weighted_to_json(const TopWeighted& tw, std::size_t count) {
    ordered_json j;
    j["count"] = count;
    ordered_json per_class = ordered_json::array();
    for (std::size_t t = 0; t < tw.indices.size(); ++t) {
        ordered_json e;
        e["label"] = t;
        e["indices"] = tw.indices[t];
        e["weights"] = tw.weights[t];
        per_class.push_back(std::move(e));
    }
    j["per_class"] = std::move(per_class);
    return j.dump(2) + "\n";
}

std::string logits_to_csv(const LogitsTable& lt) {
    std::string csv = "id,y_true";
    for (std::size_t c = 0; c < lt.k_s; ++c) csv += ",l" + std::to_string(c);
    csv += "\n";
    for (std::size_t i = 0; i < lt.n; ++i) {
        csv += std::to_string(i);
        csv += ",";
        csv += std::to_string(lt.y_true[i]);
        for (std::size_t c = 0; c < lt.k_s; ++c) {
            csv += ",";
            csv += format_double(lt.logits.at(i, c));
        }
        csv += "\n";
    }
    return csv;
}

LogitsTable logits_from_csv(const std::string& text) {
    const auto lines = split_lines(text);
    if (lines.empty()) throw std::invalid_argument("logits csv: empty file");
    const auto header = split_fields(lines[0]);
    if (header.size() < 3 || header[0] != "id" || header[1] != "y_true") {
        throw std::invalid_argument("logits csv line 1: expected header id,y_true,l0,...");
    }
    const std::size_t k_s = header.size() - 2;
    for (std::size_t c = 0; c < k_s; ++c) {
        if (header[c + 2] != "l" + std::to_string(c)) {
            throw std::invalid_argument("logits csv line 1: bad logit column '" + header[c + 2] +
                                        "'");
        }
    }
    LogitsTable lt;
    lt.n = lines.size() - 1;
    if (lt.n == 0) throw std::invalid_argument("logits csv: no data rows");
    lt.k_s = k_s;
    lt.logits = DenseTable(lt.n, k_s);
    lt.y_true.resize(lt.n);
    for (std::size_t i = 0; i < lt.n; ++i) {
        const std::size_t line_no = i + 2;
        const auto fields = split_fields(lines[i + 1]);
        if (fields.size() != k_s + 2) {
            throw std::invalid_argument("logits csv line " + std::to_string(line_no) +
                                        ": expected " + std::to_string(k_s + 2) +
                                        " fields, got " + std::to_string(fields.size()));
        }
        lt.y_true[i] = parse_field_index(fields[1], line_no, "logits csv");
        for (std::size_t c = 0; c < k_s; ++c) {
            lt.logits.at(i, c) = parse_field_double(fields[c + 2], line_no, "logits csv");
        }
    }
    lt.validate();
    return lt;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

} // namespace reprolab
