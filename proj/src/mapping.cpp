#include "reprolab/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace reprolab {

const char* to_string(LmMethod m) {
    switch (m) {
        case LmMethod::Rlm: return "rlm";
        case LmMethod::Flm: return "flm";
        case LmMethod::Ilm: return "ilm";
        case LmMethod::Blm: return "blm";
        case LmMethod::BlmPlus: return "blm+";
        case LmMethod::Dense: return "dense";
    }
    throw std::logic_error("unknown LmMethod");
}

LmMethod parse_lm_method(const std::string& name) {
    if (name == "rlm") return LmMethod::Rlm;
    if (name == "flm") return LmMethod::Flm;
    if (name == "ilm") return LmMethod::Ilm;
    if (name == "blm") return LmMethod::Blm;
    if (name == "blm+") return LmMethod::BlmPlus;
    if (name == "dense") return LmMethod::Dense;
    throw std::invalid_argument("unknown lm method: " + name);
}

void LogitsTable::validate() const {
    logits.validate("LogitsTable.logits");
    if (logits.rows != n || logits.cols != k_s) {
        throw std::invalid_argument("LogitsTable: shape mismatch");
    }
    if (y_true.size() != n) {
        throw std::invalid_argument("LogitsTable: y_true length mismatch");
    }
}

FrequencyMatrix build_frequency(const LogitsTable& lt, std::size_t k_t) {
    if (lt.n == 0) throw std::invalid_argument("build_frequency: empty logits table");
    lt.validate();
    FrequencyMatrix fm;
    fm.d = DenseTable(lt.k_s, k_t);
    fm.n = lt.n;
    for (std::size_t i = 0; i < lt.n; ++i) {
        const std::size_t t = lt.y_true[i];
        if (t >= k_t) throw std::invalid_argument("build_frequency: label out of range");
        const std::size_t s = argmax_tiebreak(lt.logits.row(i));
        fm.d.at(s, t) += 1.0;
    }
    return fm;
}

AggregationMatrix build_aggregation(const LogitsTable& lt, std::size_t k_t,
                                    std::size_t k_top) {
    if (lt.n == 0) throw std::invalid_argument("build_aggregation: empty logits table");
    lt.validate();
    if (k_top < 1 || k_top > lt.k_s) {
        throw std::invalid_argument("build_aggregation: k_top out of range");
    }
    AggregationMatrix am;
    am.d = DenseTable(lt.k_s, k_t);
    am.n = lt.n;
    am.k_top = k_top;
    for (std::size_t i = 0; i < lt.n; ++i) {
        const std::size_t t = lt.y_true[i];
        if (t >= k_t) throw std::invalid_argument("build_aggregation: label out of range");
        const auto row = lt.logits.row(i);
        const auto probs = softmax(row);
        for (std::size_t s : top_k_indices(row, k_top)) {
            am.d.at(s, t) += probs[s];
        }
    }
    return am;
}

MappingMatrix rlm_fit(std::size_t k_s, std::size_t k_t, std::uint64_t seed) {
    if (k_t > k_s) throw std::invalid_argument("rlm_fit: insufficient pretrained labels");
    MappingMatrix m;
    m.k_s = k_s;
    m.k_t = k_t;
    m.method = LmMethod::Rlm;
    m.omega = DenseTable(k_s, k_t);
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> unused(k_s);
    std::iota(unused.begin(), unused.end(), std::size_t{0});
    for (std::size_t t = 0; t < k_t; ++t) {
        std::uniform_int_distribution<std::size_t> pick(0, unused.size() - 1);
        const std::size_t j = pick(rng);
        m.omega.at(unused[j], t) = 1.0;
        unused.erase(unused.begin() + static_cast<std::ptrdiff_t>(j));
    }
    return m;
}

MappingMatrix greedy_fit_table(const DenseTable& d, LmMethod tag) {
    const std::size_t k_s = d.rows;
    const std::size_t k_t = d.cols;
    if (k_t > k_s) throw std::invalid_argument("greedy fit: insufficient pretrained labels");
    MappingMatrix m;
    m.k_s = k_s;
    m.k_t = k_t;
    m.method = tag;
    m.omega = DenseTable(k_s, k_t);
    std::vector<bool> row_used(k_s, false), col_used(k_t, false);
    for (std::size_t round = 0; round < k_t; ++round) {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t bs = 0, bt = 0;
        for (std::size_t s = 0; s < k_s; ++s) {
            if (row_used[s]) continue;
            for (std::size_t t = 0; t < k_t; ++t) {
                if (col_used[t]) continue;
                if (d.at(s, t) > best) {
                    best = d.at(s, t);
                    bs = s;
                    bt = t;
                }
            }
        }
        m.omega.at(bs, bt) = 1.0;
        row_used[bs] = true;
        col_used[bt] = true;
    }
    return m;
}

MappingMatrix flm_fit(const FrequencyMatrix& fm) {
    return greedy_fit_table(fm.d, LmMethod::Flm);
}

MappingMatrix bayes_fit_table(const DenseTable& d, double lambda, LmMethod tag) {
    const std::size_t k_s = d.rows;
    const std::size_t k_t = d.cols;
    if (lambda < 0.0) throw std::invalid_argument("bayes fit: lambda must be non-negative");
    MappingMatrix m;
    m.k_s = k_s;
    m.k_t = k_t;
    m.method = tag;
    m.lambda = lambda;
    m.omega = DenseTable(k_s, k_t);
    // Conditional estimate d[s][t] / (row_sum(s) + lambda). The literal
    // two-fraction ratio construction differs only by the column-constant
    // factor (n + k_s*lambda)/n, which cancels in the normalization below.
    for (std::size_t s = 0; s < k_s; ++s) {
        const double denom = ordered_sum(d.row(s)) + lambda;
        if (denom == 0.0) {
            throw std::invalid_argument(
                "bayes fit: lambda must be positive when a row of d is all-zero");
        }
        for (std::size_t t = 0; t < k_t; ++t) {
            m.omega.at(s, t) = d.at(s, t) / denom;
        }
    }
    // Column-wise sum normalization; a column with no evidence becomes uniform.
    std::vector<double> col(k_s);
    for (std::size_t t = 0; t < k_t; ++t) {
        for (std::size_t s = 0; s < k_s; ++s) col[s] = m.omega.at(s, t);
        const double cs = ordered_sum(col);
        if (cs == 0.0) {
            for (std::size_t s = 0; s < k_s; ++s) {
                m.omega.at(s, t) = 1.0 / static_cast<double>(k_s);
            }
        } else {
            for (std::size_t s = 0; s < k_s; ++s) m.omega.at(s, t) /= cs;
        }
    }
    return m;
}

MappingMatrix blm_fit(const FrequencyMatrix& fm, double lambda) {
    return bayes_fit_table(fm.d, lambda, LmMethod::Blm);
}

MappingMatrix blm_plus_fit(const AggregationMatrix& am, double lambda) {
    return bayes_fit_table(am.d, lambda, LmMethod::BlmPlus);
}

std::vector<double> map_logits(std::span<const double> logits, const MappingMatrix& m) {
    if (logits.size() != m.k_s) throw std::invalid_argument("map_logits: dimension mismatch");
    std::vector<double> out(m.k_t, 0.0);
    for (std::size_t s = 0; s < m.k_s; ++s) {
        const double v = logits[s];
        for (std::size_t t = 0; t < m.k_t; ++t) {
            out[t] += v * m.omega.at(s, t);
        }
    }
    return out;
}

std::pair<std::vector<std::size_t>, double> predict(const LogitsTable& lt,
                                                    const MappingMatrix& m) {
    if (lt.n == 0) throw std::invalid_argument("predict: empty logits table");
    if (lt.k_s != m.k_s) throw std::invalid_argument("predict: dimension mismatch");
    std::vector<std::size_t> labels(lt.n);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < lt.n; ++i) {
        const auto mapped = map_logits(lt.logits.row(i), m);
        labels[i] = argmax_tiebreak(mapped);
        if (labels[i] == lt.y_true[i]) ++hits;
    }
    return {std::move(labels), static_cast<double>(hits) / static_cast<double>(lt.n)};
}

TopWeighted top_weighted(const MappingMatrix& m, std::size_t count) {
    count = std::min(count, m.k_s);
    TopWeighted tw;
    tw.indices.resize(m.k_t);
    tw.weights.resize(m.k_t);
    std::vector<double> col(m.k_s);
    for (std::size_t t = 0; t < m.k_t; ++t) {
        for (std::size_t s = 0; s < m.k_s; ++s) col[s] = m.omega.at(s, t);
        auto idx = top_k_indices(col, count);
        tw.indices[t] = idx;
        tw.weights[t].reserve(count);
        for (std::size_t s : idx) tw.weights[t].push_back(col[s]);
    }
    return tw;
}

} // namespace reprolab
