#pragma once

#include <cstdint>
#include <utility>

#include "reprolab/numerics.hpp"

namespace reprolab {

enum class LmMethod { Rlm, Flm, Ilm, Blm, BlmPlus, Dense };

const char* to_string(LmMethod m);
LmMethod parse_lm_method(const std::string& name);

/// Output label transformation omega: k_s x k_t. Columns of the
/// gradient-free fits are stochastic (entries in [0,1], summing to 1);
/// one-to-one methods additionally yield sub-permutation matrices.
/// Dense is the learned-layer baseline and its columns are unconstrained.
struct MappingMatrix {
    std::size_t k_s = 0;
    std::size_t k_t = 0;
    LmMethod method = LmMethod::Blm;
    double lambda = 1.0;
    double alpha = 0.15;
    DenseTable omega; // k_s x k_t
};

/// Counts of [predicted pretrained label, true downstream label] pairs.
/// Entries are non-negative integers stored as doubles; they sum to n.
struct FrequencyMatrix {
    DenseTable d; // k_s x k_t
    std::size_t n = 0;
};

/// Summed top-K softmax probabilities per [pretrained, downstream] pair.
/// Each sample deposits at most total mass 1.
struct AggregationMatrix {
    DenseTable d; // k_s x k_t
    std::size_t n = 0;
    std::size_t k_top = 1;
};

/// Per-sample model outputs paired with true downstream labels.
struct LogitsTable {
    std::size_t n = 0;
    std::size_t k_s = 0;
    DenseTable logits; // n x k_s
    std::vector<std::size_t> y_true;

    void validate() const;
};

FrequencyMatrix build_frequency(const LogitsTable& lt, std::size_t k_t);
AggregationMatrix build_aggregation(const LogitsTable& lt, std::size_t k_t, std::size_t k_top);

/// Random one-to-one assignment of downstream labels to distinct
/// pretrained labels.
MappingMatrix rlm_fit(std::size_t k_s, std::size_t k_t, std::uint64_t seed);

/// Greedy one-to-one assignment: repeatedly fix the largest remaining
/// entry of d (ties to the lowest pretrained index, then the lowest
/// downstream index) and zero its row and column.
MappingMatrix flm_fit(const FrequencyMatrix& fm);

/// Laplace-smoothed conditional estimate d[s][t]/(row_sum(s)+lambda),
/// column-normalized. Columns with no evidence fall back to uniform.
MappingMatrix blm_fit(const FrequencyMatrix& fm, double lambda);

/// Same arithmetic as blm_fit on the probability aggregation matrix.
MappingMatrix blm_plus_fit(const AggregationMatrix& am, double lambda);

/// Shared greedy/conditional cores used by the fits above and by
/// ablations that cross statistics and assignment strategies.
MappingMatrix greedy_fit_table(const DenseTable& d, LmMethod tag);
MappingMatrix bayes_fit_table(const DenseTable& d, double lambda, LmMethod tag);

/// logits^T . omega -> downstream scores of length k_t.
std::vector<double> map_logits(std::span<const double> logits, const MappingMatrix& m);

/// Per-sample argmax of the mapped logits, plus the fraction matching y_true.
std::pair<std::vector<std::size_t>, double> predict(const LogitsTable& lt,
                                                    const MappingMatrix& m);

/// Indices (and weights) of the `count` largest omega entries per
/// downstream label, ordered by descending weight then ascending index.
struct TopWeighted {
    std::vector<std::vector<std::size_t>> indices; // one list per downstream label
    std::vector<std::vector<double>> weights;
};
TopWeighted top_weighted(const MappingMatrix& m, std::size_t count);

} // namespace reprolab
