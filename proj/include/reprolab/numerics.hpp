#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace reprolab {

/// Row-major table of finite doubles. The shared shape for logits,
/// frequency/aggregation statistics and mapping weights.
struct DenseTable {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    DenseTable() = default;
    DenseTable(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}
    DenseTable(std::size_t r, std::size_t c, std::vector<double> v);

    double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }

    std::span<const double> row(std::size_t r) const {
        return {values.data() + r * cols, cols};
    }

    bool same_shape(const DenseTable& o) const { return rows == o.rows && cols == o.cols; }

    /// Throws if values.size() != rows*cols or any entry is non-finite.
    void validate(const std::string& what) const;
};

/// Sums values in ascending order. The result is invariant under any
/// permutation of the input, which the mapping fits rely on for their
/// exact permutation-equivariance guarantee.
double ordered_sum(std::span<const double> v);

/// Numerically stabilized softmax (max subtracted before exponentiation).
/// Output sums to 1 within 1e-12 and preserves the input ordering.
std::vector<double> softmax(std::span<const double> v);

/// Smallest index attaining the maximum value.
std::size_t argmax_tiebreak(std::span<const double> v);

/// Indices of the k largest values, sorted by descending value then
/// ascending index. Ties break to the lower index.
std::vector<std::size_t> top_k_indices(std::span<const double> v, std::size_t k);

/// -log softmax(v)[label], computed via log-sum-exp. Always >= 0.
double cross_entropy(std::span<const double> mapped_logits, std::size_t true_label);

/// log(sum(exp(v))), max-shifted.
double log_sum_exp(std::span<const double> v);

} // namespace reprolab
