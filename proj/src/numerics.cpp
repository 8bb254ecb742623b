#include "reprolab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace reprolab {

DenseTable::DenseTable(std::size_t r, std::size_t c, std::vector<double> v)
    : rows(r), cols(c), values(std::move(v)) {
    if (values.size() != rows * cols) {
        throw std::invalid_argument("DenseTable: values length does not match rows*cols");
    }
}

void DenseTable::validate(const std::string& what) const {
    if (values.size() != rows * cols) {
        throw std::invalid_argument(what + ": values length does not match rows*cols");
    }
    for (double x : values) {
        if (!std::isfinite(x)) {
            throw std::invalid_argument(what + ": non-finite entry");
        }
    }
}

double ordered_sum(std::span<const double> v) {
    std::vector<double> tmp(v.begin(), v.end());
    std::sort(tmp.begin(), tmp.end());
    double s = 0.0;
    for (double x : tmp) s += x;
    return s;
}

static void require_finite(std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) throw std::invalid_argument("non-finite input");
    }
}

std::vector<double> softmax(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("empty vector");
    require_finite(v);
    const double m = *std::max_element(v.begin(), v.end());
    std::vector<double> out(v.size());
    double denom = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = std::exp(v[i] - m);
        denom += out[i];
    }
    for (double& x : out) x /= denom;
    return out;
}

double log_sum_exp(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("empty vector");
    require_finite(v);
    const double m = *std::max_element(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

std::size_t argmax_tiebreak(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("empty vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

std::vector<std::size_t> top_k_indices(std::span<const double> v, std::size_t k) {
    if (v.empty()) throw std::invalid_argument("empty vector");
    if (k < 1 || k > v.size()) throw std::invalid_argument("k out of range");
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (v[a] != v[b]) return v[a] > v[b];
        return a < b;
    });
    idx.resize(k);
    return idx;
}

double cross_entropy(std::span<const double> mapped_logits, std::size_t true_label) {
    if (true_label >= mapped_logits.size()) {
        throw std::invalid_argument("label index out of range");
    }
    return log_sum_exp(mapped_logits) - mapped_logits[true_label];
}

} // namespace reprolab
