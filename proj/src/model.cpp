#include "reprolab/model.hpp"

#include <cmath>
#include <random>

namespace reprolab {

const char* to_string(Arch a) {
    switch (a) {
        case Arch::Linear: return "linear";
        case Arch::Mlp1: return "mlp1";
    }
    throw std::logic_error("unknown Arch");
}

Arch parse_arch(const std::string& name) {
    if (name == "linear") return Arch::Linear;
    if (name == "mlp1") return Arch::Mlp1;
    throw std::invalid_argument("unknown arch: " + name);
}

void SimPretrainedModel::validate() const {
    if (arch == Arch::Linear) {
        if (weights.size() != 1 || biases.size() != 1) {
            throw std::invalid_argument("model: linear arch expects one layer");
        }
        if (weights[0].rows != k_s || weights[0].cols != d_s || biases[0].size() != k_s) {
            throw std::invalid_argument("model: linear layer shape mismatch");
        }
    } else {
        if (weights.size() != 2 || biases.size() != 2) {
            throw std::invalid_argument("model: mlp1 arch expects two layers");
        }
        if (weights[0].rows != hidden_width || weights[0].cols != d_s ||
            weights[1].rows != k_s || weights[1].cols != hidden_width ||
            biases[0].size() != hidden_width || biases[1].size() != k_s) {
            throw std::invalid_argument("model: mlp1 layer shape mismatch");
        }
    }
    for (const auto& w : weights) w.validate("model.weights");
}

static DenseTable gaussian_table(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                                 double scale) {
    DenseTable t(rows, cols);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& x : t.values) x = normal(rng) * scale;
    return t;
}

static void normalize_rows(DenseTable& t) {
    for (std::size_t r = 0; r < t.rows; ++r) {
        double norm2 = 0.0;
        for (std::size_t c = 0; c < t.cols; ++c) norm2 += t.at(r, c) * t.at(r, c);
        const double norm = std::sqrt(norm2);
        if (norm == 0.0) throw std::invalid_argument("make_model: zero-norm centroid row");
        for (std::size_t c = 0; c < t.cols; ++c) t.at(r, c) /= norm;
    }
}

SimPretrainedModel make_model(Arch arch, std::size_t d_s, std::size_t k_s,
                              std::uint64_t seed, const DenseTable* centroids,
                              std::size_t hidden_width) {
    if (d_s < 1) throw std::invalid_argument("make_model: d_s must be >= 1");
    if (k_s < 2) throw std::invalid_argument("make_model: k_s must be >= 2");
    SimPretrainedModel m;
    m.arch = arch;
    m.d_s = d_s;
    m.k_s = k_s;
    m.seed = seed;
    std::mt19937_64 rng(seed);
    if (arch == Arch::Linear) {
        m.hidden_width = 0;
        DenseTable w;
        if (centroids) {
            if (centroids->rows != k_s || centroids->cols != d_s) {
                throw std::invalid_argument("make_model: centroid shape mismatch");
            }
            w = *centroids;
        } else {
            w = gaussian_table(rng, k_s, d_s, 1.0);
        }
        normalize_rows(w);
        m.weights.push_back(std::move(w));
        m.biases.emplace_back(k_s, 0.0);
    } else {
        if (hidden_width < 1) throw std::invalid_argument("make_model: hidden_width must be >= 1");
        if (centroids) throw std::invalid_argument("make_model: centroids only apply to linear arch");
        m.hidden_width = hidden_width;
        m.weights.push_back(gaussian_table(rng, hidden_width, d_s,
                                           1.0 / std::sqrt(static_cast<double>(d_s))));
        m.weights.push_back(gaussian_table(rng, k_s, hidden_width,
                                           1.0 / std::sqrt(static_cast<double>(hidden_width))));
        m.biases.emplace_back(hidden_width, 0.0);
        m.biases.emplace_back(k_s, 0.0);
    }
    return m;
}

static std::vector<double> affine(const DenseTable& w, const std::vector<double>& b,
                                  std::span<const double> x) {
    std::vector<double> out(w.rows);
    for (std::size_t r = 0; r < w.rows; ++r) {
        double acc = b[r];
        const double* row = w.values.data() + r * w.cols;
        for (std::size_t c = 0; c < w.cols; ++c) acc += row[c] * x[c];
        out[r] = acc;
    }
    return out;
}

// out[c] = sum_r w[r][c] * u[r]
static std::vector<double> transpose_apply(const DenseTable& w, std::span<const double> u) {
    std::vector<double> out(w.cols, 0.0);
    for (std::size_t r = 0; r < w.rows; ++r) {
        const double ur = u[r];
        const double* row = w.values.data() + r * w.cols;
        for (std::size_t c = 0; c < w.cols; ++c) out[c] += row[c] * ur;
    }
    return out;
}

std::vector<double> forward_logits(const SimPretrainedModel& m, std::span<const double> x) {
    if (x.size() != m.d_s) throw std::invalid_argument("forward_logits: dimension mismatch");
    if (m.arch == Arch::Linear) {
        return affine(m.weights[0], m.biases[0], x);
    }
    auto h = affine(m.weights[0], m.biases[0], x);
    for (double& v : h) v = std::tanh(v);
    return affine(m.weights[1], m.biases[1], h);
}

std::vector<double> grad_wrt_input(const SimPretrainedModel& m, std::span<const double> x,
                                   std::span<const double> upstream) {
    if (x.size() != m.d_s) throw std::invalid_argument("grad_wrt_input: dimension mismatch");
    if (upstream.size() != m.k_s) throw std::invalid_argument("grad_wrt_input: upstream mismatch");
    if (m.arch == Arch::Linear) {
        return transpose_apply(m.weights[0], upstream);
    }
    auto z = affine(m.weights[0], m.biases[0], x);
    auto gh = transpose_apply(m.weights[1], upstream);
    for (std::size_t i = 0; i < gh.size(); ++i) {
        const double th = std::tanh(z[i]);
        gh[i] *= 1.0 - th * th;
    }
    return transpose_apply(m.weights[0], gh);
}

} // namespace reprolab
