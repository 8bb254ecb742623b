#pragma once

#include <cstdint>

#include "reprolab/model.hpp"
#include "reprolab/numerics.hpp"

namespace reprolab {

/// Parameters of the synthetic subclass task: each of the k_t downstream
/// classes is the union of m pretrained subclasses, mirroring label
/// spaces where several fine labels belong to one coarse label.
struct SubclassTaskSpec {
    std::size_t k_s = 30;
    std::size_t k_t = 5;
    std::size_t m = 3;
    std::size_t side_s = 16;
    std::size_t side_t = 8;
    double noise_sigma = 0.1;
    std::size_t n_train = 500;
    std::size_t n_test = 200;
    std::uint64_t seed = 0;

    std::size_t d_s() const { return side_s * side_s; }
    std::size_t d_t() const { return side_t * side_t; }

    void validate() const;
};

struct Dataset {
    DenseTable inputs; // n x d_t
    std::vector<std::size_t> labels;
    SubclassTaskSpec spec;

    std::size_t n() const { return inputs.rows; }
};

struct GeneratedTask {
    Dataset train;
    Dataset test;
    SimPretrainedModel model;
    // true_assignment[s] = downstream class of pretrained label s, or -1
    // for the unassigned tail.
    std::vector<std::ptrdiff_t> true_assignment;
};

/// Draws k_s unit-normalized Gaussian centroids (the linear model's weight
/// rows), assigns the first m*k_t of them to downstream classes in
/// contiguous blocks, and samples noisy central crops of the centroid
/// images. Classes are visited round-robin, subclasses uniformly.
GeneratedTask generate_task(const SubclassTaskSpec& spec);

} // namespace reprolab
