#pragma once

#include <cstdint>
#include <optional>

#include "reprolab/numerics.hpp"

namespace reprolab {

enum class Arch { Linear, Mlp1 };

const char* to_string(Arch a);
Arch parse_arch(const std::string& name);

/// Fixed desk-scale classifier standing in for the pretrained network.
/// Parameters are immutable after construction; forward and input
/// gradients are deterministic pure functions.
struct SimPretrainedModel {
    Arch arch = Arch::Linear;
    std::size_t d_s = 0;
    std::size_t k_s = 0;
    std::size_t hidden_width = 0; // Mlp1 only
    std::uint64_t seed = 0;
    std::vector<DenseTable> weights;           // Linear: {W}; Mlp1: {W1, W2}
    std::vector<std::vector<double>> biases;   // Linear: {b}; Mlp1: {b1, b2}

    void validate() const;
};

/// Linear: weight rows are unit-normalized centroids (provided or seeded
/// Gaussian draws), bias zero. Mlp1: seeded Gaussian layers scaled by
/// 1/sqrt(fan_in) with tanh nonlinearity and zero biases.
SimPretrainedModel make_model(Arch arch, std::size_t d_s, std::size_t k_s,
                              std::uint64_t seed,
                              const DenseTable* centroids = nullptr,
                              std::size_t hidden_width = 16);

std::vector<double> forward_logits(const SimPretrainedModel& m, std::span<const double> x);

/// Gradient of upstream . forward_logits(m, x) with respect to x.
std::vector<double> grad_wrt_input(const SimPretrainedModel& m, std::span<const double> x,
                                   std::span<const double> upstream);

} // namespace reprolab
