#pragma once

#include <cstdint>

#include "reprolab/numerics.hpp"

namespace reprolab {

enum class VrKind { Padding, Watermark, None };

const char* to_string(VrKind k);
VrKind parse_vr_kind(const std::string& name);

/// Trainable additive input perturbation. Images are square: the
/// downstream side is side_t (d_t = side_t^2) and the pretrained side is
/// side_s (d_s = side_s^2).
///
/// Padding centers the downstream image in the larger frame and trains
/// theta on the border only (mask = 1 off the placement region).
/// Watermark nearest-neighbor-resizes the image to the full frame and
/// trains theta everywhere (mask = all ones). None requires equal sizes
/// and passes inputs through untouched.
///
/// Entries of theta where mask = 0 stay exactly 0 for the lifetime of the
/// pattern: their gradient is masked to zero.
struct VRPattern {
    VrKind kind = VrKind::Padding;
    std::size_t side_s = 0;
    std::size_t side_t = 0;
    std::vector<double> theta; // length d_s
    std::vector<double> mask;  // length d_s, entries 0 or 1

    std::size_t d_s() const { return side_s * side_s; }
    std::size_t d_t() const { return side_t * side_t; }

    // Padding: destination index in the frame for each downstream pixel.
    // Watermark: source downstream pixel for each frame pixel.
    std::vector<std::size_t> placement;
};

VRPattern make_pattern(VrKind kind, std::size_t side_s, std::size_t side_t);

/// Embeds/resizes x_t into the pretrained frame and adds mask .* theta.
std::vector<double> apply_vr(const VRPattern& p, std::span<const double> x_t);

/// mask .* upstream_input_grad (theta enters additively under the mask).
std::vector<double> grad_wrt_theta(const VRPattern& p,
                                   std::span<const double> upstream_input_grad);

} // namespace reprolab
