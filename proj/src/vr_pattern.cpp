#include "reprolab/vr_pattern.hpp"

namespace reprolab {

const char* to_string(VrKind k) {
    switch (k) {
        case VrKind::Padding: return "padding";
        case VrKind::Watermark: return "watermark";
        case VrKind::None: return "none";
    }
    throw std::logic_error("unknown VrKind");
}

VrKind parse_vr_kind(const std::string& name) {
    if (name == "padding") return VrKind::Padding;
    if (name == "watermark") return VrKind::Watermark;
    if (name == "none") return VrKind::None;
    throw std::invalid_argument("unknown vr kind: " + name);
}

VRPattern make_pattern(VrKind kind, std::size_t side_s, std::size_t side_t) {
    if (side_s < 1 || side_t < 1) throw std::invalid_argument("make_pattern: sides must be >= 1");
    if (side_t > side_s) throw std::invalid_argument("make_pattern: side_t must be <= side_s");
    if (kind == VrKind::None && side_t != side_s) {
        throw std::invalid_argument("make_pattern: kind none requires side_t == side_s");
    }
    VRPattern p;
    p.kind = kind;
    p.side_s = side_s;
    p.side_t = side_t;
    p.theta.assign(p.d_s(), 0.0);
    switch (kind) {
        case VrKind::Padding: {
            p.mask.assign(p.d_s(), 1.0);
            p.placement.resize(p.d_t());
            const std::size_t off = (side_s - side_t) / 2;
            for (std::size_t r = 0; r < side_t; ++r) {
                for (std::size_t c = 0; c < side_t; ++c) {
                    const std::size_t dst = (r + off) * side_s + (c + off);
                    p.placement[r * side_t + c] = dst;
                    p.mask[dst] = 0.0;
                }
            }
            break;
        }
        case VrKind::Watermark: {
            p.mask.assign(p.d_s(), 1.0);
            p.placement.resize(p.d_s());
            for (std::size_t r = 0; r < side_s; ++r) {
                for (std::size_t c = 0; c < side_s; ++c) {
                    const std::size_t sr = r * side_t / side_s;
                    const std::size_t sc = c * side_t / side_s;
                    p.placement[r * side_s + c] = sr * side_t + sc;
                }
            }
            break;
        }
        case VrKind::None:
            p.mask.assign(p.d_s(), 0.0);
            break;
    }
    return p;
}

std::vector<double> apply_vr(const VRPattern& p, std::span<const double> x_t) {
    if (x_t.size() != p.d_t()) throw std::invalid_argument("apply_vr: dimension mismatch");
    std::vector<double> out(p.d_s(), 0.0);
    switch (p.kind) {
        case VrKind::Padding:
            for (std::size_t i = 0; i < p.placement.size(); ++i) {
                out[p.placement[i]] = x_t[i];
            }
            break;
        case VrKind::Watermark:
            for (std::size_t i = 0; i < p.placement.size(); ++i) {
                out[i] = x_t[p.placement[i]];
            }
            break;
        case VrKind::None:
            return {x_t.begin(), x_t.end()};
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] += p.mask[i] * p.theta[i];
    }
    return out;
}

std::vector<double> grad_wrt_theta(const VRPattern& p,
                                   std::span<const double> upstream_input_grad) {
    if (upstream_input_grad.size() != p.d_s()) {
        throw std::invalid_argument("grad_wrt_theta: dimension mismatch");
    }
    std::vector<double> g(p.d_s());
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] = p.mask[i] * upstream_input_grad[i];
    }
    return g;
}

} // namespace reprolab
