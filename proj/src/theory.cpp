#include "reprolab/theory.hpp"

#include <cmath>
#include <cstdlib>
#include <thread>

namespace reprolab {

namespace {
constexpr double kBoundTol = 1e-12;
}

double JointDistribution::cond_s_given_t(int y_s, int y_t) const {
    const double pt = marginal_t(y_t);
    if (pt <= 0.0) throw std::invalid_argument("condition undefined: zero y_t marginal");
    return p[y_s][y_t] / pt;
}

void JointDistribution::validate() const {
    double total = 0.0;
    for (const auto& row : p) {
        for (double x : row) {
            if (!(x >= 0.0) || !std::isfinite(x)) {
                throw std::invalid_argument("joint: entries must be finite and >= 0");
            }
            total += x;
        }
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("joint: entries must sum to 1");
    }
}

void BinaryPLM::validate() const {
    for (int t = 0; t < 2; ++t) {
        const double c0 = omega[0][t];
        const double c1 = omega[1][t];
        if (c0 < 0.0 || c0 > 1.0 || c1 < 0.0 || c1 > 1.0) {
            throw std::invalid_argument("plm: entries must lie in [0,1]");
        }
        if (std::abs(c0 + c1 - 1.0) > 1e-9) {
            throw std::invalid_argument("plm: columns must sum to 1");
        }
    }
}

const char* to_string(DlmRule r) {
    return r == DlmRule::Identity ? "identity" : "flip";
}

double acc_plm(const JointDistribution& j, const BinaryPLM& m) {
    // p(y_t) * p(y_s|y_t) collapses to the joint entry, which also covers
    // zero-marginal columns (their entries are all zero).
    double acc = 0.0;
    for (int s = 0; s < 2; ++s) {
        for (int t = 0; t < 2; ++t) {
            acc += j.p[s][t] * m.omega[s][t];
        }
    }
    return acc;
}

double acc_dlm(const JointDistribution& j, DlmRule rule) {
    if (rule == DlmRule::Identity) return j.p[0][0] + j.p[1][1];
    return j.p[1][0] + j.p[0][1];
}

LemmaFlags lemma_conditions(const JointDistribution& j) {
    const double q0 = j.cond_s_given_t(0, 0);
    const double q1 = j.cond_s_given_t(1, 0);
    const double r0 = j.cond_s_given_t(0, 1);
    const double r1 = j.cond_s_given_t(1, 1);
    LemmaFlags f;
    f.lemma1 = (q1 >= q0) && (r0 >= r1);
    f.lemma2 = (q0 <= q1) && (r0 <= r1);
    // exists a: p(y_s=a | y_t=!a) >= p(y_s=!a | y_t=!a)
    f.corollary = (q1 >= q0) || (r0 >= r1);
    return f;
}

namespace {

struct JointOnGrid {
    JointDistribution j;
    LemmaFlags flags;
};

std::vector<JointOnGrid> grid_joints(std::size_t n) {
    std::vector<JointOnGrid> out;
    const double step = 1.0 / static_cast<double>(n);
    for (std::size_t a = 0; a <= n; ++a) {
        for (std::size_t b = 0; a + b <= n; ++b) {
            for (std::size_t c = 0; a + b + c <= n; ++c) {
                const std::size_t d = n - a - b - c;
                if (a + b == 0 || c + d == 0) continue; // zero y_t marginal
                JointOnGrid g;
                g.j.p[0][0] = static_cast<double>(a) * step;
                g.j.p[1][0] = static_cast<double>(b) * step;
                g.j.p[0][1] = static_cast<double>(c) * step;
                g.j.p[1][1] = static_cast<double>(d) * step;
                g.flags = lemma_conditions(g.j);
                out.push_back(g);
            }
        }
    }
    return out;
}

std::vector<BinaryPLM> grid_omegas(std::size_t m) {
    std::vector<BinaryPLM> out;
    const double step = 1.0 / static_cast<double>(m);
    for (std::size_t i = 0; i <= m; ++i) {
        for (std::size_t k = 0; k <= m; ++k) {
            BinaryPLM w;
            w.omega[0][0] = static_cast<double>(i) * step;
            w.omega[1][0] = 1.0 - w.omega[0][0];
            w.omega[0][1] = static_cast<double>(k) * step;
            w.omega[1][1] = 1.0 - w.omega[0][1];
            out.push_back(w);
        }
    }
    return out;
}

TheoryReport check_range(const std::vector<JointOnGrid>& joints,
                         const std::vector<BinaryPLM>& omegas, std::size_t begin,
                         std::size_t end, std::size_t witness_cap) {
    TheoryReport r;
    for (std::size_t ji = begin; ji < end; ++ji) {
        const auto& [j, flags] = joints[ji];
        const double acc_id = acc_dlm(j, DlmRule::Identity);
        const double acc_fl = acc_dlm(j, DlmRule::Flip);
        for (const auto& w : omegas) {
            const double acc_p = acc_plm(j, w);
            if (flags.lemma1) {
                ++r.lemma1_checked;
                if (acc_p < acc_id - kBoundTol) ++r.lemma1_violations;
            }
            if (flags.lemma2) {
                ++r.lemma2_checked;
                if (acc_p < acc_fl - kBoundTol) ++r.lemma2_violations;
            }
            if (flags.corollary) {
                ++r.corollary_checked_identity;
                ++r.corollary_checked_flip;
                const bool viol_id = acc_p < acc_id - kBoundTol;
                const bool viol_fl = acc_p < acc_fl - kBoundTol;
                if (viol_id) ++r.corollary_violations_identity;
                if (viol_fl) ++r.corollary_violations_flip;
                if (viol_id && r.corollary_counterexamples.size() < witness_cap) {
                    r.corollary_counterexamples.push_back(
                        {j, w, DlmRule::Identity, acc_p, acc_id});
                }
                if (viol_fl && r.corollary_counterexamples.size() < witness_cap) {
                    r.corollary_counterexamples.push_back({j, w, DlmRule::Flip, acc_p, acc_fl});
                }
            }
        }
    }
    return r;
}

void merge_into(TheoryReport& into, TheoryReport&& part, std::size_t witness_cap) {
    into.lemma1_checked += part.lemma1_checked;
    into.lemma1_violations += part.lemma1_violations;
    into.lemma2_checked += part.lemma2_checked;
    into.lemma2_violations += part.lemma2_violations;
    into.corollary_checked_identity += part.corollary_checked_identity;
    into.corollary_violations_identity += part.corollary_violations_identity;
    into.corollary_checked_flip += part.corollary_checked_flip;
    into.corollary_violations_flip += part.corollary_violations_flip;
    for (auto& w : part.corollary_counterexamples) {
        if (into.corollary_counterexamples.size() >= witness_cap) break;
        into.corollary_counterexamples.push_back(std::move(w));
    }
}

} // namespace

TheoryReport enumerate_and_check(std::size_t joint_steps, std::size_t omega_steps,
                                 std::size_t witness_cap, std::size_t threads) {
    if (joint_steps < 2 || omega_steps < 2) {
        throw std::invalid_argument("enumerate_and_check: steps must be >= 2");
    }
    const auto joints = grid_joints(joint_steps);
    const auto omegas = grid_omegas(omega_steps);

    TheoryReport total;
    total.n_joints = joints.size();
    total.n_omegas = omegas.size();
    total.witness_cap = witness_cap;

    threads = std::max<std::size_t>(1, std::min(threads, joints.size()));
    if (threads == 1) {
        merge_into(total, check_range(joints, omegas, 0, joints.size(), witness_cap),
                   witness_cap);
        return total;
    }

    std::vector<TheoryReport> parts(threads);
    std::vector<std::thread> pool;
    const std::size_t chunk = (joints.size() + threads - 1) / threads;
    for (std::size_t w = 0; w < threads; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(joints.size(), begin + chunk);
        pool.emplace_back([&, w, begin, end] {
            parts[w] = check_range(joints, omegas, begin, end, witness_cap);
        });
    }
    for (auto& t : pool) t.join();
    for (auto& part : parts) merge_into(total, std::move(part), witness_cap);
    return total;
}

std::size_t env_thread_count() {
    const char* v = std::getenv("REPROLAB_THREADS");
    if (!v) return 1;
    const long n = std::strtol(v, nullptr, 10);
    if (n < 1) return 1;
    return static_cast<std::size_t>(n);
}

} // namespace reprolab
