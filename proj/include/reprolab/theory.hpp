#pragma once

#include <array>
#include <cstdint>

#include "reprolab/numerics.hpp"

namespace reprolab {

/// Joint probability table over binary (y_s, y_t): p[y_s][y_t] >= 0,
/// entries summing to 1 within 1e-12.
struct JointDistribution {
    std::array<std::array<double, 2>, 2> p{{{0.0, 0.0}, {0.0, 0.0}}};

    double marginal_t(int y_t) const { return p[0][y_t] + p[1][y_t]; }
    /// p(y_s | y_t); requires marginal_t(y_t) > 0.
    double cond_s_given_t(int y_s, int y_t) const;

    void validate() const;
};

/// Column-stochastic 2x2 mapping weights omega[y_s][y_t].
struct BinaryPLM {
    std::array<std::array<double, 2>, 2> omega{{{0.0, 0.0}, {0.0, 0.0}}};
    void validate() const;
};

enum class DlmRule { Identity, Flip };

const char* to_string(DlmRule r);

/// Expected accuracy sum_t p(y_t) sum_s p(y_s|y_t) * omega[y_s][y_t].
/// Terms with a zero y_t marginal contribute 0.
double acc_plm(const JointDistribution& j, const BinaryPLM& m);

/// Identity: sum_t p(y_t) p(y_s = y_t | y_t); Flip: the complement rule.
double acc_dlm(const JointDistribution& j, DlmRule rule);

struct LemmaFlags {
    bool lemma1 = false;
    bool lemma2 = false;
    bool corollary = false;
};

/// Sufficient-condition flags of the accuracy inequalities. Both y_t
/// marginals must be positive, otherwise the conditionals are undefined.
LemmaFlags lemma_conditions(const JointDistribution& j);

struct CorollaryWitness {
    JointDistribution joint;
    BinaryPLM omega;
    DlmRule rule = DlmRule::Identity;
    double acc_plm_value = 0.0;
    double acc_dlm_value = 0.0;
};

struct TheoryReport {
    std::size_t n_joints = 0;
    std::size_t n_omegas = 0;
    std::size_t lemma1_checked = 0;
    std::size_t lemma1_violations = 0;
    std::size_t lemma2_checked = 0;
    std::size_t lemma2_violations = 0;
    std::size_t corollary_checked_identity = 0;
    std::size_t corollary_violations_identity = 0;
    std::size_t corollary_checked_flip = 0;
    std::size_t corollary_violations_flip = 0;
    // Bounded list of explicit (joint, omega, rule) counterexamples for
    // the corollary condition, in enumeration order.
    std::vector<CorollaryWitness> corollary_counterexamples;
    std::size_t witness_cap = 0;
};

/// Enumerates every 2x2 joint with entries in multiples of 1/joint_steps
/// (both y_t marginals positive) against every column-stochastic omega in
/// multiples of 1/omega_steps. Where a lemma condition holds, the bound
/// acc_plm >= acc_dlm - 1e-12 is counted as checked and any failure as a
/// violation; the corollary condition is checked against both rules and
/// failures are recorded as witnesses rather than asserted.
///
/// threads > 1 splits the joint grid into contiguous chunks whose partial
/// counts are merged in chunk order, so the report is identical to the
/// sequential one.
TheoryReport enumerate_and_check(std::size_t joint_steps, std::size_t omega_steps,
                                 std::size_t witness_cap = 25, std::size_t threads = 1);

/// Worker count from the REPROLAB_THREADS environment variable (default 1).
std::size_t env_thread_count();

} // namespace reprolab
