#pragma once

#include <cstdint>

#include "reprolab/mapping.hpp"
#include "reprolab/model.hpp"
#include "reprolab/synth.hpp"
#include "reprolab/vr_pattern.hpp"

namespace reprolab {

struct AblationFlags {
    bool no_iter = false;  // freeze omega after the first epoch
    bool no_topk = false;  // blm+ aggregates all k_s probabilities
    bool no_bayes = false; // greedy one-to-one assignment on the same statistics
};

/// Quick refits omega from the logits of the previous epoch's forward
/// pass; Exact refits from logits recomputed at the current theta.
enum class TrainMode { Quick, Exact };

const char* to_string(TrainMode m);
TrainMode parse_train_mode(const std::string& name);

struct TrainConfig {
    std::size_t epochs = 200;
    double lr = 0.01;
    double lr_decay = 0.1;
    std::vector<std::size_t> milestones{100, 145};
    double lambda = 1.0;
    double alpha = 0.15;
    LmMethod lm_method = LmMethod::Blm;
    VrKind vr_kind = VrKind::Padding;
    std::uint64_t seed = 0;
    TrainMode mode = TrainMode::Quick;
    AblationFlags ablation;

    void validate() const;

    /// Step-decayed learning rate for 1-based epoch e.
    double lr_at(std::size_t epoch) const;

    /// Top-K used by blm+: max(1, floor(alpha * k_t)), or k_s under no_topk.
    std::size_t top_k(std::size_t k_s, std::size_t k_t) const;
};

struct EpochRecord {
    std::size_t epoch = 0;
    double loss = 0.0;
    double train_acc = 0.0;
    double test_acc = 0.0;
    double omega_delta = 0.0; // Frobenius norm of omega change over the epoch
};

struct TrainResult {
    VRPattern pattern;
    MappingMatrix mapping;
    std::vector<EpochRecord> records;
    bool aborted = false;          // a non-finite loss stopped training
    std::string abort_reason;
};

/// Per-sample logits of model(apply_vr(pattern, x)) over a dataset.
LogitsTable compute_logits(const Dataset& ds, const VRPattern& pattern,
                           const SimPretrainedModel& model);

/// Interleaved training of the pattern theta and a gradient-free mapping:
/// each epoch computes logits, refits omega per the configured method,
/// records predictions, and takes one full-batch gradient-descent step on
/// the mean cross-entropy. Rejects LmMethod::Dense.
TrainResult run_training(const Dataset& train, const Dataset& test,
                         const SimPretrainedModel& model, const TrainConfig& cfg);

/// Learned-linear-layer baseline: omega is an unconstrained parameter
/// table trained jointly with theta on the same loss.
TrainResult run_dense_baseline(const Dataset& train, const Dataset& test,
                               const SimPretrainedModel& model, const TrainConfig& cfg);

/// Accuracy plus per-downstream-class accuracy of a mapping on a dataset.
struct EvalReport {
    double test_acc = 0.0;
    std::vector<double> per_class_acc;
};
EvalReport evaluate(const Dataset& ds, const VRPattern& pattern,
                    const SimPretrainedModel& model, const MappingMatrix& mapping);

} // namespace reprolab
