// Python bindings for the core operations: elementary numerics, the
// mapping fits, the simulated model, VR patterns, training loops, the
// synthetic task generator and the theory verifier.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "reprolab/serialize.hpp"

namespace py = pybind11;
using namespace reprolab;

namespace {

DenseTable table_from_nested(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw std::invalid_argument("table: expected at least one row");
    DenseTable t(rows.size(), rows[0].size());
    for (std::size_t r = 0; r < t.rows; ++r) {
        if (rows[r].size() != t.cols) throw std::invalid_argument("table: ragged rows");
        for (std::size_t c = 0; c < t.cols; ++c) t.at(r, c) = rows[r][c];
    }
    return t;
}

std::vector<std::vector<double>> table_to_nested(const DenseTable& t) {
    std::vector<std::vector<double>> rows(t.rows, std::vector<double>(t.cols));
    for (std::size_t r = 0; r < t.rows; ++r) {
        for (std::size_t c = 0; c < t.cols; ++c) rows[r][c] = t.at(r, c);
    }
    return rows;
}

LogitsTable logits_table_from(const std::vector<std::vector<double>>& logits,
                              const std::vector<std::size_t>& y_true) {
    LogitsTable lt;
    lt.logits = table_from_nested(logits);
    lt.n = lt.logits.rows;
    lt.k_s = lt.logits.cols;
    lt.y_true = y_true;
    lt.validate();
    return lt;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Probabilistic output label mapping for visual reprogramming";

    // numerics
    m.def("softmax", [](const std::vector<double>& v) { return softmax(v); });
    m.def("argmax_tiebreak", [](const std::vector<double>& v) { return argmax_tiebreak(v); });
    m.def("top_k_indices",
          [](const std::vector<double>& v, std::size_t k) { return top_k_indices(v, k); });
    m.def("cross_entropy", [](const std::vector<double>& v, std::size_t label) {
        return cross_entropy(v, label);
    });

    py::enum_<LmMethod>(m, "LmMethod")
        .value("RLM", LmMethod::Rlm)
        .value("FLM", LmMethod::Flm)
        .value("ILM", LmMethod::Ilm)
        .value("BLM", LmMethod::Blm)
        .value("BLM_PLUS", LmMethod::BlmPlus)
        .value("DENSE", LmMethod::Dense);

    py::class_<MappingMatrix>(m, "MappingMatrix")
        .def_readonly("k_s", &MappingMatrix::k_s)
        .def_readonly("k_t", &MappingMatrix::k_t)
        .def_readonly("method", &MappingMatrix::method)
        .def_readonly("lambda_", &MappingMatrix::lambda)
        .def_readonly("alpha", &MappingMatrix::alpha)
        .def_property_readonly(
            "omega", [](const MappingMatrix& mm) { return table_to_nested(mm.omega); })
        .def("to_json", [](const MappingMatrix& mm) { return mapping_to_json(mm); });
    m.def("mapping_from_json", &mapping_from_json);

    py::class_<FrequencyMatrix>(m, "FrequencyMatrix")
        .def_readonly("n", &FrequencyMatrix::n)
        .def_property_readonly("d",
                               [](const FrequencyMatrix& f) { return table_to_nested(f.d); });
    py::class_<AggregationMatrix>(m, "AggregationMatrix")
        .def_readonly("n", &AggregationMatrix::n)
        .def_readonly("k_top", &AggregationMatrix::k_top)
        .def_property_readonly("d",
                               [](const AggregationMatrix& a) { return table_to_nested(a.d); });

    m.def("build_frequency",
          [](const std::vector<std::vector<double>>& logits,
             const std::vector<std::size_t>& y_true, std::size_t k_t) {
              return build_frequency(logits_table_from(logits, y_true), k_t);
          },
          py::arg("logits"), py::arg("y_true"), py::arg("k_t"));
    m.def("build_aggregation",
          [](const std::vector<std::vector<double>>& logits,
             const std::vector<std::size_t>& y_true, std::size_t k_t, std::size_t k_top) {
              return build_aggregation(logits_table_from(logits, y_true), k_t, k_top);
          },
          py::arg("logits"), py::arg("y_true"), py::arg("k_t"), py::arg("k_top"));

    m.def("rlm_fit", &rlm_fit, py::arg("k_s"), py::arg("k_t"), py::arg("seed"));
    m.def("flm_fit", &flm_fit);
    m.def("blm_fit", &blm_fit, py::arg("fm"), py::arg("lambda_") = 1.0);
    m.def("blm_plus_fit", &blm_plus_fit, py::arg("am"), py::arg("lambda_") = 1.0);
    m.def("map_logits", [](const std::vector<double>& logits, const MappingMatrix& mm) {
        return map_logits(logits, mm);
    });
    m.def("predict",
          [](const std::vector<std::vector<double>>& logits,
             const std::vector<std::size_t>& y_true, const MappingMatrix& mm) {
              return predict(logits_table_from(logits, y_true), mm);
          },
          py::arg("logits"), py::arg("y_true"), py::arg("mapping"));

    // simulated pretrained model
    py::enum_<Arch>(m, "Arch").value("LINEAR", Arch::Linear).value("MLP1", Arch::Mlp1);
    py::class_<SimPretrainedModel>(m, "SimPretrainedModel")
        .def_readonly("arch", &SimPretrainedModel::arch)
        .def_readonly("d_s", &SimPretrainedModel::d_s)
        .def_readonly("k_s", &SimPretrainedModel::k_s)
        .def_readonly("hidden_width", &SimPretrainedModel::hidden_width)
        .def_readonly("seed", &SimPretrainedModel::seed)
        .def("to_json", [](const SimPretrainedModel& mm) { return model_to_json(mm); });
    m.def("model_from_json", &model_from_json);
    m.def("make_model",
          [](Arch arch, std::size_t d_s, std::size_t k_s, std::uint64_t seed,
             const std::optional<std::vector<std::vector<double>>>& centroids,
             std::size_t hidden_width) {
              if (centroids) {
                  const auto table = table_from_nested(*centroids);
                  return make_model(arch, d_s, k_s, seed, &table, hidden_width);
              }
              return make_model(arch, d_s, k_s, seed, nullptr, hidden_width);
          },
          py::arg("arch"), py::arg("d_s"), py::arg("k_s"), py::arg("seed"),
          py::arg("centroids") = std::nullopt, py::arg("hidden_width") = 16);
    m.def("forward_logits", [](const SimPretrainedModel& mm, const std::vector<double>& x) {
        return forward_logits(mm, x);
    });
    m.def("grad_wrt_input", [](const SimPretrainedModel& mm, const std::vector<double>& x,
                               const std::vector<double>& upstream) {
        return grad_wrt_input(mm, x, upstream);
    });

    // VR patterns
    py::enum_<VrKind>(m, "VrKind")
        .value("PADDING", VrKind::Padding)
        .value("WATERMARK", VrKind::Watermark)
        .value("NONE", VrKind::None);
    py::class_<VRPattern>(m, "VRPattern")
        .def_readonly("kind", &VRPattern::kind)
        .def_readonly("side_s", &VRPattern::side_s)
        .def_readonly("side_t", &VRPattern::side_t)
        .def_readonly("theta", &VRPattern::theta)
        .def_readonly("mask", &VRPattern::mask)
        .def("to_json", [](const VRPattern& p) { return pattern_to_json(p); });
    m.def("pattern_from_json", &pattern_from_json);
    m.def("make_pattern", &make_pattern, py::arg("kind"), py::arg("side_s"), py::arg("side_t"));
    m.def("apply_vr",
          [](const VRPattern& p, const std::vector<double>& x) { return apply_vr(p, x); });
    m.def("grad_wrt_theta", [](const VRPattern& p, const std::vector<double>& upstream) {
        return grad_wrt_theta(p, upstream);
    });

    // synthetic task
    py::class_<SubclassTaskSpec>(m, "SubclassTaskSpec")
        .def(py::init<>())
        .def_readwrite("k_s", &SubclassTaskSpec::k_s)
        .def_readwrite("k_t", &SubclassTaskSpec::k_t)
        .def_readwrite("m", &SubclassTaskSpec::m)
        .def_readwrite("side_s", &SubclassTaskSpec::side_s)
        .def_readwrite("side_t", &SubclassTaskSpec::side_t)
        .def_readwrite("noise_sigma", &SubclassTaskSpec::noise_sigma)
        .def_readwrite("n_train", &SubclassTaskSpec::n_train)
        .def_readwrite("n_test", &SubclassTaskSpec::n_test)
        .def_readwrite("seed", &SubclassTaskSpec::seed);
    py::class_<Dataset>(m, "Dataset")
        .def_property_readonly("inputs",
                               [](const Dataset& d) { return table_to_nested(d.inputs); })
        .def_readonly("labels", &Dataset::labels)
        .def_readonly("spec", &Dataset::spec)
        .def("to_json", [](const Dataset& d) { return dataset_to_json(d); });
    m.def("dataset_from_json", &dataset_from_json);
    py::class_<GeneratedTask>(m, "GeneratedTask")
        .def_readonly("train", &GeneratedTask::train)
        .def_readonly("test", &GeneratedTask::test)
        .def_readonly("model", &GeneratedTask::model)
        .def_readonly("true_assignment", &GeneratedTask::true_assignment);
    m.def("generate_task", &generate_task);

    // training
    py::enum_<TrainMode>(m, "TrainMode")
        .value("QUICK", TrainMode::Quick)
        .value("EXACT", TrainMode::Exact);
    py::class_<AblationFlags>(m, "AblationFlags")
        .def(py::init<>())
        .def_readwrite("no_iter", &AblationFlags::no_iter)
        .def_readwrite("no_topk", &AblationFlags::no_topk)
        .def_readwrite("no_bayes", &AblationFlags::no_bayes);
    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("epochs", &TrainConfig::epochs)
        .def_readwrite("lr", &TrainConfig::lr)
        .def_readwrite("lr_decay", &TrainConfig::lr_decay)
        .def_readwrite("milestones", &TrainConfig::milestones)
        .def_readwrite("lambda_", &TrainConfig::lambda)
        .def_readwrite("alpha", &TrainConfig::alpha)
        .def_readwrite("lm_method", &TrainConfig::lm_method)
        .def_readwrite("vr_kind", &TrainConfig::vr_kind)
        .def_readwrite("seed", &TrainConfig::seed)
        .def_readwrite("mode", &TrainConfig::mode)
        .def_readwrite("ablation", &TrainConfig::ablation);
    py::class_<EpochRecord>(m, "EpochRecord")
        .def_readonly("epoch", &EpochRecord::epoch)
        .def_readonly("loss", &EpochRecord::loss)
        .def_readonly("train_acc", &EpochRecord::train_acc)
        .def_readonly("test_acc", &EpochRecord::test_acc)
        .def_readonly("omega_delta", &EpochRecord::omega_delta);
    py::class_<TrainResult>(m, "TrainResult")
        .def_readonly("pattern", &TrainResult::pattern)
        .def_readonly("mapping", &TrainResult::mapping)
        .def_readonly("records", &TrainResult::records)
        .def_readonly("aborted", &TrainResult::aborted)
        .def_readonly("abort_reason", &TrainResult::abort_reason);
    m.def("run_training", &run_training, py::arg("train"), py::arg("test"), py::arg("model"),
          py::arg("config"));
    m.def("run_dense_baseline", &run_dense_baseline, py::arg("train"), py::arg("test"),
          py::arg("model"), py::arg("config"));
    py::class_<EvalReport>(m, "EvalReport")
        .def_readonly("test_acc", &EvalReport::test_acc)
        .def_readonly("per_class_acc", &EvalReport::per_class_acc);
    m.def("evaluate", &evaluate, py::arg("data"), py::arg("pattern"), py::arg("model"),
          py::arg("mapping"));

    // theory verifier
    py::class_<JointDistribution>(m, "JointDistribution")
        .def(py::init([](double p00, double p10, double p01, double p11) {
                 JointDistribution j;
                 j.p[0][0] = p00;
                 j.p[1][0] = p10;
                 j.p[0][1] = p01;
                 j.p[1][1] = p11;
                 j.validate();
                 return j;
             }),
             py::arg("p00"), py::arg("p10"), py::arg("p01"), py::arg("p11"));
    py::class_<BinaryPLM>(m, "BinaryPLM")
        .def(py::init([](double w00, double w10, double w01, double w11) {
                 BinaryPLM w;
                 w.omega[0][0] = w00;
                 w.omega[1][0] = w10;
                 w.omega[0][1] = w01;
                 w.omega[1][1] = w11;
                 w.validate();
                 return w;
             }),
             py::arg("w00"), py::arg("w10"), py::arg("w01"), py::arg("w11"));
    py::enum_<DlmRule>(m, "DlmRule")
        .value("IDENTITY", DlmRule::Identity)
        .value("FLIP", DlmRule::Flip);
    m.def("acc_plm", &acc_plm);
    m.def("acc_dlm", &acc_dlm);
    m.def("lemma_conditions", [](const JointDistribution& j) {
        const auto f = lemma_conditions(j);
        return py::make_tuple(f.lemma1, f.lemma2, f.corollary);
    });
    py::class_<TheoryReport>(m, "TheoryReport")
        .def_readonly("n_joints", &TheoryReport::n_joints)
        .def_readonly("n_omegas", &TheoryReport::n_omegas)
        .def_readonly("lemma1_checked", &TheoryReport::lemma1_checked)
        .def_readonly("lemma1_violations", &TheoryReport::lemma1_violations)
        .def_readonly("lemma2_checked", &TheoryReport::lemma2_checked)
        .def_readonly("lemma2_violations", &TheoryReport::lemma2_violations)
        .def_readonly("corollary_violations_identity",
                      &TheoryReport::corollary_violations_identity)
        .def_readonly("corollary_violations_flip", &TheoryReport::corollary_violations_flip)
        .def("to_json", [](const TheoryReport& r) { return theory_report_to_json(r); });
    m.def("enumerate_and_check", &enumerate_and_check, py::arg("joint_steps"),
          py::arg("omega_steps"), py::arg("witness_cap") = 25, py::arg("threads") = 1);
}
