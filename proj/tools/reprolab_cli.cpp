// Command-line surface: task generation, training, gradient-free fits,
// evaluation and the accuracy-inequality verifier.
//
// Exit codes: 0 success, 1 verifier found lemma violations, 2 usage error,
// 3 runtime/numeric failure.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "reprolab/serialize.hpp"

namespace fs = std::filesystem;
using namespace reprolab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolations = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct GenTaskArgs {
    SubclassTaskSpec spec;
    std::string out_dir;
};

int cmd_gen_task(const GenTaskArgs& args) {
    args.spec.validate();
    const auto task = generate_task(args.spec);
    const fs::path dir(args.out_dir);
    fs::create_directories(dir);
    write_file(dir / "train.json", dataset_to_json(task.train));
    write_file(dir / "test.json", dataset_to_json(task.test));
    write_file(dir / "model.json", model_to_json(task.model));
    return kExitOk;
}

struct TrainArgs {
    std::string task_dir;
    std::string out_dir;
    std::string lm = "blm";
    std::string vr = "padding";
    std::string mode = "quick";
    std::vector<std::string> ablate;
    TrainConfig cfg;
};

int cmd_train(const TrainArgs& args) {
    TrainConfig cfg = args.cfg;
    cfg.lm_method = parse_lm_method(args.lm);
    cfg.vr_kind = parse_vr_kind(args.vr);
    cfg.mode = parse_train_mode(args.mode);
    for (const auto& a : args.ablate) {
        if (a == "no-iter") cfg.ablation.no_iter = true;
        else if (a == "no-topk") cfg.ablation.no_topk = true;
        else if (a == "no-bayes") cfg.ablation.no_bayes = true;
        else throw std::invalid_argument("unknown ablation: " + a);
    }
    cfg.validate();

    const fs::path task_dir(args.task_dir);
    const auto train = dataset_from_json(read_file(task_dir / "train.json"));
    const auto test = dataset_from_json(read_file(task_dir / "test.json"));
    const auto model = model_from_json(read_file(task_dir / "model.json"));

    const auto result = cfg.lm_method == LmMethod::Dense
                            ? run_dense_baseline(train, test, model, cfg)
                            : run_training(train, test, model, cfg);

    const fs::path out(args.out_dir);
    fs::create_directories(out);
    std::string log;
    for (const auto& rec : result.records) log += epoch_record_to_json_line(rec);
    write_file(out / "log.jsonl", log);
    if (result.aborted) {
        std::cerr << "training aborted: " << result.abort_reason << "\n";
        return kExitRuntime;
    }
    write_file(out / "mapping.json", mapping_to_json(result.mapping));
    write_file(out / "pattern.json", pattern_to_json(result.pattern));
    std::cout << "test_acc=" << format_double(result.records.back().test_acc) << "\n";
    return kExitOk;
}

struct FitLmArgs {
    std::string logits_file;
    std::string out_dir;
    std::string method = "blm";
    std::size_t k_t = 0; // 0: infer from labels
    double lambda = 1.0;
    double alpha = 0.15;
    std::uint64_t seed = 0;
    std::size_t top = 5;
};

int cmd_fit_lm(const FitLmArgs& args) {
    const auto lt = logits_from_csv(read_file(args.logits_file));
    std::size_t k_t = args.k_t;
    if (k_t == 0) {
        for (std::size_t y : lt.y_true) k_t = std::max(k_t, y + 1);
    }
    const auto method = parse_lm_method(args.method);
    MappingMatrix m;
    switch (method) {
        case LmMethod::Rlm:
            m = rlm_fit(lt.k_s, k_t, args.seed);
            break;
        case LmMethod::Flm:
        case LmMethod::Ilm:
            m = flm_fit(build_frequency(lt, k_t));
            m.method = method;
            break;
        case LmMethod::Blm:
            m = blm_fit(build_frequency(lt, k_t), args.lambda);
            break;
        case LmMethod::BlmPlus: {
            TrainConfig cfg;
            cfg.alpha = args.alpha;
            m = blm_plus_fit(build_aggregation(lt, k_t, cfg.top_k(lt.k_s, k_t)), args.lambda);
            m.alpha = args.alpha;
            break;
        }
        case LmMethod::Dense:
            throw std::invalid_argument("dense is trained, not fitted; use the train command");
    }
    m.lambda = args.lambda;
    m.alpha = args.alpha;

    const fs::path out(args.out_dir);
    fs::create_directories(out);
    write_file(out / "mapping.json", mapping_to_json(m));
    const std::size_t count = std::min(args.top, m.k_s);
    write_file(out / "top_labels.json", top_weighted_to_json(top_weighted(m, count), count));
    return kExitOk;
}

struct EvalArgs {
    std::string mapping_file, model_file, pattern_file, data_file;
};

int cmd_eval(const EvalArgs& args) {
    const auto mapping = mapping_from_json(read_file(args.mapping_file));
    const auto model = model_from_json(read_file(args.model_file));
    const auto pattern = pattern_from_json(read_file(args.pattern_file));
    const auto data = dataset_from_json(read_file(args.data_file));
    if (pattern.d_s() != model.d_s || pattern.d_t() != data.spec.d_t()) {
        throw std::invalid_argument("eval: pattern shape does not match model/data");
    }
    const auto rep = evaluate(data, pattern, model, mapping);
    std::cout << eval_report_to_json(rep);
    return kExitOk;
}

struct VerifyArgs {
    std::size_t joint_step = 20;
    std::size_t omega_step = 10;
    std::size_t witness_cap = 25;
    std::string out_file;
};

int cmd_verify_theory(const VerifyArgs& args) {
    const auto report = enumerate_and_check(args.joint_step, args.omega_step, args.witness_cap,
                                            env_thread_count());
    const auto text = theory_report_to_json(report);
    if (!args.out_file.empty()) {
        write_file(args.out_file, text);
    }
    std::cout << text;
    const bool ok = report.lemma1_violations == 0 && report.lemma2_violations == 0;
    return ok ? kExitOk : kExitViolations;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Probabilistic output label mapping for visual reprogramming"};
    app.require_subcommand(1);

    GenTaskArgs gen;
    auto* gen_cmd = app.add_subcommand("gen-task", "Generate a synthetic subclass task");
    gen_cmd->add_option("--seed", gen.spec.seed, "RNG seed");
    gen_cmd->add_option("--k-s", gen.spec.k_s, "Pretrained label count");
    gen_cmd->add_option("--k-t", gen.spec.k_t, "Downstream label count");
    gen_cmd->add_option("--m", gen.spec.m, "Subclasses per downstream class");
    gen_cmd->add_option("--side-s", gen.spec.side_s, "Pretrained image side");
    gen_cmd->add_option("--side-t", gen.spec.side_t, "Downstream image side");
    gen_cmd->add_option("--noise", gen.spec.noise_sigma, "Gaussian noise sigma");
    gen_cmd->add_option("--n-train", gen.spec.n_train, "Training samples");
    gen_cmd->add_option("--n-test", gen.spec.n_test, "Test samples");
    gen_cmd->add_option("--out", gen.out_dir, "Output directory")->required();

    TrainArgs tr;
    auto* train_cmd = app.add_subcommand("train", "Train a VR pattern with a label mapping");
    train_cmd->add_option("--task", tr.task_dir, "Directory from gen-task")->required();
    train_cmd->add_option("--out", tr.out_dir, "Output directory")->required();
    train_cmd->add_option("--lm", tr.lm, "rlm|flm|ilm|blm|blm+|dense");
    train_cmd->add_option("--vr", tr.vr, "padding|watermark|none");
    train_cmd->add_option("--mode", tr.mode, "quick|exact");
    train_cmd->add_option("--ablate", tr.ablate, "no-iter|no-topk|no-bayes (repeatable)");
    train_cmd->add_option("--epochs", tr.cfg.epochs, "Training epochs");
    train_cmd->add_option("--lr", tr.cfg.lr, "Learning rate");
    train_cmd->add_option("--lr-decay", tr.cfg.lr_decay, "Step decay factor");
    train_cmd->add_option("--milestones", tr.cfg.milestones, "Decay epochs");
    train_cmd->add_option("--lambda", tr.cfg.lambda, "Laplace smoothing");
    train_cmd->add_option("--alpha", tr.cfg.alpha, "Top-K ratio");
    train_cmd->add_option("--seed", tr.cfg.seed, "RNG seed");

    FitLmArgs fit;
    auto* fit_cmd = app.add_subcommand("fit-lm", "Fit a label mapping from a logits CSV");
    fit_cmd->add_option("--logits", fit.logits_file, "Logits CSV (id,y_true,l0,...)")->required();
    fit_cmd->add_option("--out", fit.out_dir, "Output directory")->required();
    fit_cmd->add_option("--method", fit.method, "rlm|flm|ilm|blm|blm+");
    fit_cmd->add_option("--k-t", fit.k_t, "Downstream label count (default: inferred)");
    fit_cmd->add_option("--lambda", fit.lambda, "Laplace smoothing");
    fit_cmd->add_option("--alpha", fit.alpha, "Top-K ratio");
    fit_cmd->add_option("--seed", fit.seed, "RNG seed (rlm)");
    fit_cmd->add_option("--top", fit.top, "Top-weighted indices to export per class");

    EvalArgs ev;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a mapping on a dataset");
    eval_cmd->add_option("--mapping", ev.mapping_file, "Mapping JSON")->required();
    eval_cmd->add_option("--model", ev.model_file, "Model JSON")->required();
    eval_cmd->add_option("--pattern", ev.pattern_file, "Pattern JSON")->required();
    eval_cmd->add_option("--data", ev.data_file, "Dataset JSON")->required();

    VerifyArgs ver;
    auto* verify_cmd = app.add_subcommand("verify-theory", "Enumerate the accuracy inequalities");
    verify_cmd->add_option("--joint-step", ver.joint_step, "Joint grid steps (entries i/N)");
    verify_cmd->add_option("--omega-step", ver.omega_step, "Omega grid steps (entries i/M)");
    verify_cmd->add_option("--witness-cap", ver.witness_cap, "Max corollary witnesses kept");
    verify_cmd->add_option("--report", ver.out_file, "Write the report JSON here too");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (gen_cmd->parsed()) return cmd_gen_task(gen);
        if (train_cmd->parsed()) return cmd_train(tr);
        if (fit_cmd->parsed()) return cmd_fit_lm(fit);
        if (eval_cmd->parsed()) return cmd_eval(ev);
        if (verify_cmd->parsed()) return cmd_verify_theory(ver);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
