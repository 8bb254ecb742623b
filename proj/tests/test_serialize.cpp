#include <doctest.h>

#include "reprolab/serialize.hpp"
#include "reprolab/train.hpp"

using namespace reprolab;

TEST_CASE("doubles serialize in shortest round-trip form") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(4.0 / 7.0) == format_double(4.0 / 7.0));
    const double v = 0.12345678901234567;
    double back = 0.0;
    const auto s = format_double(v);
    back = std::stod(s);
    CHECK(back == v);
}

TEST_CASE("mapping json round-trips byte-identically") {
    FrequencyMatrix fm;
    fm.d = DenseTable(3, 2, {2.0, 1.0, 0.0, 3.0, 5.0, 0.0});
    fm.n = 11;
    const auto m = blm_fit(fm, 1.0);
    const auto text = mapping_to_json(m);
    const auto loaded = mapping_from_json(text);
    CHECK(mapping_to_json(loaded) == text);
    CHECK(loaded.omega.values == m.omega.values);
    CHECK(loaded.method == LmMethod::Blm);
    CHECK_THROWS_AS(mapping_from_json("{"), std::invalid_argument);
}

TEST_CASE("pattern json round-trips and validates masks") {
    auto p = make_pattern(VrKind::Padding, 4, 2);
    for (std::size_t i = 0; i < p.theta.size(); ++i) {
        if (p.mask[i] != 0.0) p.theta[i] = 0.25 * static_cast<double>(i);
    }
    const auto text = pattern_to_json(p);
    const auto loaded = pattern_from_json(text);
    CHECK(pattern_to_json(loaded) == text);
    CHECK(loaded.theta == p.theta);
    CHECK(loaded.placement == p.placement);

    auto bad = p;
    bad.theta[bad.placement[0]] = 1.0; // masked entry must stay zero
    CHECK_THROWS_AS(pattern_from_json(pattern_to_json(bad)), std::invalid_argument);
}

TEST_CASE("model json round-trips bit-exactly") {
    for (auto arch : {Arch::Linear, Arch::Mlp1}) {
        const auto m = make_model(arch, 6, 3, 17, nullptr, 4);
        const auto text = model_to_json(m);
        const auto loaded = model_from_json(text);
        CHECK(model_to_json(loaded) == text);
        const std::vector<double> x{0.1, -0.2, 0.3, 0.4, -0.5, 0.6};
        CHECK(forward_logits(loaded, x) == forward_logits(m, x));
    }
}

TEST_CASE("dataset json embeds the csv and round-trips") {
    SubclassTaskSpec s;
    s.n_train = 6;
    s.n_test = 4;
    s.seed = 23;
    const auto task = generate_task(s);
    const auto text = dataset_to_json(task.train);
    const auto loaded = dataset_from_json(text);
    CHECK(dataset_to_json(loaded) == text);
    CHECK(loaded.inputs.values == task.train.inputs.values);
    CHECK(loaded.labels == task.train.labels);
    CHECK(loaded.spec.seed == s.seed);
}

TEST_CASE("logits csv round-trips and reports bad lines") {
    LogitsTable lt;
    lt.n = 2;
    lt.k_s = 3;
    lt.logits = DenseTable(2, 3, {0.5, -1.25, 3.0, 0.0, 0.125, -2.5});
    lt.y_true = {1, 0};
    const auto csv = logits_to_csv(lt);
    CHECK(csv.substr(0, 14) == "id,y_true,l0,l");
    const auto loaded = logits_from_csv(csv);
    CHECK(logits_to_csv(loaded) == csv);
    CHECK(loaded.logits.values == lt.logits.values);

    CHECK_THROWS_WITH_AS(logits_from_csv("id,y_true,l0\n0,0\n"),
                         "logits csv line 2: expected 3 fields, got 2",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(logits_from_csv("id,y_true,l0\n0,0,abc\n"),
                         "logits csv line 2: bad number 'abc'", std::invalid_argument);
    CHECK_THROWS_AS(logits_from_csv("id,wrong,l0\n"), std::invalid_argument);
}

TEST_CASE("epoch records serialize as json lines with pinned keys") {
    EpochRecord r;
    r.epoch = 3;
    r.loss = 1.5;
    r.train_acc = 0.75;
    r.test_acc = 0.5;
    r.omega_delta = 0.125;
    const auto line = epoch_record_to_json_line(r);
    CHECK(line ==
          "{\"epoch\":3,\"loss\":1.5,\"train_acc\":0.75,\"test_acc\":0.5,"
          "\"omega_delta\":0.125}\n");
    const auto parsed = epoch_records_from_json_lines(line + line);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].loss == 1.5);
    CHECK(parsed[1].epoch == 3);
}

TEST_CASE("theory report serializes with the pinned keys") {
    const auto rep = enumerate_and_check(2, 2, 2);
    const auto text = theory_report_to_json(rep);
    CHECK(text.find("\"n_joints\": 4") != std::string::npos);
    CHECK(text.find("\"n_omegas\": 9") != std::string::npos);
    CHECK(text.find("\"lemma1_violations\": 0") != std::string::npos);
    CHECK(text.find("\"lemma2_violations\": 3") != std::string::npos);
    CHECK(text.find("\"corollary_counterexamples\"") != std::string::npos);
}
