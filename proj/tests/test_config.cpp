#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "cclab/error.hpp"
#include "cclab/gallery.hpp"

using namespace cclab;

namespace {

std::string config_error(const json& j) {
    try {
        (void)parse_experiment(j);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConfigError);
        return e.what();
    }
    FAIL("expected a config error");
    return {};
}

json base_config() {
    return json::parse(R"({
      "version": 1,
      "name": "small",
      "dim": 16,
      "operator": {"kind": "scale", "lambda": 2.0, "inner": {"kind": "backward_shift", "weight": 1.0}},
      "subspace": {"kind": "parity_zero", "zero": "even"},
      "family": {"kind": "monomials", "max_degree": 8, "stride": 2},
      "density": {"candidate": [[1, 1.0], [15, 0.001]], "targets": [[[1, 1.0]], [[3, 0.5]]]}
    })");
}

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("cclab-test-" + name);
    std::filesystem::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("gallery dumps round-trip") {
    for (const auto& e : gallery_entries()) {
        INFO(e.name);
        const AnyExperiment any{e.experiment};
        const auto text = format_config(to_json(any));
        const auto back = parse_experiment(json::parse(text));
        CHECK(back == any);
        CHECK(format_config(to_json(back)) == text);
    }
}

TEST_CASE("complex experiments round-trip") {
    auto j = base_config();
    j["scalar_field"] = "complex";
    j["operator"]["lambda"] = json::array({0.0, 2.0});
    j["density"]["targets"] = json::parse(R"([[[1, [0.0, 1.0]]]])");
    const auto e = parse_experiment(j);
    REQUIRE(std::holds_alternative<Experiment<Complex>>(e));
    CHECK(parse_experiment(to_json(e)) == e);
    const auto& c = std::get<Experiment<Complex>>(e);
    CHECK(c.density);
    CHECK(std::get<Scale<Complex>>(c.op.kind).lambda == Complex(0, 2));
}

TEST_CASE("strict parsing names the offending field") {
    auto j = base_config();
    j["tolerances"] = {{"membrane", 1e-9}};
    CHECK(config_error(j).find("tolerances") != std::string::npos);

    j = base_config();
    j["subspace"] = {{"kind", "interval_family"}, {"starts", {0, 4}}, {"ends", {5, 6}}};
    CHECK(config_error(j).find("subspace") != std::string::npos);

    j = base_config();
    j["dim"] = "sixteen";
    CHECK(config_error(j).find("dim") != std::string::npos);

    j = base_config();
    j["version"] = 2;
    CHECK(config_error(j).find("version") != std::string::npos);

    j = base_config();
    j["operator"]["kind"] = "sideways_shift";
    CHECK(config_error(j).find("operator") != std::string::npos);

    j = base_config();
    j["density"]["targets"] = {{"sample", 8}};
    CHECK(config_error(j).find("seed") != std::string::npos);
    j["seed"] = 4;
    CHECK_NOTHROW(parse_experiment(j));

    j = base_config();
    j["density"]["candidate"] = json::parse("[[16, 1.0]]");
    CHECK(config_error(j).find("density.candidate") != std::string::npos);

    j = base_config();
    j["criterion"] = {{"Y", json::parse("[[[2, 1.0]]]")},
                      {"polys", {{"kind", "monomial_powers"}, {"exponents", {{"kind", "linear"}, {"stride", 2}}}}}};
    CHECK(config_error(j).find("criterion") != std::string::npos);
}

TEST_CASE("load_experiment reads files and reports missing ones") {
    const auto dir = scratch("load");
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "c.json") << base_config().dump();
    CHECK(std::holds_alternative<Experiment<double>>(load_experiment(dir / "c.json")));
    std::ofstream(dir / "bad.json") << "{ not json";
    CHECK_THROWS_AS(load_experiment(dir / "bad.json"), Error);
    CHECK_THROWS_AS(load_experiment(dir / "missing.json"), Error);
}

TEST_CASE("run_density exit codes") {
    CHECK(run_density(AnyExperiment{entry_even_zero().experiment}).exit_code == 0);
    auto j = base_config();
    j["operator"] = {{"kind", "identity"}};
    CHECK(run_density(parse_experiment(j)).exit_code == 1);
    CHECK(run_density(parse_experiment(base_config())).exit_code == 1);
}

TEST_CASE("run_criterion exit codes") {
    CHECK(run_criterion(AnyExperiment{entry_wide_intervals().experiment}, CriterionKind::Preimage).exit_code == 0);
    const auto r = run_criterion(AnyExperiment{entry_recursive_counterexample().experiment}, CriterionKind::Preimage);
    CHECK(r.exit_code == 1);
    CHECK(r.summary()["cond3"]["pass"] == false);
    CHECK(r.summary()["cond3"]["first_landing_index"] == 2);
    CHECK(r.summary()["cond3"]["landing_in_subspace"] == false);

    auto e = entry_even_zero().experiment;
    e.criterion->recovery.reset();
    try {
        (void)run_criterion(AnyExperiment{e}, CriterionKind::Invariance);
        FAIL("expected RecoveryRuleMissing");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::RecoveryRuleMissing);
    }
}

TEST_CASE("run_transitivity exit codes") {
    CHECK(run_transitivity(AnyExperiment{entry_wide_gaps().experiment}).exit_code == 1);
    auto j = base_config();
    j["seed"] = 1;
    j["transitivity"] = json::parse(R"({"pairs": [{"u_center": [[1, 1.0]], "v_center": [[1, 1.0]], "radius": 0.1}]})");
    CHECK(run_transitivity(parse_experiment(j)).exit_code == 0);
}

TEST_CASE("run_build exit codes and files") {
    const auto ok = run_build(AnyExperiment{entry_even_zero().experiment});
    CHECK(ok.exit_code == 0);
    CHECK(ok.records.size() == 7);
    bool has_vector = false;
    for (const auto& [name, payload] : ok.artifacts) has_vector = has_vector || name == "build_vector.json";
    CHECK(has_vector);

    const auto bad = run_build(AnyExperiment{entry_constant_intervals().experiment});
    CHECK(bad.exit_code == 1);
    CHECK(bad.summary()["failed_step"] == 2);

    auto zero = entry_even_zero().experiment;
    zero.criterion->Y = {TruncVector<double>(64)};
    const auto z = run_build(AnyExperiment{zero});
    CHECK(z.exit_code == 0);
    CHECK(z.records.size() == 2);
}

TEST_CASE("run_screen exit codes") {
    CHECK(run_screen(AnyExperiment{entry_even_zero().experiment}).exit_code == 0);
    CHECK(run_screen(AnyExperiment{entry_direct_sum().experiment}).exit_code == 1);
}

TEST_CASE("overrides apply on top of the config") {
    const AnyExperiment e{entry_even_zero().experiment};
    Overrides o;
    o.horizon = 4;
    o.epsilon = 1e-9;
    const auto crit = run_criterion(e, CriterionKind::Invariance, o);
    CHECK(crit.summary()["horizon"] == 4);
    // at 1e-9 the built vector no longer covers every target
    CHECK(run_density(e, o).exit_code == 1);
    Overrides bad;
    bad.horizon = 0;
    CHECK_THROWS_AS(run_criterion(e, CriterionKind::Invariance, bad), Error);
}

TEST_CASE("reports are reproducible and keep timestamps apart") {
    const AnyExperiment e{entry_separation().experiment};
    const auto a = run_transitivity(e);
    Overrides four;
    four.threads = 4;
    const auto b = run_transitivity(e, four);
    CHECK(to_jsonl(a.records) == to_jsonl(b.records));
    CHECK(a.text == b.text);

    const auto d1 = scratch("run1"), d2 = scratch("run2");
    write_run(a, d1);
    write_run(a, d2);
    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream f(p);
        return std::string(std::istreambuf_iterator<char>(f), {});
    };
    for (const auto& entry : std::filesystem::directory_iterator(d1)) {
        const auto name = entry.path().filename();
        CHECK(std::filesystem::exists(d2 / name));
        if (name != "metadata.json") CHECK(slurp(entry.path()) == slurp(d2 / name));
    }
    CHECK(std::filesystem::exists(d1 / "transitivity.jsonl"));
    CHECK(std::filesystem::exists(d1 / "transitivity.txt"));
    CHECK(std::filesystem::exists(d1 / "transitivity_pairs.csv"));
    CHECK(json::parse(slurp(d1 / "metadata.json")).contains("written_at"));
    CHECK(slurp(d1 / "transitivity.jsonl").find("written_at") == std::string::npos);
}

TEST_CASE("criterion decay table has one row per k") {
    const auto r = run_criterion(AnyExperiment{entry_even_zero().experiment}, CriterionKind::Invariance);
    REQUIRE(r.tables.size() == 1);
    CHECK(r.tables[0].first == "criterion_decay.csv");
    const auto& csv = r.tables[0].second;
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
}
