#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cclab/commands.hpp"
#include "cclab/error.hpp"
#include "cclab/gallery.hpp"

namespace {

struct CommonArgs {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> horizon;
    std::optional<double> epsilon;
    std::optional<std::size_t> threads;

    cclab::Overrides overrides() const { return {seed, horizon, epsilon, threads}; }
};

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--config", a.config, "experiment config (JSON)")->required();
    cmd->add_option("--out", a.out, "directory for report files");
    cmd->add_option("--seed", a.seed, "override the config seed");
    cmd->add_option("--horizon", a.horizon, "override the criterion horizon");
    cmd->add_option("--epsilon", a.epsilon, "override the density scale");
    cmd->add_option("--threads", a.threads, "worker threads (0 = hardware)");
}

int finish(const cclab::RunResult& run, const CommonArgs& a) {
    std::cout << run.text;
    if (!run.text.empty() && run.text.back() != '\n') std::cout << '\n';
    if (!a.out.empty()) cclab::write_run(run, a.out);
    return run.exit_code;
}

int verify_all(const std::optional<std::string>& only, std::optional<std::size_t> threads) {
    const auto start = std::chrono::steady_clock::now();
    bool all_ok = true;
    std::size_t ran = 0;
    for (const auto& entry : cclab::gallery_entries()) {
        if (only && entry.name != *only) continue;
        ++ran;
        cclab::Overrides o;
        o.threads = threads;
        const auto outcomes = cclab::verify_expectations(cclab::AnyExperiment{entry.experiment}, o);
        if (outcomes.empty()) std::printf("%-26s (no expectations)\n", entry.name.c_str());
        for (const auto& c : outcomes) {
            std::printf("%-26s %-22s %-4s expected=%s actual=%s (%.2fs)\n", entry.name.c_str(), c.check.c_str(),
                        c.ok ? "ok" : "FAIL", c.expected.c_str(), c.actual.c_str(), c.seconds);
            all_ok = all_ok && c.ok;
        }
    }
    if (only && ran == 0) throw cclab::Error(cclab::ErrorCode::InvalidArgument, "no gallery entry named " + *only);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s in %.2fs\n", all_ok ? "all expectations hold" : "expectation mismatch", secs);
    return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cclab: subspace convex-cyclic operator experiments"};
    app.require_subcommand(1);

    CommonArgs density_args, crit_args, trans_args, build_args, screen_args;
    auto* density = app.add_subcommand("density", "score the orbit of a candidate against targets in M");
    add_common(density, density_args);

    auto* criterion = app.add_subcommand("criterion", "check the sufficient criterion at finite horizon");
    add_common(criterion, crit_args);
    std::string which = "I";
    criterion->add_option("--which", which, "I (invariance) or II (preimage)")
        ->check(CLI::IsMember({"I", "II"}));

    auto* transitivity = app.add_subcommand("transitivity", "search for witnesses between pairs of M-balls");
    add_common(transitivity, trans_args);

    auto* build = app.add_subcommand("build", "construct a candidate cyclic vector");
    add_common(build, build_args);

    auto* screen = app.add_subcommand("screen", "necessary-condition screen on operator norms");
    add_common(screen, screen_args);

    auto* gallery = app.add_subcommand("gallery", "named instances with expected verdicts");
    gallery->require_subcommand(1);
    gallery->add_subcommand("list", "list entries");
    auto* dump = gallery->add_subcommand("dump", "print an entry as a config");
    std::string dump_name, dump_out;
    dump->add_option("name", dump_name, "entry name")->required();
    dump->add_option("--out", dump_out, "write to this file instead of stdout");
    auto* verify = gallery->add_subcommand("verify-all", "run every entry against its expected verdicts");
    std::optional<std::string> only;
    std::optional<std::size_t> verify_threads;
    verify->add_option("--only", only, "run a single entry");
    verify->add_option("--threads", verify_threads, "worker threads (0 = hardware)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (density->parsed())
            return finish(cclab::run_density(cclab::load_experiment(density_args.config), density_args.overrides()),
                          density_args);
        if (criterion->parsed()) {
            const auto kind = which == "I" ? cclab::CriterionKind::Invariance : cclab::CriterionKind::Preimage;
            return finish(cclab::run_criterion(cclab::load_experiment(crit_args.config), kind, crit_args.overrides()),
                          crit_args);
        }
        if (transitivity->parsed())
            return finish(
                cclab::run_transitivity(cclab::load_experiment(trans_args.config), trans_args.overrides()),
                trans_args);
        if (build->parsed())
            return finish(cclab::run_build(cclab::load_experiment(build_args.config), build_args.overrides()),
                          build_args);
        if (screen->parsed())
            return finish(cclab::run_screen(cclab::load_experiment(screen_args.config), screen_args.overrides()),
                          screen_args);
        if (gallery->got_subcommand("list")) {
            for (const auto& e : cclab::gallery_entries()) std::printf("%-26s %s\n", e.name.c_str(), e.summary.c_str());
            return 0;
        }
        if (dump->parsed()) {
            const auto entry = cclab::find_entry(dump_name);
            if (!entry) throw cclab::Error(cclab::ErrorCode::InvalidArgument, "no gallery entry named " + dump_name);
            const std::string text = cclab::format_config(cclab::to_json(entry->experiment));
            if (dump_out.empty()) {
                std::cout << text;
            } else {
                std::ofstream f(dump_out);
                if (!(f << text)) throw cclab::Error(cclab::ErrorCode::InvalidArgument, "cannot write " + dump_out);
            }
            return 0;
        }
        if (verify->parsed()) return verify_all(only, verify_threads);
    } catch (const cclab::Error& e) {
        std::cerr << "error [" << cclab::to_string(e.code()) << "]: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
