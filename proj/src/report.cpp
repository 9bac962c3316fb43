#include "cclab/report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "cclab/error.hpp"

namespace cclab {

namespace {

inline constexpr const char* kToolVersion = "0.1.0";

json number(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

json optional_index(const std::optional<std::size_t>& i) {
    if (i) return *i;
    return nullptr;
}

const char* verdict_name(DensityVerdict v) {
    return v == DensityVerdict::DenseAtScale ? "dense" : "not_covered";
}

const char* pass_fail(bool b) { return b ? "pass" : "FAIL"; }

void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) fail(ErrorCode::InvalidArgument, "cannot write " + p.string());
    out << content;
}

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

}  // namespace

std::string to_jsonl(const std::vector<json>& records) {
    std::string out;
    for (const auto& r : records) {
        out += r.dump();
        out += '\n';
    }
    return out;
}

void write_run(const RunResult& run, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_file(dir / (run.command + ".jsonl"), to_jsonl(run.records));
    write_file(dir / (run.command + ".txt"), run.text);
    for (const auto& [name, content] : run.tables) write_file(dir / name, content);
    for (const auto& [name, payload] : run.artifacts) write_file(dir / name, payload.dump(2) + "\n");
    json meta = {{"command", run.command},
                 {"tool_version", kToolVersion},
                 {"written_at", utc_now()},
                 {"exit_code", run.exit_code}};
    write_file(dir / "metadata.json", meta.dump(2) + "\n");
}

template <Scalar S>
RunResult density_run(const DensityReport<S>& rep) {
    RunResult r;
    r.command = "density";
    std::ostringstream csv;
    csv << "target_id,best_distance,witness_degree_profile\n";
    for (std::size_t t = 0; t < rep.per_target.size(); ++t) {
        const auto& res = rep.per_target[t];
        json rec = {{"record", "target"},
                    {"target", t},
                    {"best_distance", number(res.best_distance)},
                    {"within_epsilon", res.best_distance <= rep.epsilon},
                    {"witness_index", optional_index(res.witness_index)},
                    {"witness", res.witness ? poly_to_json(*res.witness) : json(nullptr)}};
        r.records.push_back(rec);
        csv << t << ',' << num(res.best_distance) << ',' << (res.witness ? degree_profile(*res.witness) : "")
            << '\n';
    }
    r.records.push_back({{"record", "summary"},
                         {"command", "density"},
                         {"verdict", verdict_name(rep.verdict)},
                         {"epsilon", rep.epsilon},
                         {"worst_distance", number(rep.worst_distance())},
                         {"targets", rep.targets.size()},
                         {"family", family_to_json(rep.family)},
                         {"family_description", rep.family.describe()},
                         {"orbit_size", rep.orbit_size},
                         {"orbit_points_in_subspace", rep.orbit_points_in_subspace}});
    r.tables.emplace_back("density_targets.csv", csv.str());
    std::ostringstream txt;
    txt << "density: " << verdict_name(rep.verdict) << " at epsilon " << rep.epsilon << "\n"
        << "family: " << rep.family.describe() << " (" << rep.orbit_size << " members, "
        << rep.orbit_points_in_subspace << " orbit points in M)\n"
        << "targets: " << rep.targets.size() << ", worst distance " << num(rep.worst_distance()) << "\n";
    r.text = txt.str();
    r.exit_code = rep.verdict == DensityVerdict::DenseAtScale ? 0 : 1;
    return r;
}

template <Scalar S>
RunResult transitivity_run(const TransitivityReport<S>& rep) {
    RunResult r;
    r.command = "transitivity";
    std::ostringstream csv;
    csv << "pair_id,found,witness_degree_profile,invariance_residual\n";
    std::size_t found = 0;
    for (std::size_t k = 0; k < rep.per_pair.size(); ++k) {
        const auto& p = rep.per_pair[k];
        found += p.found;
        r.records.push_back({{"record", "pair"},
                             {"pair", k},
                             {"radius", rep.pairs[k].radius},
                             {"found", p.found},
                             {"witness_index", optional_index(p.witness_index)},
                             {"sample_index", optional_index(p.sample_index)},
                             {"witness", p.witness ? poly_to_json(*p.witness) : json(nullptr)},
                             {"invariance_residual", p.invariance_residual}});
        csv << k << ',' << (p.found ? 1 : 0) << ',' << (p.witness ? degree_profile(*p.witness) : "") << ','
            << num(p.invariance_residual) << '\n';
    }
    r.records.push_back({{"record", "summary"},
                         {"command", "transitivity"},
                         {"pairs", rep.pairs.size()},
                         {"found", found},
                         {"all_found", rep.all_found()},
                         {"any_found", rep.any_found()},
                         {"family", family_to_json(rep.family)},
                         {"family_description", rep.family.describe()},
                         {"samples_per_ball", rep.samples_per_ball},
                         {"seed", rep.seed}});
    r.tables.emplace_back("transitivity_pairs.csv", csv.str());
    std::ostringstream txt;
    txt << "transitivity: " << found << " of " << rep.pairs.size() << " pairs found\n"
        << "family: " << rep.family.describe() << ", " << rep.samples_per_ball << " samples per ball, seed "
        << rep.seed << "\n";
    if (found < rep.pairs.size()) txt << "a missing witness is evidence at this resolution, not a proof\n";
    r.text = txt.str();
    r.exit_code = rep.all_found() ? 0 : 1;
    return r;
}

RunResult criterion_run(const CriterionVerdict& v, const BasisIndexSet& m) {
    RunResult r;
    const bool inv = v.kind == CriterionKind::Invariance;
    r.command = "criterion";
    std::ostringstream csv;
    csv << "k,max_tail_norm,max_x_norm,max_recovery_error,cond3_residual\n";
    for (std::size_t i = 0; i < v.horizon; ++i) {
        const auto& s = v.cond3.steps[i];
        r.records.push_back({{"record", "step"},
                             {"k", i + 1},
                             {"tail_norm", v.cond1.series.values[i]},
                             {"x_norm", v.cond2.x_norms.values[i]},
                             {"recovery_error", v.cond2.recovery_errors.values[i]},
                             {"cond3_pass", s.pass},
                             {"cond3_residual", s.max_residual},
                             {inv ? "violating_basis_index" : "violating_x_index", optional_index(s.violating_source)},
                             {"landing_index", optional_index(s.landing_index)}});
        csv << i + 1 << ',' << num(v.cond1.series.values[i]) << ',' << num(v.cond2.x_norms.values[i]) << ','
            << num(v.cond2.recovery_errors.values[i]) << ',' << num(s.max_residual) << '\n';
    }
    const auto landing = v.cond3.first_landing_index();
    r.records.push_back({{"record", "summary"},
                         {"command", "criterion"},
                         {"which", inv ? "I" : "II"},
                         {"horizon", v.horizon},
                         {"tol", v.tol},
                         {"cond1", {{"pass", v.cond1.pass}, {"worst_tail_norm", v.cond1.worst_tail_norm}}},
                         {"cond2",
                          {{"pass", v.cond2.pass},
                           {"worst_x_norm", v.cond2.worst_x_norm},
                           {"worst_recovery_error", v.cond2.worst_recovery_error}}},
                         {"cond3",
                          {{"pass", v.cond3.pass},
                           {"first_landing_index", optional_index(landing)},
                           {"landing_in_subspace", landing ? json(m.contains(*landing)) : json(nullptr)}}},
                         {"all_pass", v.all_pass()}});
    r.tables.emplace_back("criterion_decay.csv", csv.str());
    std::ostringstream txt;
    txt << "criterion " << (inv ? "I" : "II") << " at horizon " << v.horizon << ", tol " << v.tol << "\n"
        << "  cond1 " << pass_fail(v.cond1.pass) << "  worst |P_h(T)x| = " << num(v.cond1.worst_tail_norm) << "\n"
        << "  cond2 " << pass_fail(v.cond2.pass) << "  worst |x_h| = " << num(v.cond2.worst_x_norm)
        << ", worst |P_h(T)x_h - y| = " << num(v.cond2.worst_recovery_error) << "\n"
        << "  cond3 " << pass_fail(v.cond3.pass);
    if (landing) txt << "  first image leaving M lands on e_" << *landing;
    txt << "\n";
    r.text = txt.str();
    r.exit_code = v.all_pass() ? 0 : 1;
    return r;
}

template <Scalar S>
RunResult build_run(const BuildResult<S>& res) {
    RunResult r;
    r.command = "build";
    std::ostringstream csv;
    csv << "j,k,xi,bound,post_error,post_bound\n";
    for (const auto& s : res.trace) {
        r.records.push_back({{"record", "step"},
                             {"j", s.j},
                             {"k", s.k},
                             {"xi", s.xi},
                             {"bound", s.bound},
                             {"post_error", s.post_error},
                             {"post_bound", s.post_bound},
                             {"verified", s.verified}});
        csv << s.j << ',' << s.k << ',' << num(s.xi) << ',' << num(s.bound) << ',' << num(s.post_error) << ','
            << num(s.post_bound) << '\n';
    }
    r.records.push_back({{"record", "summary"},
                         {"command", "build"},
                         {"status", res.verified() ? "built" : "unverified"},
                         {"steps", res.trace.size()},
                         {"norm", norm(res.x)}});
    r.tables.emplace_back("build_trace.csv", csv.str());
    r.artifacts.emplace_back("build_vector.json", json{{"dim", res.x.dim()}, {"entries", vector_to_json(res.x)}});
    std::ostringstream txt;
    txt << "build: " << (res.verified() ? "built" : "post-verification failed") << " with " << res.trace.size()
        << " steps, |x| = " << num(norm(res.x)) << "\n";
    for (const auto& s : res.trace)
        txt << "  j=" << s.j << " k=" << s.k << " bound " << num(s.bound) << " < xi " << num(s.xi)
            << ", post error " << num(s.post_error) << " <= " << num(s.post_bound) << "\n";
    r.text = txt.str();
    r.exit_code = res.verified() ? 0 : 1;
    return r;
}

RunResult build_failure_run(const ScheduleInfeasible& e) {
    RunResult r;
    r.command = "build";
    r.records.push_back({{"record", "summary"},
                         {"command", "build"},
                         {"status", "infeasible"},
                         {"failed_step", e.step()},
                         {"best_bound", number(e.best_bound())},
                         {"xi", e.xi()}});
    r.text = std::string("build: schedule infeasible at step ") + std::to_string(e.step()) + ", best bound " +
             num(e.best_bound()) + " vs xi " + num(e.xi()) + "\n";
    r.tables.emplace_back("build_trace.csv", "j,k,xi,bound,post_error,post_bound\n");
    r.exit_code = 1;
    return r;
}

RunResult screen_run(const ScreenReport& rep, const std::string& scope) {
    RunResult r;
    r.command = "screen";
    for (std::size_t n = 0; n < rep.power_norms.size(); ++n)
        r.records.push_back({{"record", "power"}, {"n", n + 1}, {"norm", rep.power_norms[n]}});
    r.records.push_back({{"record", "summary"},
                         {"command", "screen"},
                         {"scope", scope},
                         {"norm", rep.norm},
                         {"norm_exceeds_one", rep.norm_exceeds_one},
                         {"growth_threshold", rep.growth_threshold},
                         {"powers_grow", rep.powers_grow},
                         {"passed", rep.passed()}});
    std::ostringstream txt;
    txt << "screen (" << scope << "): |T| = " << num(rep.norm) << (rep.norm_exceeds_one ? " > 1" : " <= 1")
        << "; powers " << (rep.powers_grow ? "exceed " : "stay below ") << rep.growth_threshold << "\n"
        << (rep.passed() ? "necessary conditions hold (this proves nothing)\n"
                         : "necessary conditions fail: not convex-cyclic\n");
    r.text = txt.str();
    r.exit_code = rep.passed() ? 0 : 1;
    return r;
}

template RunResult density_run(const DensityReport<double>&);
template RunResult density_run(const DensityReport<Complex>&);
template RunResult transitivity_run(const TransitivityReport<double>&);
template RunResult transitivity_run(const TransitivityReport<Complex>&);
template RunResult build_run(const BuildResult<double>&);
template RunResult build_run(const BuildResult<Complex>&);

}  // namespace cclab
