#include "cclab/commands.hpp"

#include <chrono>
#include <sstream>

#include "cclab/error.hpp"
#include "cclab/sampling.hpp"

namespace cclab {

namespace {

[[noreturn]] void missing(const char* block) {
    fail(ErrorCode::ConfigError, std::string(block) + ": block is missing");
}

std::string flags_str(const ConditionFlags& f) {
    auto b = [](bool x) { return x ? "pass" : "FAIL"; };
    return std::string("cond1 ") + b(f.cond1) + ", cond2 " + b(f.cond2) + ", cond3 " + b(f.cond3);
}

const char* transitivity_name(TransitivityExpectation t) {
    switch (t) {
        case TransitivityExpectation::AllFound: return "all_found";
        case TransitivityExpectation::AnyFound: return "any_found";
        default: return "none_found";
    }
}

template <class F>
auto visit_experiment(const AnyExperiment& e, const Overrides& o, F&& f) {
    return std::visit([&](const auto& x) { return f(with_overrides(x, o)); }, e);
}

}  // namespace

template <Scalar S>
Experiment<S> with_overrides(Experiment<S> e, const Overrides& o) {
    if (o.seed) e.seed = o.seed;
    if (o.horizon) e.horizon = *o.horizon;
    if (o.epsilon) {
        if (!(*o.epsilon > 0.0)) fail(ErrorCode::ConfigError, "--epsilon: must be positive");
        e.tolerances.epsilon = *o.epsilon;
    }
    if (o.threads) e.options.threads = *o.threads;
    return e;
}

template <Scalar S>
BasisIndexSet subspace_of(const Experiment<S>& e) {
    return materialize_subspace(e.subspace, e.dim);
}

template <Scalar S>
BuildResult<S> build_of(const Experiment<S>& e) {
    if (!e.build) missing("build");
    return build_cyclic_vector(e.criterion_instance(), e.build->j_max, e.build->c, e.build->k_step,
                               e.run_options());
}

template <Scalar S>
TruncVector<S> density_candidate(const Experiment<S>& e) {
    if (!e.density) missing("density");
    if (const auto* v = std::get_if<TruncVector<S>>(&e.density->candidate)) return *v;
    auto res = build_of(e);
    if (!res.verified()) fail(ErrorCode::InvalidArgument, "built candidate failed post-verification");
    return res.x;
}

template <Scalar S>
std::vector<TruncVector<S>> density_targets(const Experiment<S>& e) {
    if (!e.density) missing("density");
    const auto& t = e.density->targets;
    if (const auto* v = std::get_if<std::vector<TruncVector<S>>>(&t)) return *v;
    if (std::holds_alternative<TargetsFromY>(t)) {
        if (!e.criterion) missing("criterion");
        return e.criterion->Y;
    }
    if (!e.seed) fail(ErrorCode::ConfigError, "seed: required when sampling is requested");
    return default_targets<S>(subspace_of(e), std::get<SampledTargets>(t).count, *e.seed, e.p);
}

template <Scalar S>
DensityReport<S> density_of(const Experiment<S>& e, const TruncVector<S>& candidate) {
    if (!e.family) missing("family");
    return density_score(e.op, candidate, subspace_of(e), *e.family, density_targets(e),
                         e.tolerances.epsilon, e.run_options());
}

template <Scalar S>
DensityReport<S> density_of(const Experiment<S>& e) {
    return density_of(e, density_candidate(e));
}

template <Scalar S>
CriterionVerdict criterion_of(const Experiment<S>& e, CriterionKind which) {
    const auto inst = e.criterion_instance();
    if (which == CriterionKind::Invariance)
        return check_criterion_I(inst, e.horizon, e.tolerances.convergence, e.run_options());
    return check_criterion_II(inst, e.horizon, e.tolerances.convergence, e.run_options());
}

template <Scalar S>
TransitivityReport<S> transitivity_of(const Experiment<S>& e) {
    if (!e.transitivity) missing("transitivity");
    if (!e.family) missing("family");
    if (!e.seed) fail(ErrorCode::ConfigError, "seed: required when sampling is requested");
    return transitivity_search(e.op, subspace_of(e), e.transitivity->pairs, *e.family,
                               e.transitivity->samples_per_ball, *e.seed, e.run_options());
}

template <Scalar S>
ScreenReport screen_of(const Experiment<S>& e) {
    const ScreenBlock sb = e.screen.value_or(ScreenBlock{});
    if (!sb.block) return screen_necessary_conditions(e.op, e.dim, sb.horizon, sb.growth_threshold);
    const auto* ds = std::get_if<DirectSum<S>>(&e.op.kind);
    if (!ds) fail(ErrorCode::ConfigError, "screen.block: operator is not a direct sum");
    if (ds->left_dim >= e.dim) fail(ErrorCode::DimensionMismatch, "direct sum split needs dim > left_dim");
    if (*sb.block == BlockPosition::Left)
        return screen_necessary_conditions(*ds->left, ds->left_dim, sb.horizon, sb.growth_threshold);
    return screen_necessary_conditions(*ds->right, e.dim - ds->left_dim, sb.horizon, sb.growth_threshold);
}

RunResult run_density(const AnyExperiment& e, const Overrides& o) {
    return visit_experiment(e, o, [](const auto& x) { return density_run(density_of(x)); });
}

RunResult run_criterion(const AnyExperiment& e, CriterionKind which, const Overrides& o) {
    return visit_experiment(e, o, [&](const auto& x) {
        return criterion_run(criterion_of(x, which), subspace_of(x));
    });
}

RunResult run_transitivity(const AnyExperiment& e, const Overrides& o) {
    return visit_experiment(e, o, [](const auto& x) { return transitivity_run(transitivity_of(x)); });
}

RunResult run_build(const AnyExperiment& e, const Overrides& o) {
    return visit_experiment(e, o, [](const auto& x) {
        try {
            return build_run(build_of(x));
        } catch (const ScheduleInfeasible& err) {
            return build_failure_run(err);
        }
    });
}

RunResult run_screen(const AnyExperiment& e, const Overrides& o) {
    return visit_experiment(e, o, [](const auto& x) {
        std::string scope = "operator";
        if (x.screen && x.screen->block)
            scope = *x.screen->block == BlockPosition::Left ? "left block" : "right block";
        return screen_run(screen_of(x), scope);
    });
}

namespace {

template <Scalar S>
std::vector<CheckOutcome> verify_typed(const Experiment<S>& e) {
    std::vector<CheckOutcome> out;
    const auto& ex = e.expected;
    auto timed = [&](const std::string& name, auto&& body) {
        const auto t0 = std::chrono::steady_clock::now();
        CheckOutcome c;
        c.check = name;
        try {
            body(c);
        } catch (const std::exception& err) {
            c.actual = std::string("error: ") + err.what();
            c.ok = false;
        }
        c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(std::move(c));
    };
    const auto m = subspace_of(e);

    auto criterion_check = [&](CriterionKind which, const ConditionFlags& want) {
        return [&, which, want](CheckOutcome& c) {
            const auto v = criterion_of(e, which);
            const ConditionFlags got{v.cond1.pass, v.cond2.pass, v.cond3.pass};
            c.expected = flags_str(want);
            c.actual = flags_str(got);
            c.ok = got == want;
            if (!want.cond3) {
                // A failing invariance/preimage step must point outside M.
                const auto landing = v.cond3.first_landing_index();
                c.actual += landing ? ", lands on e_" + std::to_string(*landing) : ", no landing index";
                c.ok = c.ok && landing && !m.contains(*landing);
            }
        };
    };
    if (ex.criterion_I) timed("criterion I", criterion_check(CriterionKind::Invariance, *ex.criterion_I));
    if (ex.criterion_II) timed("criterion II", criterion_check(CriterionKind::Preimage, *ex.criterion_II));

    std::optional<TruncVector<S>> built;
    if (ex.build) {
        timed("build", [&](CheckOutcome& c) {
            c.expected = *ex.build == BuildExpectation::Succeeds ? "succeeds" : "infeasible";
            try {
                auto res = build_of(e);
                c.actual = res.verified() ? "succeeds" : "post-verification failed";
                if (res.verified()) built = res.x;
            } catch (const ScheduleInfeasible& err) {
                c.actual = "infeasible at step " + std::to_string(err.step());
            }
            c.ok = c.actual.rfind(c.expected, 0) == 0;
        });
    }

    auto candidate = [&]() -> TruncVector<S> {
        if (e.density && std::holds_alternative<BuildCandidate>(e.density->candidate) && built) return *built;
        return density_candidate(e);
    };

    if (ex.density) {
        timed("density", [&](CheckOutcome& c) {
            const auto rep = density_of(e, candidate());
            auto name = [](DensityVerdict v) { return v == DensityVerdict::DenseAtScale ? "dense" : "not_covered"; };
            c.expected = name(*ex.density);
            std::ostringstream os;
            os << name(rep.verdict) << " (worst " << rep.worst_distance() << ")";
            c.actual = os.str();
            c.ok = rep.verdict == *ex.density;
        });
    }

    if (ex.orbit_confined) {
        timed("orbit confined", [&](CheckOutcome& c) {
            if (!e.family) missing("family");
            const auto orbit = orbit_segment(e.op, candidate(), *e.family, e.run_options().eval);
            bool confined = true;
            for (const auto& pt : orbit) confined = confined && pt.dim() == m.dim() && distance_to_subspace(pt, m) == 0.0;
            c.expected = *ex.orbit_confined ? "confined" : "leaves M";
            c.actual = confined ? "confined" : "leaves M";
            c.ok = confined == *ex.orbit_confined;
        });
    }

    if (ex.transitivity) {
        timed("transitivity", [&](CheckOutcome& c) {
            const auto rep = transitivity_of(e);
            std::size_t found = 0;
            for (const auto& p : rep.per_pair) found += p.found;
            c.expected = transitivity_name(*ex.transitivity);
            c.actual = std::to_string(found) + " of " + std::to_string(rep.per_pair.size()) + " found";
            switch (*ex.transitivity) {
                case TransitivityExpectation::AllFound: c.ok = rep.all_found(); break;
                case TransitivityExpectation::AnyFound: c.ok = rep.any_found(); break;
                case TransitivityExpectation::NoneFound: c.ok = !rep.any_found(); break;
            }
        });
    }

    if (ex.screen_passes) {
        timed("screen", [&](CheckOutcome& c) {
            const auto rep = screen_of(e);
            c.expected = *ex.screen_passes ? "passes" : "fails";
            c.actual = rep.passed() ? "passes" : "fails";
            c.ok = rep.passed() == *ex.screen_passes;
        });
    }
    return out;
}

}  // namespace

std::vector<CheckOutcome> verify_expectations(const AnyExperiment& e, const Overrides& o) {
    return visit_experiment(e, o, [](const auto& x) { return verify_typed(x); });
}

#define CCLAB_INSTANTIATE(S)                                                                   \
    template Experiment<S> with_overrides(Experiment<S>, const Overrides&);                    \
    template BasisIndexSet subspace_of(const Experiment<S>&);                                  \
    template TruncVector<S> density_candidate(const Experiment<S>&);                           \
    template std::vector<TruncVector<S>> density_targets(const Experiment<S>&);                \
    template DensityReport<S> density_of(const Experiment<S>&);                                \
    template DensityReport<S> density_of(const Experiment<S>&, const TruncVector<S>&);         \
    template CriterionVerdict criterion_of(const Experiment<S>&, CriterionKind);               \
    template BuildResult<S> build_of(const Experiment<S>&);                                    \
    template TransitivityReport<S> transitivity_of(const Experiment<S>&);                      \
    template ScreenReport screen_of(const Experiment<S>&);

CCLAB_INSTANTIATE(double)
CCLAB_INSTANTIATE(Complex)
#undef CCLAB_INSTANTIATE

}  // namespace cclab
