#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cclab/commands.hpp"
#include "cclab/error.hpp"
#include "cclab/gallery.hpp"
#include "cclab/polynomial.hpp"

namespace py = pybind11;

namespace {

cclab::Overrides overrides(std::optional<std::uint64_t> seed, std::optional<std::size_t> horizon,
                           std::optional<double> epsilon, std::optional<std::size_t> threads) {
    return {seed, horizon, epsilon, threads};
}

py::dict run(const std::string& command, const std::string& config, const std::string& which,
             std::optional<std::uint64_t> seed, std::optional<std::size_t> horizon, std::optional<double> epsilon,
             std::optional<std::size_t> threads) {
    const auto e = cclab::parse_experiment(cclab::json::parse(config));
    const auto o = overrides(seed, horizon, epsilon, threads);
    cclab::RunResult r;
    {
        py::gil_scoped_release release;
        if (command == "density") r = cclab::run_density(e, o);
        else if (command == "criterion") {
            if (which != "I" && which != "II")
                throw cclab::Error(cclab::ErrorCode::InvalidArgument, "which must be 'I' or 'II'");
            r = cclab::run_criterion(e, which == "I" ? cclab::CriterionKind::Invariance : cclab::CriterionKind::Preimage, o);
        } else if (command == "transitivity") r = cclab::run_transitivity(e, o);
        else if (command == "build") r = cclab::run_build(e, o);
        else if (command == "screen") r = cclab::run_screen(e, o);
        else throw cclab::Error(cclab::ErrorCode::InvalidArgument, "unknown command " + command);
    }
    py::dict out;
    out["command"] = r.command;
    out["exit_code"] = r.exit_code;
    out["records"] = cclab::to_jsonl(r.records);
    out["text"] = r.text;
    return out;
}

std::vector<py::dict> verify(const std::string& config, std::optional<std::size_t> threads) {
    const auto e = cclab::parse_experiment(cclab::json::parse(config));
    cclab::Overrides o;
    o.threads = threads;
    std::vector<cclab::CheckOutcome> outcomes;
    {
        py::gil_scoped_release release;
        outcomes = cclab::verify_expectations(e, o);
    }
    std::vector<py::dict> out;
    for (const auto& c : outcomes) {
        py::dict d;
        d["check"] = c.check;
        d["expected"] = c.expected;
        d["actual"] = c.actual;
        d["ok"] = c.ok;
        out.push_back(d);
    }
    return out;
}

// The operator is parsed through a throwaway experiment so that it follows
// the config schema exactly.
std::vector<double> eval_poly(const std::vector<double>& coeffs, const std::string& op, const std::vector<double>& v) {
    std::vector<std::size_t> all(v.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const cclab::json j = {{"version", 1},
                           {"name", "eval"},
                           {"dim", v.size()},
                           {"operator", cclab::json::parse(op)},
                           {"subspace", {{"kind", "index_set"}, {"indices", all}}}};
    const auto e = std::get<cclab::Experiment<double>>(cclab::parse_experiment(j));
    cclab::TruncVector<double> x(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) x[i] = v[i];
    const auto y = cclab::eval_poly(cclab::ConvexPolynomial(coeffs), e.op, x);
    std::vector<double> out(y.dim());
    for (std::size_t i = 0; i < y.dim(); ++i) out[i] = y[i];
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "cclab core bindings";
    py::register_exception<cclab::Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<cclab::json::exception>(m, "JsonError", PyExc_ValueError);

    m.def("gallery_list", [] {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& e : cclab::gallery_entries()) out.emplace_back(e.name, e.summary);
        return out;
    });
    m.def("gallery_dump", [](const std::string& name) {
        const auto e = cclab::find_entry(name);
        if (!e) throw cclab::Error(cclab::ErrorCode::InvalidArgument, "no gallery entry named " + name);
        return cclab::format_config(cclab::to_json(e->experiment));
    });
    m.def("run", &run, py::arg("command"), py::arg("config"), py::arg("which") = "I", py::arg("seed") = py::none(),
          py::arg("horizon") = py::none(), py::arg("epsilon") = py::none(), py::arg("threads") = py::none());
    m.def("verify", &verify, py::arg("config"), py::arg("threads") = py::none());
    m.def("eval_poly", &eval_poly, py::arg("coeffs"), py::arg("operator"), py::arg("vector"));
}
