#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "cclab/config.hpp"
#include "cclab/error.hpp"

namespace cclab {

/// Everything one command run produces. `records` holds one JSON record per
/// target/pair/step followed by a single summary record; all of it is a pure
/// function of the experiment, so reruns give byte-identical files.
struct RunResult {
    std::string command;
    int exit_code = 2;
    std::vector<json> records;
    std::string text;
    /// (file name, CSV content)
    std::vector<std::pair<std::string, std::string>> tables;
    /// (file name, JSON payload), e.g. the built vector
    std::vector<std::pair<std::string, json>> artifacts;

    const json& summary() const { return records.back(); }
};

std::string to_jsonl(const std::vector<json>& records);

/// Writes <command>.jsonl, <command>.txt, the tables and artifacts, plus
/// metadata.json (timestamps and tool version, kept apart from the payload).
void write_run(const RunResult& run, const std::filesystem::path& dir);

template <Scalar S>
RunResult density_run(const DensityReport<S>& rep);

template <Scalar S>
RunResult transitivity_run(const TransitivityReport<S>& rep);

RunResult criterion_run(const CriterionVerdict& v, const BasisIndexSet& m);

template <Scalar S>
RunResult build_run(const BuildResult<S>& res);

RunResult build_failure_run(const ScheduleInfeasible& e);

RunResult screen_run(const ScreenReport& rep, const std::string& scope);

}  // namespace cclab
