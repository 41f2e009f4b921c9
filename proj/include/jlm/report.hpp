#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

#include "jlm/eval.hpp"
#include "jlm/sysfile.hpp"

namespace jlm {

using Json = nlohmann::ordered_json;

struct PipelineOptions {
    bool all_families = false;
    std::optional<double> h;      // integration step override (default 1e-3)
    std::optional<double> tspan;  // time-span override (default from the file, else 1)
    std::uint64_t seed = kDefaultSeed;
    double tolerance = 1e-9;  // numeric-equivalence tolerance
    bool timing = false;      // include wall-clock timing in the report
};

struct PipelineResult {
    Json report;
    // 0 ok; 1 parse, 2 no multiplier, 3 construction failure, 4 verification
    // failure, 5 I/O.
    int exit_code = 0;
};

/// Full pipeline for one system: multiplier search, Lagrangian construction,
/// canonical coordinates, symbolic verification, numeric verification, and
/// comparison against any expected results carried by the file. Never throws;
/// failures are embedded in the report and reflected in the exit code.
PipelineResult run_pipeline(const SystemFile& sf, const PipelineOptions& opt = {});

/// Force-template report for a multiplier profile of a given shape, with a
/// round-trip verification on a generated instance.
PipelineResult run_classify(const std::string& shape, const std::string& mu_text,
                            const PipelineOptions& opt = {});

/// Plain-text rendering of a report produced by run_pipeline / run_classify.
std::string render_text(const Json& report);

/// Numeric values for every parameter: declared test values where given,
/// otherwise deterministic rationals in (0, 2] drawn from the seed, avoiding
/// values that collapse any of the side-condition expressions.
Bindings parameter_values(const FirstOrderSystem& sys, std::uint64_t seed,
                          const std::vector<Expr>& conditions = {});

}  // namespace jlm
