#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace wavegraph::cli {

/// Invalid or incomplete experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One line of `experiment,n,N,t,R,seed,estimate,stderr,bound`; empty optionals
/// are written as empty fields.
struct ResultRow {
    std::string experiment;
    std::optional<std::int64_t> n;
    std::optional<std::int64_t> N;
    double t = 0.0;
    std::optional<std::int64_t> R;
    std::optional<std::uint64_t> seed;
    double estimate = 0.0;
    std::optional<double> stderr_;
    std::optional<double> bound;
};

struct ExperimentResult {
    std::string experiment;
    nlohmann::json config;  // fully resolved, defaults filled in
    std::vector<ResultRow> rows;
    nlohmann::json details = nlohmann::json::object();
    /// Extra CSV files keyed by suffix, e.g. "solution" -> body without metadata lines.
    std::vector<std::pair<std::string, std::string>> attachments;
};

const std::vector<std::string>& experiment_kinds();
/// Maps long names (feynman-kac, mean-field-check, ...) to subcommand names.
std::string canonical_kind(const std::string& name);

nlohmann::json load_config(const std::filesystem::path& path);
/// Applies `a.b.c=value`; the value is parsed as JSON when possible, else taken as a string.
void apply_override(nlohmann::json& config, const std::string& assignment);

/// Relative file references in the config resolve against `base_dir`.
ExperimentResult run_experiment(const std::string& kind, nlohmann::json config,
                                const std::filesystem::path& base_dir = ".");

/// FNV-1a over the compact dump of the resolved config without "threads" and "output".
std::uint64_t config_hash(const nlohmann::json& resolved);
std::string hash_string(std::uint64_t h);

std::string render_csv(const ExperimentResult& result);
nlohmann::json render_summary(const ExperimentResult& result);

/// Output path of the main CSV: config "output" (default `<kind>.csv`),
/// relative paths taken under WAVEGRAPH_OUTPUT_DIR when set.
std::filesystem::path output_path(const ExperimentResult& result);

/// Writes the CSV, the JSON summary next to it and the attachments; returns the paths written.
std::vector<std::filesystem::path> write_outputs(const ExperimentResult& result);

}  // namespace wavegraph::cli
