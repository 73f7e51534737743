#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "nambd/experiment.hpp"
#include "nambd/rates.hpp"

namespace nambd::io {

inline constexpr const char* kArtifactVersion = "nambd 0.1.0";

// Experiment config file (JSON). Keys: reference ("analytic" or a number),
// e, c, grid (list of {a,b,q,D[,particle_radius]} or {model: <.spi path>, D}),
// engines (list of {rng, detector, stepsize}), seed, pilot_n, max_n, step_cap.
ExperimentSpec spec_from_json(const nlohmann::json& j,
                              const std::filesystem::path& base_dir = {});
ExperimentSpec load_spec(const std::filesystem::path& file);

nlohmann::json spec_to_json(const ExperimentSpec& spec);
nlohmann::json engine_to_json(const SimulatorConfig& config);

// Fig. 5-style table, one row per (geometry x engine) cell.
std::string report_to_csv(const ExperimentReport& report);

// Full report: rows plus plot-ready per-engine series (D on x, beta_hat on y,
// reference value alongside). Byte-stable for identical verdicts; wall times
// live in the manifest instead.
nlohmann::json report_to_json(const ExperimentReport& report);

// One record per replication: {cell, replication, end_state, steps, model_time}.
std::string replications_to_jsonl(const std::vector<ConfigurationVerdict>& verdicts);

// Everything needed to re-execute bit-identically: spec snapshot, seed,
// version, per-cell statistics and wall times.
nlohmann::json manifest_to_json(const ExperimentSpec& spec,
                                const std::vector<ConfigurationVerdict>& verdicts);

// Potential description for the rates CLI:
//   {"kind": "zero"} or
//   {"kind": "debye_huckel", "prefactor": Q, "kappa": k}  => E(r) = Q exp(-k r)/r
PotentialOfMeanForce pmf_from_json(const nlohmann::json& j);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace nambd::io
