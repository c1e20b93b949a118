#ifndef HALFSPACE_CONFIG_HPP
#define HALFSPACE_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "halfspace/learner.hpp"
#include "halfspace/oracle.hpp"
#include "halfspace/sampling.hpp"

namespace halfspace {

enum class RunMode { active, passive, baseline };

std::string to_string(RunMode mode);
RunMode run_mode_from_string(std::string_view name);

// Axes swept by `sweep`; an empty axis keeps the base value.
struct SweepGrid {
  std::vector<double> epsilon;
  std::vector<std::size_t> d;
  std::vector<std::size_t> s;
  std::vector<double> nu;

  bool empty() const { return epsilon.empty() && d.empty() && s.empty() && nu.empty(); }
};

struct DiagConfig {
  std::vector<std::string> suites;  // empty after validation is an error
  double band_mass_c2 = 0.1;
  std::size_t n = 100'000;
  std::size_t expansion_trials = 1000;
  std::size_t ledger_iterations = 500;
};

struct RunConfig {
  double epsilon = 0.0;
  double delta = 0.0;
  std::size_t d = 0;
  std::size_t s = 0;
  std::vector<std::uint64_t> seeds;
  std::uint64_t master_seed = 0;
  MarginalKind marginal = MarginalKind::gaussian;
  NoiseSpec noise;
  std::vector<RunMode> modes{RunMode::active};
  ConstantsConfig constants;
  std::size_t metric_n = 100'000;
  std::size_t baseline_m = 100'000;
  std::size_t workers = 1;
  SweepGrid sweep;
  DiagConfig diag;
};

std::vector<std::string> all_diag_suites();

/// Parses and validates; throws config_error naming the offending field.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

/// Checks ranges on an already-built config; throws config_error.
void validate(const RunConfig& cfg);

/// Fully populated, key-sorted form of the config.
nlohmann::json canonical_json(const RunConfig& cfg);

/// FNV-1a 64 over the compact canonical JSON, as 16 hex digits.
std::string fingerprint(const RunConfig& cfg);

}  // namespace halfspace

#endif  // HALFSPACE_CONFIG_HPP
