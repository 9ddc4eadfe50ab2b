// Copyright the sgfem authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SGFEM_CORE_DRIVER_HPP
#define SGFEM_CORE_DRIVER_HPP

#include <string>
#include <vector>

#include "json.hpp"

#include "core/adapt.hpp"
#include "core/problems.hpp"

namespace sgfem
{

struct ReferenceControls
{
  int extra_refinements = 1;
  int index_enrichments = 1;  // times P <- P + Q(P) is applied
  long long max_dofs = 4000000;
};

struct RunConfig
{
  std::string problem = "experiment2";
  nlohmann::json problem_options = nlohmann::json::object();
  MarkingParams marking;
  double solver_tol = 1e-10;
  int solver_max_iterations = 1000;
  std::string output_dir = "run";
  ReferenceControls reference;
  unsigned seed = 0;

  nlohmann::json to_json() const;
};

/// Parses a config; unknown keys and out-of-range values raise ConfigError naming the field.
RunConfig parse_config(const nlohmann::json &j);
RunConfig load_config(const std::string &path);

/// Output directory after applying the SGFEM_OUTPUT_ROOT override to relative paths.
std::string resolve_output_dir(const std::string &dir);

struct RunSummary
{
  std::string status;
  std::string output_dir;
  int iterations = 0;        // L
  double final_product = 0.0;
  long long n_total = 0;
  long long final_dofs = 0;
  int n_elements = 0;
  int card_P = 0;
  int active_M = 0;
  double goal_value = 0.0;
  std::vector<IterationRecord> records;
};

/// Runs the adaptive loop and writes convergence.csv, index_sets.txt, final_mesh.txt,
/// summary.json, config.json and the final indicator CSVs.
RunSummary run_experiment(const RunConfig &config);

struct ReferenceSummary
{
  double goal_value = 0.0;
  long long dofs = 0;
  int n_elements = 0;
  int card_P = 0;
  std::vector<double> effectivity;
};

/// Overkill solution on uniformly refined final mesh with P_L and its detail set; writes
/// reference.json and effectivity.csv into the run directory.
ReferenceSummary reference_goal(const std::string &run_dir);

std::string format_number(double v);

}  // namespace sgfem

#endif  // SGFEM_CORE_DRIVER_HPP
