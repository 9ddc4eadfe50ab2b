// Copyright the sgfem authors.
// SPDX-License-Identifier: Apache-2.0

// Command line front end. Talks to the library only through the C interface.

#include <cstdio>
#include <string>

#include "CLI11.hpp"

#include "sgfem/sgfem.h"

namespace
{

int fail(sgfem_status s)
{
  std::fprintf(stderr, "sgfem: %s: %s\n", sgfem_status_name(s), sgfem_last_error());
  return static_cast<int>(s);
}

int cmd_run(const std::string &path, bool quiet)
{
  sgfem_config *config = nullptr;
  sgfem_status s = sgfem_config_load(path.c_str(), &config);
  if (s != SGFEM_OK) {
    return fail(s);
  }
  sgfem_result *result = nullptr;
  s = sgfem_run(config, &result);
  sgfem_config_free(config);
  if (s != SGFEM_OK) {
    return fail(s);
  }
  int n = 0;
  sgfem_result_count(result, &n);
  if (!quiet) {
    for (int i = 0; i < n; ++i) {
      sgfem_record r;
      sgfem_result_record(result, i, &r);
      const char *added = "";
      sgfem_result_added(result, i, &added);
      const char *what = r.decision == SGFEM_DECISION_SPATIAL      ? "spatial"
                         : r.decision == SGFEM_DECISION_PARAMETRIC ? "parametric"
                                                                   : "none";
      std::printf("%4d  dofs %10lld  mu %.3e  zeta %.3e  mu*zeta %.3e  #P %3d  %s %s\n", r.iter,
                  r.dofs, r.mu, r.zeta, r.product, r.card_P, what, added);
    }
  }
  const char *status = "";
  const char *dir = "";
  long long total = 0;
  sgfem_result_status(result, &status);
  sgfem_result_output_dir(result, &dir);
  sgfem_result_total_dofs(result, &total);
  std::printf("status %s, %d iterations, N_total %lld, artifacts in %s\n", status, n, total, dir);
  sgfem_result_free(result);
  return 0;
}

int cmd_reference(const std::string &dir)
{
  sgfem_reference_info info;
  const sgfem_status s = sgfem_reference(dir.c_str(), &info);
  if (s != SGFEM_OK) {
    return fail(s);
  }
  std::printf("G(u_ref) = %.9g  (%lld dofs, %d elements, #P %d)\n", info.goal_value, info.dofs,
              info.n_elements, info.card_P);
  return 0;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Goal-oriented adaptive stochastic Galerkin FEM"};
  app.set_version_flag("--version", std::string(sgfem_version()));
  app.require_subcommand(1);

  std::string config_path;
  bool quiet = false;
  auto *run = app.add_subcommand("run", "Run the adaptive loop for a JSON config");
  run->add_option("config", config_path, "config file")->required();
  run->add_flag("-q,--quiet", quiet, "only print the summary line");

  std::string run_dir;
  auto *ref = app.add_subcommand("reference", "Reference goal value and effectivity indices");
  ref->add_option("run-dir", run_dir, "directory of a finished run")->required();

  app.add_subcommand("list-problems", "Print the built-in problem names");

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    return cmd_run(config_path, quiet);
  }
  if (*ref) {
    return cmd_reference(run_dir);
  }
  for (int i = 0; i < sgfem_problem_count(); ++i) {
    const char *name = nullptr;
    sgfem_problem_name(i, &name);
    std::printf("%s\n", name);
  }
  return 0;
}
