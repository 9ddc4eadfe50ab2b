// Copyright the sgfem authors.
// SPDX-License-Identifier: Apache-2.0

#include "sgfem/sgfem.h"

#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "core/driver.hpp"
#include "core/error.hpp"

struct sgfem_config
{
  sgfem::RunConfig config;
  std::string text;
};

struct sgfem_result
{
  sgfem::RunSummary summary;
  std::vector<std::string> added;
};

namespace
{

thread_local std::string last_error;

sgfem_status code_of(sgfem::ErrorKind kind)
{
  switch (kind) {
  case sgfem::ErrorKind::input:
    return SGFEM_ERR_INPUT;
  case sgfem::ErrorKind::numeric:
    return SGFEM_ERR_NUMERIC;
  case sgfem::ErrorKind::config:
    return SGFEM_ERR_CONFIG;
  case sgfem::ErrorKind::io:
    return SGFEM_ERR_IO;
  case sgfem::ErrorKind::limit:
    return SGFEM_ERR_LIMIT;
  }
  return SGFEM_ERR_INTERNAL;
}

template <class F>
sgfem_status guarded(F &&f)
{
  try {
    f();
    last_error.clear();
    return SGFEM_OK;
  } catch (const sgfem::Error &e) {
    last_error = e.what();
    return code_of(e.kind());
  } catch (const std::bad_alloc &) {
    last_error = "out of memory";
    return SGFEM_ERR_LIMIT;
  } catch (const std::exception &e) {
    last_error = e.what();
    return SGFEM_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return SGFEM_ERR_INTERNAL;
  }
}

sgfem_status null_argument(const char *what)
{
  last_error = std::string("null argument: ") + what;
  return SGFEM_ERR_INPUT;
}

}  // namespace

extern "C" {

const char *sgfem_version(void)
{
  return "1.0.0";
}

const char *sgfem_last_error(void)
{
  return last_error.c_str();
}

const char *sgfem_status_name(sgfem_status status)
{
  switch (status) {
  case SGFEM_OK:
    return "ok";
  case SGFEM_ERR_INPUT:
    return "input error";
  case SGFEM_ERR_NUMERIC:
    return "numeric error";
  case SGFEM_ERR_CONFIG:
    return "config error";
  case SGFEM_ERR_IO:
    return "io error";
  case SGFEM_ERR_LIMIT:
    return "limit exceeded";
  case SGFEM_ERR_INTERNAL:
    return "internal error";
  }
  return "unknown status";
}

int sgfem_problem_count(void)
{
  return static_cast<int>(sgfem::problem_names().size());
}

sgfem_status sgfem_problem_name(int i, const char **name)
{
  if (!name) {
    return null_argument("name");
  }
  static const std::vector<std::string> names = sgfem::problem_names();
  if (i < 0 || i >= static_cast<int>(names.size())) {
    last_error = "problem index out of range";
    return SGFEM_ERR_INPUT;
  }
  *name = names[i].c_str();
  return SGFEM_OK;
}

sgfem_status sgfem_config_load(const char *path, sgfem_config **out)
{
  if (!path || !out) {
    return null_argument(!path ? "path" : "out");
  }
  *out = nullptr;
  return guarded([&] {
    auto c = std::make_unique<sgfem_config>();
    c->config = sgfem::load_config(path);
    c->text = c->config.to_json().dump(2);
    *out = c.release();
  });
}

sgfem_status sgfem_config_parse(const char *json_text, sgfem_config **out)
{
  if (!json_text || !out) {
    return null_argument(!json_text ? "json_text" : "out");
  }
  *out = nullptr;
  return guarded([&] {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error &e) {
      throw sgfem::ConfigError(std::string("config: ") + e.what());
    }
    auto c = std::make_unique<sgfem_config>();
    c->config = sgfem::parse_config(j);
    c->text = c->config.to_json().dump(2);
    *out = c.release();
  });
}

sgfem_status sgfem_config_json(const sgfem_config *config, const char **text)
{
  if (!config || !text) {
    return null_argument(!config ? "config" : "text");
  }
  *text = config->text.c_str();
  return SGFEM_OK;
}

void sgfem_config_free(sgfem_config *config)
{
  delete config;
}

sgfem_status sgfem_run(const sgfem_config *config, sgfem_result **out)
{
  if (!config || !out) {
    return null_argument(!config ? "config" : "out");
  }
  *out = nullptr;
  return guarded([&] {
    auto r = std::make_unique<sgfem_result>();
    r->summary = sgfem::run_experiment(config->config);
    for (const auto &rec : r->summary.records) {
      std::string s;
      for (const auto &nu : rec.added) {
        s += (s.empty() ? "" : " ") + nu.str();
      }
      r->added.push_back(std::move(s));
    }
    *out = r.release();
  });
}

void sgfem_result_free(sgfem_result *result)
{
  delete result;
}

sgfem_status sgfem_result_status(const sgfem_result *result, const char **status)
{
  if (!result || !status) {
    return null_argument(!result ? "result" : "status");
  }
  *status = result->summary.status.c_str();
  return SGFEM_OK;
}

sgfem_status sgfem_result_output_dir(const sgfem_result *result, const char **dir)
{
  if (!result || !dir) {
    return null_argument(!result ? "result" : "dir");
  }
  *dir = result->summary.output_dir.c_str();
  return SGFEM_OK;
}

sgfem_status sgfem_result_count(const sgfem_result *result, int *count)
{
  if (!result || !count) {
    return null_argument(!result ? "result" : "count");
  }
  *count = static_cast<int>(result->summary.records.size());
  return SGFEM_OK;
}

sgfem_status sgfem_result_record(const sgfem_result *result, int i, sgfem_record *out)
{
  if (!result || !out) {
    return null_argument(!result ? "result" : "out");
  }
  if (i < 0 || i >= static_cast<int>(result->summary.records.size())) {
    last_error = "record index out of range";
    return SGFEM_ERR_INPUT;
  }
  const sgfem::IterationRecord &r = result->summary.records[i];
  out->iter = r.iter;
  out->dofs = r.dofs;
  out->mu = r.mu;
  out->zeta = r.zeta;
  out->product = r.product;
  out->n_elements = r.n_elements;
  out->card_P = r.card_P;
  out->active_M = r.active_M;
  out->decision = r.decision == "spatial"      ? SGFEM_DECISION_SPATIAL
                  : r.decision == "parametric" ? SGFEM_DECISION_PARAMETRIC
                                               : SGFEM_DECISION_NONE;
  out->goal_value = r.goal_value;
  out->rho_x = r.rho_x;
  out->rho_p = r.rho_p;
  return SGFEM_OK;
}

sgfem_status sgfem_result_added(const sgfem_result *result, int i, const char **text)
{
  if (!result || !text) {
    return null_argument(!result ? "result" : "text");
  }
  if (i < 0 || i >= static_cast<int>(result->added.size())) {
    last_error = "record index out of range";
    return SGFEM_ERR_INPUT;
  }
  *text = result->added[i].c_str();
  return SGFEM_OK;
}

sgfem_status sgfem_result_total_dofs(const sgfem_result *result, long long *n_total)
{
  if (!result || !n_total) {
    return null_argument(!result ? "result" : "n_total");
  }
  *n_total = result->summary.n_total;
  return SGFEM_OK;
}

sgfem_status sgfem_reference(const char *run_dir, sgfem_reference_info *out)
{
  if (!run_dir || !out) {
    return null_argument(!run_dir ? "run_dir" : "out");
  }
  return guarded([&] {
    const sgfem::ReferenceSummary r = sgfem::reference_goal(run_dir);
    out->goal_value = r.goal_value;
    out->dofs = r.dofs;
    out->n_elements = r.n_elements;
    out->card_P = r.card_P;
  });
}

}  // extern "C"
