// Copyright the sgfem authors.
// SPDX-License-Identifier: Apache-2.0

#include "core/driver.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "core/error.hpp"
#include "core/estimator.hpp"
#include "core/solver.hpp"

namespace sgfem
{

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_number(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

namespace
{

template <class T>
T field(const json &j, const std::string &key, T fallback, const std::string &where)
{
  if (!j.contains(key)) {
    return fallback;
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception &) {
    throw ConfigError(where + key + ": wrong type");
  }
}

void reject_unknown(const json &j, const std::set<std::string> &allowed, const std::string &where)
{
  if (!j.is_object()) {
    throw ConfigError(where + "expected a JSON object");
  }
  for (const auto &[key, value] : j.items()) {
    if (!allowed.count(key)) {
      throw ConfigError(where + key + ": unknown key");
    }
  }
}

json number_json(double v)
{
  // round-trip through the printed form so config.json matches the CSV precision policy
  if (!std::isfinite(v)) {
    return nullptr;
  }
  return json::parse(format_number(v));
}

std::ofstream open_out(const fs::path &p)
{
  std::ofstream out(p);
  if (!out) {
    throw IoError("cannot write " + p.string());
  }
  return out;
}

void write_json(const fs::path &p, const json &j)
{
  auto out = open_out(p);
  out << j.dump(2) << '\n';
}

void write_indicators(const fs::path &dir, const RunState &state)
{
  if (state.primal.spatial.empty() && state.primal.parametric.empty()) {
    return;
  }
  auto a = open_out(dir / "indicators_spatial_primal.csv");
  write_spatial_csv(a, state.primal);
  auto b = open_out(dir / "indicators_spatial_dual.csv");
  write_spatial_csv(b, state.dual);
  auto c = open_out(dir / "indicators_parametric_primal.csv");
  write_parametric_csv(c, state.primal);
  auto d = open_out(dir / "indicators_parametric_dual.csv");
  write_parametric_csv(d, state.dual);
}

json read_json(const fs::path &p)
{
  std::ifstream in(p);
  if (!in) {
    throw IoError("cannot read " + p.string());
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error &e) {
    throw ConfigError(p.string() + ": " + e.what());
  }
}

}  // namespace

json RunConfig::to_json() const
{
  json j;
  j["problem"] = problem;
  j["problem_options"] = problem_options;
  j["theta_x"] = number_json(marking.theta_x);
  j["theta_p"] = number_json(marking.theta_p);
  j["m_bar"] = marking.m_bar;
  j["tol"] = number_json(marking.tol);
  j["max_iterations"] = marking.max_iterations;
  j["solver_tol"] = number_json(solver_tol);
  j["solver_max_iterations"] = solver_max_iterations;
  j["output_dir"] = output_dir;
  j["reference"] = {{"extra_refinements", reference.extra_refinements},
                    {"index_enrichments", reference.index_enrichments},
                    {"max_dofs", reference.max_dofs}};
  j["seed"] = seed;
  return j;
}

RunConfig parse_config(const json &j)
{
  reject_unknown(j,
                 {"problem", "problem_options", "theta_x", "theta_p", "m_bar", "tol",
                  "max_iterations", "solver_tol", "solver_max_iterations", "output_dir",
                  "reference", "seed"},
                 "config: ");
  RunConfig c;
  c.problem = field<std::string>(j, "problem", c.problem, "config: ");
  if (j.contains("problem_options")) {
    c.problem_options = j["problem_options"];
    if (!c.problem_options.is_object()) {
      throw ConfigError("config: problem_options: expected a JSON object");
    }
  }
  // problem defaults first, then explicit keys
  const ProblemSpec spec = make_problem(c.problem, c.problem_options);
  c.marking = spec.defaults;
  c.marking.theta_x = field<double>(j, "theta_x", c.marking.theta_x, "config: ");
  c.marking.theta_p = field<double>(j, "theta_p", c.marking.theta_p, "config: ");
  c.marking.m_bar = field<int>(j, "m_bar", c.marking.m_bar, "config: ");
  c.marking.tol = field<double>(j, "tol", c.marking.tol, "config: ");
  c.marking.max_iterations = field<int>(j, "max_iterations", c.marking.max_iterations, "config: ");
  c.solver_tol = field<double>(j, "solver_tol", c.solver_tol, "config: ");
  c.solver_max_iterations =
    field<int>(j, "solver_max_iterations", c.solver_max_iterations, "config: ");
  c.output_dir = field<std::string>(j, "output_dir", c.output_dir, "config: ");
  c.seed = field<unsigned>(j, "seed", c.seed, "config: ");
  if (j.contains("reference")) {
    const json &r = j["reference"];
    reject_unknown(r, {"extra_refinements", "index_enrichments", "max_dofs"},
                   "config: reference.");
    c.reference.extra_refinements =
      field<int>(r, "extra_refinements", c.reference.extra_refinements, "config: reference.");
    c.reference.index_enrichments =
      field<int>(r, "index_enrichments", c.reference.index_enrichments, "config: reference.");
    c.reference.max_dofs = field<long long>(r, "max_dofs", c.reference.max_dofs, "config: reference.");
  }

  try {
    c.marking.validate();
  } catch (const ConfigError &e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!(c.solver_tol > 0.0 && c.solver_tol < 1.0)) {
    throw ConfigError("config: solver_tol must lie in (0, 1)");
  }
  if (c.solver_max_iterations < 1) {
    throw ConfigError("config: solver_max_iterations must be positive");
  }
  if (c.output_dir.empty()) {
    throw ConfigError("config: output_dir must not be empty");
  }
  if (c.reference.extra_refinements < 1 || c.reference.extra_refinements > 3) {
    throw ConfigError("config: reference.extra_refinements must be 1, 2 or 3");
  }
  if (c.reference.index_enrichments < 1 || c.reference.index_enrichments > 3) {
    throw ConfigError("config: reference.index_enrichments must be 1, 2 or 3");
  }
  if (c.reference.max_dofs < 1) {
    throw ConfigError("config: reference.max_dofs must be positive");
  }
  return c;
}

RunConfig load_config(const std::string &path)
{
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot read config " + path);
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error &e) {
    // nlohmann reports "line L, column C" in the message
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(j);
}

std::string resolve_output_dir(const std::string &dir)
{
  const fs::path p(dir);
  const char *root = std::getenv("SGFEM_OUTPUT_ROOT");
  if (p.is_relative() && root && *root) {
    return (fs::path(root) / p).string();
  }
  return p.string();
}

RunSummary run_experiment(const RunConfig &config)
{
  const ProblemSpec problem = make_problem(config.problem, config.problem_options);
  const fs::path dir = resolve_output_dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  }
  write_json(dir / "config.json", config.to_json());

  auto csv = open_out(dir / "convergence.csv");
  csv << "iter,dofs,mu,zeta,product,n_elements,card_P,active_M,decision,goal_value,seconds\n";
  auto log = open_out(dir / "index_sets.txt");
  auto trace = open_out(dir / "decisions.csv");
  trace << "iter,rho_x,rho_p,decision,cg_primal,cg_dual\n";

  RunSummary summary;
  summary.output_dir = dir.string();
  int last_logged = -1;
  std::shared_ptr<const Triangulation> last_mesh;

  RunOptions options;
  options.solver_tol = config.solver_tol;
  options.solver_max_iterations = config.solver_max_iterations;
  options.on_iteration = [&](const IterationRecord &r, const RunState &state) {
    csv << r.iter << ',' << r.dofs << ',' << format_number(r.mu) << ',' << format_number(r.zeta)
        << ',' << format_number(r.product) << ',' << r.n_elements << ',' << r.card_P << ','
        << r.active_M << ',' << r.decision << ',' << format_number(r.goal_value) << ','
        << format_number(r.seconds) << '\n';
    csv.flush();
    trace << r.iter << ',' << format_number(r.rho_x) << ',' << format_number(r.rho_p) << ','
          << r.decision << ',' << r.cg_primal << ',' << r.cg_dual << '\n';
    trace.flush();
    if (last_logged < 0 || state.indices.size() != last_logged) {
      log << "# iteration " << r.iter << '\n';
      const int width = state.indices.print_width();
      for (const auto &nu : state.indices) {
        log << nu.str(width) << '\n';
      }
      log.flush();
      last_logged = state.indices.size();
    }
    summary.iterations = r.iter;
    summary.final_product = r.product;
    summary.n_total += r.dofs;
    summary.final_dofs = r.dofs;
    summary.n_elements = r.n_elements;
    summary.card_P = r.card_P;
    summary.active_M = r.active_M;
    summary.goal_value = r.goal_value;
    last_mesh = state.mesh;
  };

  auto summary_json = [&](const std::string &status) {
    json s;
    s["problem"] = config.problem;
    s["status"] = status;
    s["L"] = summary.iterations;
    s["final_product"] = number_json(summary.final_product);
    s["N_total"] = summary.n_total;
    s["N_L"] = summary.final_dofs;
    s["n_elements"] = summary.n_elements;
    s["card_P"] = summary.card_P;
    s["active_M"] = summary.active_M;
    s["goal_value"] = number_json(summary.goal_value);
    return s;
  };

  RunResult result;
  try {
    result = run(problem, config.marking, options);
  } catch (const Error &e) {
    // keep what was streamed and record the failure
    if (last_mesh) {
      auto m = open_out(dir / "final_mesh.txt");
      write_mesh(m, *last_mesh);
    }
    json s = summary_json("failed");
    s["error"] = e.what();
    write_json(dir / "summary.json", s);
    throw;
  }
  summary.status = result.status;
  summary.records = std::move(result.records);
  {
    auto m = open_out(dir / "final_mesh.txt");
    write_mesh(m, *result.final.mesh);
  }
  write_indicators(dir, result.final);
  write_json(dir / "summary.json", summary_json(result.status));
  return summary;
}

ReferenceSummary reference_goal(const std::string &run_dir)
{
  const fs::path dir(run_dir);
  const RunConfig config = parse_config(read_json(dir / "config.json"));
  const ProblemSpec problem = make_problem(config.problem, config.problem_options);

  // final index set: last block of the log
  std::ifstream log(dir / "index_sets.txt");
  if (!log) {
    throw IoError("cannot read " + (dir / "index_sets.txt").string());
  }
  std::vector<MultiIndex> last;
  for (std::string line; std::getline(log, line);) {
    if (line.empty()) {
      continue;
    }
    if (line[0] == '#') {
      last.clear();
      continue;
    }
    last.push_back(MultiIndex::parse(line));
  }
  if (last.empty()) {
    throw IoError("index_sets.txt holds no index set");
  }
  MultiIndexSet indices(last);
  for (int k = 0; k < config.reference.index_enrichments; ++k) {
    indices.insert(detail_index_set(indices, config.marking.m_bar).items());
  }

  std::ifstream mesh_in(dir / "final_mesh.txt");
  if (!mesh_in) {
    throw IoError("cannot read " + (dir / "final_mesh.txt").string());
  }
  Triangulation mesh = read_mesh(mesh_in);

  struct Row
  {
    int iter;
    double product;
    double goal;
  };
  std::vector<Row> rows;
  {
    std::ifstream in(dir / "convergence.csv");
    if (!in) {
      throw IoError("cannot read " + (dir / "convergence.csv").string());
    }
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) {
        continue;
      }
      std::vector<std::string> cols;
      std::stringstream ss(line);
      for (std::string c; std::getline(ss, c, ',');) {
        cols.push_back(c);
      }
      if (cols.size() != 11) {
        throw IoError("convergence.csv: malformed row '" + line + "'");
      }
      rows.push_back({std::stoi(cols[0]), std::stod(cols[4]), std::stod(cols[9])});
    }
  }

  // predict the refined size before building anything: each uniform step maps
  // (V, E, T) to (V + E, 2E + 3T, 4T)
  long long nv = mesh.n_vertices(), ne = mesh.n_edges(), nt = mesh.n_elements();
  long long nb = 0;
  for (int i = 0; i < mesh.n_edges(); ++i) {
    nb += mesh.boundary_edge(i) ? 1 : 0;
  }
  for (int k = 0; k < config.reference.extra_refinements; ++k) {
    nv += ne;
    ne = 2 * ne + 3 * nt;
    nt *= 4;
    nb *= 2;
  }
  const long long ref_dofs = (nv - nb) * indices.size();
  if (ref_dofs > config.reference.max_dofs) {
    throw LimitError("reference would need " + std::to_string(ref_dofs) +
                     " degrees of freedom, above the cap of " +
                     std::to_string(config.reference.max_dofs));
  }

  for (int k = 0; k < config.reference.extra_refinements; ++k) {
    mesh = uniform_refine(mesh).fine;
  }
  if (indices.max_parameter() > problem.coefficient->max_terms()) {
    throw LimitError("reference index set needs more expansion terms than available");
  }
  auto fine = std::make_shared<const Triangulation>(std::move(mesh));
  auto disc = std::make_shared<TwoLevelDiscretization>(fine);
  FieldCache fields(disc, problem.coefficient, false);
  const RecurrenceTable table = recurrence(problem.measure, 32);
  const GalerkinOperator op(indices, fields, table);
  const LoadVectors f = disc->assemble(bind_regions(problem.primal, *fine), false);
  const LoadVectors g = disc->assemble(bind_regions(problem.goal, *fine), false);
  BlockVector b = zero_blocks(indices.size(), disc->n_dofs());
  b[0] = f.coarse;
  const SolveResult sol = solve(op, b, fields.mean_solver(), std::min(config.solver_tol, 1e-10),
                                std::max(config.solver_max_iterations, 2000));

  ReferenceSummary out;
  out.goal_value = g.coarse.dot(sol.u[0]);
  out.dofs = static_cast<long long>(disc->n_dofs()) * indices.size();
  out.n_elements = fine->n_elements();
  out.card_P = indices.size();

  auto eff = open_out(dir / "effectivity.csv");
  eff << "iter,product,goal_error,effectivity\n";
  for (const Row &r : rows) {
    const double err = std::abs(out.goal_value - r.goal);
    const double theta = err > 0.0 ? r.product / err : std::numeric_limits<double>::infinity();
    out.effectivity.push_back(theta);
    eff << r.iter << ',' << format_number(r.product) << ',' << format_number(err) << ','
        << format_number(theta) << '\n';
  }

  json j;
  j["goal_value"] = number_json(out.goal_value);
  j["dofs"] = out.dofs;
  j["n_elements"] = out.n_elements;
  j["card_P"] = out.card_P;
  j["extra_refinements"] = config.reference.extra_refinements;
  j["cg_iterations"] = sol.iterations;
  write_json(dir / "reference.json", j);
  return out;
}

}  // namespace sgfem
