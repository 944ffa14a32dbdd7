#include "copk/model.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace copk {

using nlohmann::json;

void LinExpr::add(int var, double coef) {
  if (coef == 0.0) return;
  auto it = std::lower_bound(terms.begin(), terms.end(), var,
                             [](const auto& t, int v) { return t.first < v; });
  if (it != terms.end() && it->first == var) {
    it->second += coef;
    if (it->second == 0.0) terms.erase(it);
  } else {
    terms.insert(it, {var, coef});
  }
}

double LinExpr::coef(int var) const {
  auto it = std::lower_bound(terms.begin(), terms.end(), var,
                             [](const auto& t, int v) { return t.first < v; });
  return (it != terms.end() && it->first == var) ? it->second : 0.0;
}

double LinExpr::eval(const std::vector<double>& x) const {
  double s = c0;
  for (const auto& [v, c] : terms) s += c * x.at(v);
  return s;
}

LinExpr& LinExpr::operator+=(const LinExpr& o) {
  c0 += o.c0;
  for (const auto& [v, c] : o.terms) add(v, c);
  return *this;
}

LinExpr LinExpr::scaled(double s) const {
  LinExpr r;
  if (s == 0.0) return r;
  r.c0 = c0 * s;
  r.terms = terms;
  for (auto& t : r.terms) t.second *= s;
  return r;
}

LinExpr LinExpr::constant(double v) {
  LinExpr r;
  r.c0 = v;
  return r;
}

LinExpr LinExpr::variable(int var, double coef) {
  LinExpr r;
  r.add(var, coef);
  return r;
}

int Membership::entry_count() const {
  switch (kind) {
    case ConeKind::Nonneg: return dim;
    case ConeKind::Soc: return dim;
    case ConeKind::Psd: return dim * (dim + 1) / 2;
  }
  return 0;
}

int MatVar::entry_var(int i, int j) const {
  if (i < 0 || j < 0 || i >= dim || j >= dim)
    throw std::out_of_range("MatVar::entry_var: index out of range");
  if (i < j) std::swap(i, j);
  return first_var + i * (i + 1) / 2 + j;
}

int ConicProblem::add_var(const std::string& name) {
  var_names.push_back(name);
  return (int)var_names.size() - 1;
}

int ConicProblem::add_mat_var(const std::string& name, int dim) {
  if (dim < 1) throw std::invalid_argument("add_mat_var: dim must be >= 1");
  MatVar mv;
  mv.name = name;
  mv.dim = dim;
  mv.first_var = num_vars();
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j <= i; ++j)
      add_var(name + "[" + std::to_string(i) + "," + std::to_string(j) + "]");
  mat_vars.push_back(mv);
  return (int)mat_vars.size() - 1;
}

namespace {

void check_expr(const LinExpr& e, int nvars, const char* where) {
  int prev = -1;
  for (const auto& [v, c] : e.terms) {
    if (v < 0 || v >= nvars)
      throw std::invalid_argument(std::string(where) + ": variable id out of range");
    if (v <= prev)
      throw std::invalid_argument(std::string(where) + ": terms not strictly sorted");
    if (c == 0.0)
      throw std::invalid_argument(std::string(where) + ": zero coefficient stored");
    prev = v;
  }
}

}  // namespace

void ConicProblem::validate() const {
  const int nv = num_vars();
  check_expr(objective, nv, "objective");
  for (const auto& e : equalities) check_expr(e, nv, "equality");
  for (const auto& mv : mat_vars) {
    if (mv.dim < 1) throw std::invalid_argument("mat var with dim < 1");
    if (mv.first_var < 0 || mv.first_var + mv.entry_count() > nv)
      throw std::invalid_argument("mat var entries out of variable range");
  }
  for (const auto& m : memberships) {
    if (m.dim < 1) throw std::invalid_argument("membership with dim < 1");
    if (m.kind == ConeKind::Soc && m.dim < 2)
      throw std::invalid_argument("soc membership needs dim >= 2");
    if ((int)m.entries.size() != m.entry_count())
      throw std::invalid_argument("membership entry count mismatch: " + m.label);
    for (const auto& e : m.entries) check_expr(e, nv, "membership entry");
  }
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::Stalled: return "stalled";
  }
  return "?";
}

namespace {

json expr_to_json(const LinExpr& e) {
  json t = json::array();
  for (const auto& [v, c] : e.terms) t.push_back(json::array({v, c}));
  return json{{"c0", e.c0}, {"terms", std::move(t)}};
}

LinExpr expr_from_json(const json& j) {
  LinExpr e;
  e.c0 = j.at("c0").get<double>();
  for (const auto& t : j.at("terms"))
    e.add(t.at(0).get<int>(), t.at(1).get<double>());
  return e;
}

const char* cone_tag(ConeKind k) {
  switch (k) {
    case ConeKind::Nonneg: return "nonneg";
    case ConeKind::Soc: return "soc";
    case ConeKind::Psd: return "psd";
  }
  return "?";
}

ConeKind cone_from_tag(const std::string& s) {
  if (s == "nonneg") return ConeKind::Nonneg;
  if (s == "soc") return ConeKind::Soc;
  if (s == "psd") return ConeKind::Psd;
  throw std::invalid_argument("unknown cone tag: " + s);
}

}  // namespace

std::string problem_to_json(const ConicProblem& p) {
  json j;
  j["vars"] = p.var_names;
  j["mat_vars"] = json::array();
  for (const auto& mv : p.mat_vars)
    j["mat_vars"].push_back(json{{"name", mv.name}, {"dim", mv.dim}, {"first_var", mv.first_var}});
  j["objective"] = expr_to_json(p.objective);
  j["equalities"] = json::array();
  for (const auto& e : p.equalities) j["equalities"].push_back(expr_to_json(e));
  j["memberships"] = json::array();
  for (const auto& m : p.memberships) {
    json jm{{"cone", cone_tag(m.kind)}, {"dim", m.dim}, {"label", m.label}};
    jm["entries"] = json::array();
    for (const auto& e : m.entries) jm["entries"].push_back(expr_to_json(e));
    j["memberships"].push_back(std::move(jm));
  }
  return j.dump(2) + "\n";
}

ConicProblem problem_from_json(const std::string& text) {
  json j = json::parse(text);
  ConicProblem p;
  p.var_names = j.at("vars").get<std::vector<std::string>>();
  for (const auto& jm : j.at("mat_vars")) {
    MatVar mv;
    mv.name = jm.at("name").get<std::string>();
    mv.dim = jm.at("dim").get<int>();
    mv.first_var = jm.at("first_var").get<int>();
    p.mat_vars.push_back(mv);
  }
  p.objective = expr_from_json(j.at("objective"));
  for (const auto& je : j.at("equalities")) p.equalities.push_back(expr_from_json(je));
  for (const auto& jm : j.at("memberships")) {
    Membership m;
    m.kind = cone_from_tag(jm.at("cone").get<std::string>());
    m.dim = jm.at("dim").get<int>();
    m.label = jm.at("label").get<std::string>();
    for (const auto& je : jm.at("entries")) m.entries.push_back(expr_from_json(je));
    p.memberships.push_back(std::move(m));
  }
  p.validate();
  return p;
}

void write_problem(const ConicProblem& p, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << problem_to_json(p);
}

ConicProblem read_problem(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return problem_from_json(ss.str());
}

std::string solution_to_json(const Solution& s) {
  json j;
  j["status"] = to_string(s.status);
  j["objective"] = s.objective;
  j["dual_objective"] = s.dual_objective;
  j["x"] = s.x;
  j["eq_duals"] = s.eq_duals;
  j["cone_duals"] = s.cone_duals;
  j["primal_residual"] = s.primal_residual;
  j["dual_residual"] = s.dual_residual;
  j["rel_gap"] = s.rel_gap;
  j["iterations"] = s.iterations;
  j["solve_seconds"] = s.solve_seconds;
  j["message"] = s.message;
  return j.dump(2) + "\n";
}

}  // namespace copk
