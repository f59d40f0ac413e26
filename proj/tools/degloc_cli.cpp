// degloc: batch front-end for formulas, localization integrals, monopole contributions and fits.

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "degloc/errors.hpp"
#include "degloc/hilbloc.hpp"
#include "degloc/porteous.hpp"
#include "degloc/verify.hpp"
#include "degloc/vw.hpp"

using namespace degloc;
using nlohmann::json;

namespace {

struct Job {
  std::string command;
  std::string surface;
  std::optional<LatticeVec> beta, A;
  std::optional<long> n, n1, n2;
  long i = 0;
  long order = 0;
  std::string formula;
  std::string suite = "all";
  std::string sw_case = "pg>0";
  std::string configs;
  bool dual_effective = false;
  bool refined = false;
  bool pb = false;
  int threads = 1;
  unsigned seed = 1;
  std::string format = "text";
  std::string out;
};

LatticeVec parse_vec(const std::string& s) {
  LatticeVec v;
  std::string t;
  for (char c : s)
    if (c != '[' && c != ']' && c != ' ') t += c;
  std::stringstream in(t);
  std::string part;
  while (std::getline(in, part, ',')) {
    try {
      size_t used = 0;
      v.push_back(std::stol(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      schema_error("bad lattice vector '" + s + "'");
    }
  }
  if (v.empty()) schema_error("empty lattice vector");
  return v;
}

std::string vec_text(const LatticeVec& v) {
  std::string s;
  for (size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k]);
  return s;
}

json vec_json(const LatticeVec& v) { return json(v); }

void load_job(Job& j, const std::string& path) {
  std::ifstream in(path);
  if (!in) schema_error("cannot open job file " + path);
  json d;
  try {
    in >> d;
  } catch (const json::exception& e) {
    schema_error(std::string("job file is not valid JSON: ") + e.what());
  }
  if (!d.is_object()) schema_error("job file must be a JSON object");
  static const std::set<std::string> known = {"command", "surface", "beta",  "A",       "n",       "n1",
                                              "n2",      "i",       "order", "formula", "suite",   "case",
                                              "configs", "dual_effective", "refined", "pb", "threads", "seed",
                                              "format",  "out"};
  for (auto& [k, v] : d.items())
    if (!known.count(k)) schema_error("unknown job field '" + k + "'");
  try {
    auto vec = [&](const char* k) -> std::optional<LatticeVec> {
      if (!d.contains(k)) return std::nullopt;
      if (d[k].is_number_integer()) return LatticeVec{d[k].get<long>()};
      if (d[k].is_string()) return parse_vec(d[k].get<std::string>());
      return d[k].get<LatticeVec>();
    };
    if (d.contains("command")) j.command = d["command"].get<std::string>();
    if (d.contains("surface")) j.surface = d["surface"].get<std::string>();
    if (auto v = vec("beta")) j.beta = v;
    if (auto v = vec("A")) j.A = v;
    if (d.contains("n")) j.n = d["n"].get<long>();
    if (d.contains("n1")) j.n1 = d["n1"].get<long>();
    if (d.contains("n2")) j.n2 = d["n2"].get<long>();
    if (d.contains("i")) j.i = d["i"].get<long>();
    if (d.contains("order")) j.order = d["order"].get<long>();
    if (d.contains("formula")) j.formula = d["formula"].get<std::string>();
    if (d.contains("suite")) j.suite = d["suite"].get<std::string>();
    if (d.contains("case")) j.sw_case = d["case"].get<std::string>();
    if (d.contains("configs")) j.configs = d["configs"].get<std::string>();
    if (d.contains("dual_effective")) j.dual_effective = d["dual_effective"].get<bool>();
    if (d.contains("refined")) j.refined = d["refined"].get<bool>();
    if (d.contains("pb")) j.pb = d["pb"].get<bool>();
    if (d.contains("threads")) j.threads = d["threads"].get<int>();
    if (d.contains("seed")) j.seed = d["seed"].get<unsigned>();
    if (d.contains("format")) j.format = d["format"].get<std::string>();
    if (d.contains("out")) j.out = d["out"].get<std::string>();
  } catch (const json::exception& e) {
    schema_error(std::string("bad job field: ") + e.what());
  }
}

void need(bool ok, const std::string& what) {
  if (!ok) schema_error("missing required field: " + what);
}

SurfaceFile surface_of(const Job& j) {
  need(!j.surface.empty(), "surface");
  return load_surface(j.surface);
}

const ToricSurface& toric_of(const SurfaceFile& f) {
  if (!f.toric) schema_error("surface " + f.name + " has no torus action; equivariant evaluation needs a toric surface");
  return f.toric_data;
}

LatticeVec beta_of(const Job& j, const SurfaceData& S) {
  LatticeVec b = j.beta ? *j.beta : LatticeVec(S.rho, 0);
  S.check_vec(b);
  return b;
}

LatticeVec A_of(const Job& j, const SurfaceData& S) {
  LatticeVec a = j.A ? *j.A : LatticeVec(S.rho, 0);
  S.check_vec(a);
  return a;
}

// n1, n2 from --n1/--n2, or --n as (n, 0)
std::pair<long, long> points_of(const Job& j) {
  long n1 = j.n1 ? *j.n1 : (j.n ? *j.n : 0);
  long n2 = j.n2 ? *j.n2 : 0;
  if (n1 < 0 || n2 < 0) schema_error("negative number of points");
  return {n1, n2};
}

IntegrateOptions integrate_options(const Job& j) {
  if (j.threads < 1) schema_error("threads must be positive");
  IntegrateOptions o;
  o.threads = j.threads;
  o.seed = j.seed;
  return o;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string r = "\"";
  for (char c : s) r += c == '"' ? std::string("\"\"") : std::string(1, c);
  return r + "\"";
}

// output in the requested format
struct Table {
  std::vector<std::string> cols;
  std::vector<std::vector<std::string>> rows;
};

std::string render(const Job& j, const json& doc, const Table& t, const std::string& text) {
  if (j.format == "json") return doc.dump(2) + "\n";
  if (j.format == "csv") {
    std::string s;
    for (size_t k = 0; k < t.cols.size(); ++k) s += (k ? "," : "") + csv_field(t.cols[k]);
    s += "\n";
    for (auto& r : t.rows) {
      for (size_t k = 0; k < r.size(); ++k) s += (k ? "," : "") + csv_field(r[k]);
      s += "\n";
    }
    return s;
  }
  if (j.format == "text") return text;
  schema_error("unknown format '" + j.format + "'");
}

// commands

int cmd_verify(const Job& j, std::string& out) {
  VerifyOptions o;
  o.threads = j.threads;
  o.seed = j.seed;
  json doc = {{"command", "verify"}, {"suite", j.suite}, {"seed", j.seed}, {"results", json::array()}};
  Table t{{"criterion", "name", "pass", "detail"}, {}};
  std::string text;
  bool all = true;
  for (int id : suite_criteria(j.suite)) {
    auto r = run_criterion(id, o);
    all = all && r.pass;
    doc["results"].push_back({{"criterion", id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    t.rows.push_back({std::to_string(id), r.name, r.pass ? "true" : "false", r.detail});
    text += format_line(r, false) + "\n";
  }
  doc["pass"] = all;
  text += std::string("suite ") + j.suite + ": " + (all ? "PASS" : "FAIL") + "\n";
  out = render(j, doc, t, text);
  return all ? 0 : 3;
}

Formula build_formula(const Job& j, const SurfaceData& S) {
  need(!j.formula.empty(), "formula");
  auto [n1, n2] = points_of(j);
  LatticeVec beta = beta_of(j, S), A = A_of(j, S);
  const std::string& f = j.formula;
  if (f == "points_and_curve") return points_and_curve_formula(n1, n2, S, beta);
  if (f == "reduced") return nested_reduced_formula(n1, n2, S, beta, A, true);
  if (f == "comparison") return nested_vir_comparison(n1, n2, S, beta);
  if (f == "vir_from_reduced") return vir_from_reduced_formula(n1, n2, S, beta, A);
  if (f == "sw") return sw_coupled_pushforward(parse_sw_case(j.sw_case), j.i, n1, n2, S, beta, j.dual_effective);
  if (f == "duality") {
    auto d = duality_rewrite(sw_coupled_pushforward(parse_sw_case(j.sw_case), j.i, n1, n2, S, beta, j.dual_effective), S);
    d.rewritten.meta["sign"] = d.sign;
    d.rewritten.meta["s"] = d.s;
    return d.rewritten;
  }
  if (f == "monopole_integrand") {
    Formula m;
    m.id = "monopole_integrand";
    m.expr = monopole_integrand(n1, n2, S, beta);
    m.meta["n1"] = n1;
    m.meta["n2"] = n2;
    m.meta["vd"] = vd_beta(S, beta);
    m.vecs["beta"] = beta;
    return m;
  }
  schema_error("unknown formula '" + f + "'");
}

int cmd_push(const Job& j, std::string& out) {
  auto sf = surface_of(j);
  Formula f = build_formula(j, sf.data);
  json doc = to_json(f);
  doc["surface"] = sf.name;
  doc["normal_form"] = to_json(normal_form(f.expr));
  Table t{{"id", "expr", "normal_form"}, {{f.id, to_text(f.expr), to_text(normal_form(f.expr))}}};
  std::string text = f.id + ": " + to_text(f.expr) + "\n";
  if (f.alt) text += "alt: " + to_text(*f.alt) + "\n";
  text += "normal form: " + to_text(normal_form(f.expr)) + "\n";
  for (auto& [k, v] : f.meta) text += k + " = " + std::to_string(v) + "\n";
  if (!f.note.empty()) text += "note: " + f.note + "\n";
  out = render(j, doc, t, text);
  return 0;
}

Expr read_expr_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) schema_error("cannot open formula file " + path);
  json d;
  try {
    in >> d;
  } catch (const json::exception& e) {
    schema_error(std::string("formula file is not valid JSON: ") + e.what());
  }
  if (d.is_object() && d.contains("expr")) return formula_from_json(d).expr;
  return from_json(d);
}

int cmd_integrate(const Job& j, std::string& out) {
  auto sf = surface_of(j);
  const auto& T = toric_of(sf);
  const auto& S = T.data;
  need(!j.formula.empty(), "formula");
  auto [n1, n2] = points_of(j);
  LatticeVec beta = beta_of(j, S), A = A_of(j, S);
  EquivSpace X;
  X.T = &T;
  X.n1 = static_cast<int>(n1);
  X.n2 = static_cast<int>(n2);
  X.betas = {beta};
  SWTable sw = sf.sw.empty() ? SWTable(S) : sw_table_from_file(sf, true);
  X.sw = [&sw](const SWAtom& a) { return sw.lookup(a); };
  Expr e;
  bool pb = j.pb;
  if (j.formula == "euler") {
    e = euler(tangent_leaf(static_cast<int>(2 * (n1 + n2))));
  } else if (j.formula == "monopole") {
    e = monopole_integrand(n1, n2, S, beta);
  } else if (j.formula == "reduced") {
    e = mul({nested_reduced_formula(n1, n2, S, beta, A, true).expr, hpow("h", j.i)});
    pb = true;
  } else if (j.formula.rfind("@", 0) == 0) {
    e = read_expr_file(j.formula.substr(1));
  } else {
    schema_error("unknown integrand '" + j.formula + "' (euler, monopole, reduced or @file.json)");
  }
  if (pb) X.pb = PBData{0, A};
  auto r = equivariant_integrate(e, X, integrate_options(j));
  json doc = {{"command", "integrate"}, {"surface", sf.name}, {"formula", j.formula}, {"n1", n1}, {"n2", n2},
              {"beta", vec_json(beta)}, {"value", to_string(r.value)}, {"fixed_points", r.fixed_points},
              {"weights", {r.a, r.b}}, {"redraws", r.redraws}, {"seed", r.seed}};
  if (pb) doc["A"] = vec_json(A);
  Table t{{"surface", "formula", "n1", "n2", "beta", "value", "seed"},
          {{sf.name, j.formula, std::to_string(n1), std::to_string(n2), vec_text(beta), to_string(r.value),
            std::to_string(r.seed)}}};
  out = render(j, doc, t, to_string(r.value) + "\n");
  return 0;
}

int cmd_vw(const Job& j, std::string& out) {
  auto sf = surface_of(j);
  const auto& S = sf.data;
  LatticeVec beta = beta_of(j, S);
  need(j.n.has_value(), "n");
  long n = *j.n;
  if (n < 0) schema_error("negative n");
  auto io = integrate_options(j);
  MonopoleResult r;
  if (sf.toric) {
    SWTable sw = sf.sw.empty() ? toric_sw_table(sf.toric_data, {beta}, io) : sw_table_from_file(sf);
    r = monopole_contribution(sf.toric_data, sw, beta, n, j.refined, io);
  } else {
    SWTable sw = sw_table_from_file(sf);
    long vd = vd_beta(S, beta);
    if (vd != 0 || n == 0) {
      FitResult trivial;
      trivial.n = static_cast<int>(n);
      trivial.monomials = {"1"};
      trivial.coeffs["1"] = n == 0 ? 1 : 0;
      r = monopole_from_fit(S, sw, beta, n, trivial);
    } else {
      r = monopole_from_fit(S, sw, beta, n, universality_fit(static_cast<int>(n), fit_runs(static_cast<int>(n), default_fit_configs(static_cast<int>(n)), io)));
    }
    r.refined = j.refined;
    r.t_power = j.refined ? vd : 0;
  }
  json doc = {{"command", "vw"},          {"surface", sf.name},    {"beta", vec_json(beta)}, {"n", n},
              {"value", to_string(r.value)}, {"refined", r.refined}, {"seed", j.seed},         {"meta", r.meta}};
  Table t{{"beta", "n", "n1", "n2", "value", "t_order"}, {}};
  std::string text;
  for (auto& [nn, v] : r.parts) {
    doc["parts"].push_back({{"n1", nn[0]}, {"n2", nn[1]}, {"integral", to_string(v)}});
    t.rows.push_back({vec_text(beta), std::to_string(n), std::to_string(nn[0]), std::to_string(nn[1]), to_string(v),
                      std::to_string(r.t_power)});
  }
  t.rows.push_back({vec_text(beta), std::to_string(n), "total", "total", to_string(r.value), std::to_string(r.t_power)});
  if (j.refined) {
    // a monomial C t^vd; the series up to the requested order
    json series = json::object();
    if (r.t_power <= j.order && r.value != 0) series[std::to_string(r.t_power)] = to_string(r.value);
    doc["t_power"] = r.t_power;
    doc["order"] = j.order;
    doc["series"] = series;
    text = to_string(r.value) + (r.t_power ? " t^" + std::to_string(r.t_power) : "") + "\n";
  } else {
    text = to_string(r.value) + "\n";
  }
  out = render(j, doc, t, text);
  return 0;
}

int cmd_fit(const Job& j, std::string& out) {
  need(j.n.has_value(), "n");
  int n = static_cast<int>(*j.n);
  std::vector<FitConfig> cfg;
  if (j.configs.empty()) {
    cfg = default_fit_configs(n);
  } else {
    std::ifstream in(j.configs);
    if (!in) schema_error("cannot open configs file " + j.configs);
    json d;
    try {
      in >> d;
      for (auto& c : d) cfg.push_back({c.at("surface").get<std::string>(), c.at("beta").get<LatticeVec>()});
    } catch (const json::exception& e) {
      schema_error(std::string("bad configs file: ") + e.what());
    }
  }
  auto runs = fit_runs(n, cfg, integrate_options(j));
  auto fit = universality_fit(n, runs);
  json doc = fit.to_json();
  doc["command"] = "fit";
  doc["seed"] = j.seed;
  for (auto& r : runs)
    doc["data"].push_back({{"run", r.label},
                           {"c1sq", r.inv.c1sq},
                           {"c2", r.inv.c2},
                           {"betasq", r.inv.betasq},
                           {"c1beta", r.inv.c1beta},
                           {"ratio", to_string(r.value)}});
  Table t{{"monomial", "coefficient"}, {}};
  std::string text = "N_" + std::to_string(n) + " = ";
  bool first = true;
  for (auto& m : fit.monomials) {
    t.rows.push_back({m, to_string(fit.coeffs.at(m))});
    if (fit.coeffs.at(m) == 0) continue;
    text += (first ? "" : " + ") + ("(" + to_string(fit.coeffs.at(m)) + ")") + (m == "1" ? "" : " " + m);
    first = false;
  }
  if (first) text += "0";
  text += "\nruns: " + std::to_string(fit.runs) + ", residual 0\n";
  out = render(j, doc, t, text);
  return 0;
}

int error_exit(ErrorKind k, const std::string& msg) {
  const char* name = k == ErrorKind::Schema ? "schema" : k == ErrorKind::Math ? "math" : "universality";
  json e = {{"error", {{"kind", name}, {"message", msg}, {"exit", static_cast<int>(k)}}}};
  std::cerr << e.dump() << std::endl;
  return static_cast<int>(k);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"degloc: degeneracy loci, localization and Vafa-Witten monopole contributions"};
  app.fallthrough();
  app.require_subcommand(0, 1);

  Job flags;
  std::string job_file, beta_s, A_s;
  std::optional<long> n, n1, n2, i, order;
  std::optional<int> threads;
  std::optional<unsigned> seed;
  std::optional<std::string> surface, formula, suite, format, out, sw_case, configs;
  bool refined = false, pb = false, dual_eff = false;

  app.add_option("--job", job_file, "JSON job file; flags override its fields");
  app.add_option("--surface", surface, "built-in name (P2, P1xP1, F1, F2, P2+P2, K3, gt_k1_chi1, ...) or JSON file");
  app.add_option("--beta", beta_s, "curve class, e.g. 1 or 1,0");
  app.add_option("--A", A_s, "twist class A");
  app.add_option("--n", n, "number of points (total for vw and fit)");
  app.add_option("--n1", n1);
  app.add_option("--n2", n2);
  app.add_option("--i", i, "power of h");
  app.add_option("--formula", formula, "formula id, or @file.json for integrate");
  app.add_option("--case", sw_case, "SW branch: pg>0, pg=0-effective, pg=0-noneffective");
  app.add_flag("--dual-effective", dual_eff, "K - beta is effective");
  app.add_option("--suite", suite, "verify suite: all, porteous, hilbloc, routes, vw, duality, vanishing");
  app.add_option("--configs", configs, "JSON list of {surface, beta} for fit");
  app.add_flag("--refined", refined, "keep the t-dependence");
  app.add_flag("--pb", pb, "integrate over X x P(B)");
  app.add_option("--order", order, "t-order for refined output");
  app.add_option("--threads", threads);
  app.add_option("--seed", seed, "seed for the weight specialisation");
  app.add_option("--format", format, "json, csv or text");
  app.add_option("--out", out, "output path");

  for (auto c : {"verify", "push", "integrate", "vw", "fit"}) app.add_subcommand(c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return error_exit(ErrorKind::Schema, e.what());
  }

  try {
    Job j;
    if (!job_file.empty()) load_job(j, job_file);
    auto subs = app.get_subcommands();
    if (!subs.empty()) j.command = subs[0]->get_name();
    if (surface) j.surface = *surface;
    if (!beta_s.empty()) j.beta = parse_vec(beta_s);
    if (!A_s.empty()) j.A = parse_vec(A_s);
    if (n) j.n = n;
    if (n1) j.n1 = n1;
    if (n2) j.n2 = n2;
    if (i) j.i = *i;
    if (formula) j.formula = *formula;
    if (sw_case) j.sw_case = *sw_case;
    if (dual_eff) j.dual_effective = true;
    if (suite) j.suite = *suite;
    if (configs) j.configs = *configs;
    if (refined) j.refined = true;
    if (pb) j.pb = true;
    if (order) j.order = *order;
    if (threads) j.threads = *threads;
    if (seed) j.seed = *seed;
    if (format) j.format = *format;
    if (out) j.out = *out;
    if (j.format != "json" && j.format != "csv" && j.format != "text") schema_error("unknown format '" + j.format + "'");

    std::string text;
    int code;
    if (j.command == "verify") code = cmd_verify(j, text);
    else if (j.command == "push") code = cmd_push(j, text);
    else if (j.command == "integrate") code = cmd_integrate(j, text);
    else if (j.command == "vw") code = cmd_vw(j, text);
    else if (j.command == "fit") code = cmd_fit(j, text);
    else if (j.command.empty()) schema_error("no command given (verify, push, integrate, vw, fit)");
    else schema_error("unknown command '" + j.command + "'");

    if (j.out.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(j.out);
      if (!f) schema_error("cannot write " + j.out);
      f << text;
    }
    return code;
  } catch (const Error& e) {
    return error_exit(e.kind(), e.what());
  } catch (const std::exception& e) {
    return error_exit(ErrorKind::Schema, e.what());
  }
}
