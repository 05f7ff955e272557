// phb: replay the golden identities, evaluate rigidity conditions on point
// files, and run the scaling / equivalence batteries.
//
// Exit status: 0 when everything requested passed, 1 when a check failed,
// 2 on usage or input errors.

#include "phb/identities.hpp"
#include "phb/rigidity.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace {

using json = nlohmann::ordered_json;
namespace rg = phb::rigidity;

constexpr int kExitFail = 1;
constexpr int kExitError = 2;

struct RunConfig {
  std::string corpus;
  bool json = false;
  std::uint64_t seed = 1;
  double eps = 1e-9;
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

void emit(const RunConfig& cfg, const json& j, const std::string& text) {
  if (cfg.json)
    std::cout << j.dump(2) << "\n";
  else
    std::cout << text;
}

// Seed precedence: PHB_SEED, then --seed, then 1.
std::uint64_t resolve_seed(std::uint64_t flag) {
  if (const char* s = std::getenv("PHB_SEED"); s && *s) {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != std::string(s).size()) throw std::invalid_argument(std::string("PHB_SEED is not an integer: ") + s);
    return v;
  }
  return flag;
}

std::string resolve_corpus(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* s = std::getenv("PHB_CORPUS"); s && *s) return s;
  return PHB_DEFAULT_CORPUS;
}

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& it : items) {
    std::stringstream ss(it);
    for (std::string x; std::getline(ss, x, ',');)
      if (!x.empty()) out.push_back(x);
  }
  return out;
}

// ---- verify ------------------------------------------------------------------

json checks_json(const phb::VerifyResult& r) {
  json arr = json::array();
  for (const auto& c : r.checks) arr.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  return arr;
}

int cmd_verify(const RunConfig& cfg, std::vector<std::string> ids, bool mutate, std::size_t samples) {
  const phb::Corpus corpus = phb::load_corpus(cfg.corpus);
  if (ids.empty() || (ids.size() == 1 && ids[0] == "all")) ids = corpus.ids();
  for (const auto& id : ids) corpus.at(id);  // unknown ids are input errors
  phb::VerifyOptions opts;
  opts.seed = cfg.seed;
  opts.samples = samples;

  json results = json::array();
  std::ostringstream text;
  std::size_t passed = 0;
  for (const auto& id : ids) {
    if (!mutate) {
      const auto r = phb::verify(corpus, id, opts);
      passed += r.pass;
      results.push_back({{"id", r.id},
                         {"title", r.title},
                         {"status", verdict(r.pass)},
                         {"checks", checks_json(r)},
                         {"residual", r.residual}});
      text << verdict(r.pass) << " " << r.id << "  " << r.title << "\n";
      for (const auto& c : r.checks) {
        text << "  " << (c.pass ? "ok  " : "FAIL") << " " << c.name << "\n";
        if (!c.detail.empty() && (!c.pass || id == "3.5")) text << "       " << c.detail << "\n";
      }
      continue;
    }
    // Mutation mode: every +1 perturbation must make the record FAIL.
    const auto& rec = corpus.at(id);
    json ms = json::array();
    std::size_t killed = 0, total = 0;
    std::ostringstream mt;
    for (const auto& m : phb::mutants(rec)) {
      ++total;
      const auto r = phb::verify(phb::with_mutant(corpus, id, m), id, opts);
      killed += !r.pass;
      std::string first;
      for (const auto& c : r.checks)
        if (!c.pass) {
          first = c.name;
          break;
        }
      const std::string label = m.target + "#" + std::to_string(m.term);
      ms.push_back({{"mutant", label}, {"status", verdict(r.pass)}, {"killed", !r.pass}, {"failed_check", first}});
      mt << "  " << label << ": " << verdict(r.pass) << (r.pass ? " (survived)" : " (killed: " + first + ")")
         << "\n";
    }
    const bool ok = total > 0 && killed == total;
    passed += ok;
    results.push_back({{"id", id}, {"mutants", total}, {"killed", killed}, {"status", verdict(ok)}, {"details", ms}});
    text << "mutation " << id << ": " << killed << "/" << total << " mutants FAIL as expected -> "
         << verdict(ok) << "\n"
         << mt.str();
  }
  const std::size_t failed = ids.size() - passed;
  json j = {{"command", "verify"},
            {"mutate", mutate},
            {"seed", cfg.seed},
            {"results", results},
            {"summary", {{"total", ids.size()}, {"passed", passed}, {"failed", failed}}}};
  text << "summary: " << ids.size() << " total, " << passed << " passed, " << failed << " failed\n";
  emit(cfg, j, text.str());
  return failed ? kExitFail : 0;
}

// ---- check -------------------------------------------------------------------

std::vector<rg::PointData> load_points(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open point file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  if (ss.str().find_first_not_of(" \t\r\n") == std::string::npos) throw std::runtime_error("point file is empty");
  const auto pts = rg::points_from_json(nlohmann::json::parse(ss.str()));
  if (pts.empty()) throw std::runtime_error("point file holds no points");
  return pts;
}

json minors_json(const rg::Sylvester& s) {
  json a = json::array();
  for (double m : s.minors) a.push_back(m);
  return a;
}

std::string minors_text(const rg::Sylvester& s) {
  std::string out;
  for (double m : s.minors) out += (out.empty() ? "" : ", ") + num(m);
  return "(" + out + ")";
}

const std::vector<std::string> kConditions = {"thm-a", "thm-b", "corollaryC", "3.11", "3.12", "bianchi"};

// One condition at one point; appends text and returns pass.
bool eval_condition(const std::string& cond, const rg::PointData& p, const RunConfig& cfg, json& out,
                    std::ostringstream& text) {
  text << "  " << cond << ": ";
  if (cond == "3.11" || cond == "3.12") {
    const double v = cond == "3.11" ? rg::cond_3_11(p) : rg::cond_3_12(p);
    out = {{"value", v}, {"pass", v > 0}};
    text << "value " << num(v) << " " << verdict(v > 0) << "\n";
    return v > 0;
  }
  if (cond == "thm-a") {
    const auto a = rg::thmA_condition(p);
    const bool ok = a.verdict_a || a.verdict_b;
    out = {{"value", a.value}, {"verdict_a", a.verdict_a}, {"verdict_b", a.verdict_b}, {"pass", ok}};
    text << "value " << num(a.value) << " (a) " << (a.verdict_a ? "yes" : "no") << " (b) "
         << (a.verdict_b ? "yes" : "no") << " " << verdict(ok) << "\n";
    return ok;
  }
  if (cond == "thm-b") {
    const double c11 = rg::cond_3_11(p), c12 = rg::cond_3_12(p);
    const auto s4 = rg::is_positive_definite(rg::build_form_4(p));
    const auto s5 = rg::is_positive_definite(rg::build_form_5(p));
    const bool ok = p.R > 0 && c11 > 0 && c12 > 0;
    out = {{"R_positive", p.R > 0}, {"3.11", c11},          {"3.12", c12},        {"form4_pd", s4.positive_definite},
           {"form4_minors", minors_json(s4)}, {"form5_pd", s5.positive_definite}, {"form5_minors", minors_json(s5)},
           {"pass", ok}};
    text << "R>0 " << (p.R > 0 ? "yes" : "no") << ", 3.11 " << num(c11) << ", 3.12 " << num(c12) << ", form4 minors "
         << minors_text(s4) << ", form5 minors " << minors_text(s5) << " " << verdict(ok) << "\n";
    return ok;
  }
  if (cond == "corollaryC") {
    try {
      const auto c = rg::corollary_C(p);
      out = {{"value", c.value}, {"pass", c.verdict}};
      text << "value " << num(c.value) << " " << verdict(c.verdict) << "\n";
      return c.verdict;
    } catch (const std::invalid_argument& ex) {
      out = {{"error", ex.what()}, {"pass", false}};
      text << "error: " << ex.what() << " FAIL\n";
      return false;
    }
  }
  if (cond == "bianchi") {
    const double r = rg::bianchi_residual(p);
    const bool ok = rg::bianchi_consistent(p, cfg.eps);
    out = {{"residual", r}, {"pass", ok}};
    text << "residual " << num(r) << " " << verdict(ok) << "\n";
    return ok;
  }
  throw std::invalid_argument("unknown condition '" + cond + "'");
}

int cmd_check(const RunConfig& cfg, const std::string& file, const std::vector<std::string>& conds_in) {
  std::vector<std::string> conds = split_list(conds_in);
  if (conds.empty()) throw std::invalid_argument("check needs --cond");
  for (const auto& c : conds)
    if (std::find(kConditions.begin(), kConditions.end(), c) == kConditions.end())
      throw std::invalid_argument("unknown condition '" + c + "'");
  const auto pts = load_points(file);
  json arr = json::array();
  std::ostringstream text;
  std::size_t passed = 0;
  for (const auto& p : pts) {
    text << "point " << p.id << "\n";
    json cj = json::object();
    bool all = true;
    for (const auto& c : conds) {
      json r;
      all = eval_condition(c, p, cfg, r, text) && all;
      cj[c] = r;
    }
    passed += all;
    arr.push_back({{"id", p.id}, {"conditions", cj}, {"pass", all}});
  }
  const std::size_t failed = pts.size() - passed;
  json j = {{"command", "check"},
            {"file", file},
            {"conditions", conds},
            {"points", arr},
            {"summary", {{"points", pts.size()}, {"passed", passed}, {"failed", failed}}}};
  text << "summary: " << pts.size() << " points, " << passed << " passed, " << failed << " failed\n";
  emit(cfg, j, text.str());
  return failed ? kExitFail : 0;
}

// ---- scaletest ---------------------------------------------------------------

double parse_k(const std::string& s) {
  const auto slash = s.find('/');
  std::size_t used = 0;
  double v = 0;
  if (slash == std::string::npos) {
    v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("bad scale factor '" + s + "'");
  } else {
    const std::string a = s.substr(0, slash), b = s.substr(slash + 1);
    std::size_t ua = 0, ub = 0;
    v = std::stod(a, &ua) / std::stod(b, &ub);
    if (ua != a.size() || ub != b.size()) throw std::invalid_argument("bad scale factor '" + s + "'");
  }
  if (!(v > 0)) throw std::invalid_argument("scale factor must be positive: '" + s + "'");
  return v;
}

int cmd_scaletest(const RunConfig& cfg, const std::string& file, const std::vector<std::string>& ks_in,
                  double tol) {
  std::vector<std::string> ks = split_list(ks_in);
  if (ks.empty()) ks = {"1/7", "1/2", "3", "100"};
  const auto pts = load_points(file);
  json arr = json::array();
  std::ostringstream text;
  std::size_t runs = 0, passed = 0;
  for (const auto& p : pts)
    for (const auto& ks_text : ks) {
      const auto sc = rg::scale_check(p, parse_k(ks_text));
      const bool ok = sc.ok(tol);
      ++runs;
      passed += ok;
      json conds = json::array();
      text << "point " << p.id << " k=" << ks_text << " " << verdict(ok) << "\n";
      for (const auto& c : sc.conditions) {
        conds.push_back({{"condition", c.name},
                         {"power", c.power},
                         {"value", c.base},
                         {"rescaled", c.scaled},
                         {"rel_error", c.rel_error()},
                         {"verdict", c.verdict_base},
                         {"verdict_scaled", c.verdict_scaled}});
        text << "  " << c.name << " k^" << num(c.power) << ": rel error " << num(c.rel_error()) << ", verdict "
             << (c.verdict_base ? "true" : "false") << " -> " << (c.verdict_scaled ? "true" : "false") << "\n";
      }
      arr.push_back({{"id", p.id}, {"k", ks_text}, {"conditions", conds}, {"pass", ok}});
    }
  json j = {{"command", "scaletest"},
            {"file", file},
            {"tolerance", tol},
            {"runs", arr},
            {"summary", {{"runs", runs}, {"passed", passed}, {"failed", runs - passed}}}};
  text << "summary: " << runs << " runs, " << passed << " passed, " << runs - passed << " failed\n";
  emit(cfg, j, text.str());
  return runs == passed ? 0 : kExitFail;
}

// ---- equiv -------------------------------------------------------------------

int cmd_equiv(const RunConfig& cfg, std::size_t samples, std::size_t matrices, std::size_t exact) {
  const auto ex = rg::run_exact_battery(exact, cfg.seed);
  const auto eq = rg::run_equiv_battery(samples, cfg.seed, cfg.eps);
  const auto sy = rg::run_sylvester_battery(matrices, cfg.seed, cfg.eps);
  const bool ok_exact = ex.failures == 0;
  const bool ok_kappa = eq.kappa_samples > 0 && eq.kappa_spread() < 1e-9;
  const bool ok_sy = sy.disagreements == 0;
  const bool ok = ok_exact && eq.ok() && ok_kappa && ok_sy;
  json j = {{"command", "equiv"},
            {"seed", cfg.seed},
            {"eps", cfg.eps},
            {"block_det_exact", {{"checks", ex.checks}, {"failures", ex.failures}, {"pass", ok_exact}}},
            {"form4_vs_3.11",
             {{"samples", eq.samples}, {"mismatches", eq.mismatches4}, {"positive_definite", eq.pd4},
              {"pass", eq.mismatches4 == 0}}},
            {"form5_vs_3.12",
             {{"samples", eq.samples}, {"mismatches", eq.mismatches5}, {"positive_definite", eq.pd5},
              {"pass", eq.mismatches5 == 0}}},
            {"boundary_excluded", eq.boundary},
            {"counterexample", eq.counterexample},
            {"kappa",
             {{"samples", eq.kappa_samples},
              {"min", eq.kappa_min},
              {"max", eq.kappa_max},
              {"relative_spread", eq.kappa_spread()},
              {"pass", ok_kappa}}},
            {"sylvester_vs_eigen",
             {{"matrices", sy.matrices},
              {"disagreements", sy.disagreements},
              {"boundary_excluded", sy.boundary},
              {"positive_definite", sy.positive},
              {"pass", ok_sy}}},
            {"pass", ok}};
  std::ostringstream t;
  t << "block det = (1/9)(3.11), exact: " << ex.checks << " checks, " << ex.failures << " failures "
    << verdict(ok_exact) << "\n";
  t << "PD(form4) <=> R>0 and (3.11)>0: " << eq.samples << " samples, " << eq.mismatches4 << " mismatches, "
    << eq.pd4 << " positive definite " << verdict(eq.mismatches4 == 0) << "\n";
  t << "PD(form5) <=> PD(form4) and (3.12)>0: " << eq.samples << " samples, " << eq.mismatches5 << " mismatches, "
    << eq.pd5 << " positive definite " << verdict(eq.mismatches5 == 0) << "\n";
  t << "boundary samples excluded: " << eq.boundary << "\n";
  if (!eq.counterexample.empty()) t << "counterexample: " << eq.counterexample << "\n";
  t << "kappa = (3.12)/det(form5): min " << num(eq.kappa_min) << ", max " << num(eq.kappa_max)
    << ", relative spread " << num(eq.kappa_spread()) << " over " << eq.kappa_samples << " samples "
    << verdict(ok_kappa) << "\n";
  t << "Sylvester vs eigenvalues: " << sy.matrices << " matrices, " << sy.disagreements << " disagreements, "
    << sy.boundary << " excluded " << verdict(ok_sy) << "\n";
  t << "summary: " << verdict(ok) << "\n";
  emit(cfg, j, t.str());
  return ok ? 0 : kExitFail;
}

// ---- trace / ops ---------------------------------------------------------------

int cmd_trace(const RunConfig& cfg, const std::string& id) {
  const phb::Corpus corpus = phb::load_corpus(cfg.corpus);
  phb::VerifyOptions opts;
  opts.seed = cfg.seed;
  const auto r = phb::verify(corpus, id, opts);
  const auto rep = phb::replay(r.trace);
  json j = {{"command", "trace"},
            {"id", id},
            {"status", verdict(r.pass)},
            {"steps", phb::trace_to_json(r.trace)},
            {"replay", {{"ok", rep.ok}, {"steps", rep.steps}, {"message", rep.message}}}};
  std::ostringstream t;
  t << phb::trace_to_text(r.trace);
  t << "replay: " << (rep.ok ? "ok" : "FAILED " + rep.message) << " (" << rep.steps << " steps); identity "
    << verdict(r.pass) << "\n";
  emit(cfg, j, t.str());
  return rep.ok && r.pass ? 0 : kExitFail;
}

int cmd_ops(const RunConfig& cfg) {
  json arr = json::array();
  std::ostringstream t;
  for (const auto& [name, op] : phb::operator_registry()) {
    arr.push_back({{"name", name},
                   {"input", phb::to_string(op.input)},
                   {"output", phb::to_string(op.output)},
                   {"linear", op.linear},
                   {"body", phb::to_string(op.body)}});
    t << name << " (" << phb::to_string(op.input) << " -> " << phb::to_string(op.output) << "): "
      << phb::to_string(op.body) << "\n";
  }
  emit(cfg, {{"command", "ops"}, {"operators", arr}}, t.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phb: Bochner identities and rigidity conditions for pseudohermitian 3-manifolds"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string corpus_flag;
  std::uint64_t seed_flag = 1;
  app.add_option("--corpus", corpus_flag, "identity corpus (default: $PHB_CORPUS or the bundled file)");
  app.add_flag("--json", cfg.json, "machine-readable output");
  app.add_option("--seed", seed_flag, "seed for randomized checks (PHB_SEED overrides)");
  app.add_option("--eps", cfg.eps, "tolerance band for boundary decisions")->check(CLI::PositiveNumber);

  std::vector<std::string> ids;
  bool mutate = false;
  std::size_t verify_samples = 0;
  auto* verify = app.add_subcommand("verify", "replay identity scripts (ids or 'all')");
  verify->add_option("ids", ids, "record ids");
  verify->add_flag("--mutate", mutate, "perturb each coefficient by +1; every mutant must FAIL");
  verify->add_option("--samples", verify_samples, "sample count for numeric identities (default: corpus)");

  std::string file;
  std::vector<std::string> conds;
  auto* check = app.add_subcommand("check", "evaluate rigidity conditions on a JSON point file");
  check->add_option("points", file, "JSON array of point records")->required();
  check->add_option("--cond", conds, "thm-a, thm-b, corollaryC, 3.11, 3.12, bianchi (repeat or comma-separate)")
      ->required();

  std::vector<std::string> ks;
  double scale_tol = 1e-12;
  auto* scaletest = app.add_subcommand("scaletest", "check scaling laws under theta -> k theta");
  scaletest->add_option("points", file, "JSON array of point records")->required();
  scaletest->add_option("--k", ks, "scale factors, e.g. 1/7,1/2,3,100 (default)");
  scaletest->add_option("--tol", scale_tol, "relative error bound")->check(CLI::PositiveNumber);

  std::size_t samples = 100000, matrices = 10000, exact = 1000;
  auto* equiv = app.add_subcommand("equiv", "determinant / definiteness equivalence battery");
  equiv->add_option("--samples", samples, "random points");
  equiv->add_option("--matrices", matrices, "random Hermitian matrices for the Sylvester oracle");
  equiv->add_option("--exact", exact, "random rational block-determinant checks");

  std::string trace_id;
  auto* trace = app.add_subcommand("trace", "export the derivation trace of one identity");
  trace->add_option("id", trace_id, "record id")->required();

  auto* ops = app.add_subcommand("ops", "list the operator registry");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    cfg.corpus = resolve_corpus(corpus_flag);
    cfg.seed = resolve_seed(seed_flag);
    if (*verify) return cmd_verify(cfg, ids, mutate, verify_samples);
    if (*check) return cmd_check(cfg, file, conds);
    if (*scaletest) return cmd_scaletest(cfg, file, ks, scale_tol);
    if (*equiv) return cmd_equiv(cfg, samples, matrices, exact);
    if (*trace) return cmd_trace(cfg, trace_id);
    if (*ops) return cmd_ops(cfg);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
