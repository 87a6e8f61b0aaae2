// qerd: evaluate q-special functions and run the verification suites.
//
//   qerd eval <fn> [--param value]... [--q Q] [--precision D] [--tolerance T]
//   qerd verify <suite> [--config FILE] [--out FILE] [--jobs N] [--grid axis=values]...
//
// QERD_PRECISION and QERD_TOLERANCE override the config file; flags override both.
// Exit codes: 0 success, 1 verification failure, 2 bad configuration or
// parameters, 3 truncation-insufficient cases.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "qerd/erdelyi.hpp"
#include "qerd/kernels.hpp"
#include "qerd/qfunctions.hpp"
#include "qerd/suites.hpp"

namespace {

using namespace qerd;

constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitTruncation = 3;

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

unsigned parse_precision(const std::string& text) {
  try {
    std::size_t used = 0;
    long v = std::stol(text, &used);
    if (used == text.size() && v > 0) return static_cast<unsigned>(v);
  } catch (const std::exception&) {
  }
  throw ConfigError("precision must be a positive integer, got '" + text + "'");
}

struct EvalArgs {
  std::string fn;
  std::map<std::string, std::string> params;
  std::string q = "0.5";
  std::optional<std::string> precision;
  std::optional<std::string> tolerance;
};

const std::string& need(const EvalArgs& a, const std::string& key) {
  auto it = a.params.find(key);
  if (it == a.params.end() || it->second.empty()) {
    throw ConfigError(a.fn + " needs --" + key);
  }
  return it->second;
}

std::optional<std::string> maybe(const EvalArgs& a, const std::string& key) {
  auto it = a.params.find(key);
  if (it == a.params.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

long as_long(const std::string& t) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != t.size() || t.empty()) throw ConfigError("not an integer: '" + t + "'");
  return v;
}

std::vector<Complex> as_list(const std::string& t, const QContext& ctx) {
  std::vector<Complex> out;
  for (const auto& item : split_list(t)) out.push_back(parse_value(item, ctx));
  return out;
}

void print(const Complex& v, const Real& tail, unsigned digits) {
  std::cout << "value: " << v.re().to_string(digits);
  if (!v.im().is_zero()) std::cout << " + " << v.im().to_string(digits) << " i";
  std::cout << "\ntail_bound: " << tail.to_string(6) << "\n";
}

int run_eval(const EvalArgs& a) {
  unsigned digits = QContext::kDefaultDigits;
  std::string tol(QContext::kDefaultTolerance);
  if (auto e = env("QERD_PRECISION")) digits = parse_precision(*e);
  if (auto e = env("QERD_TOLERANCE")) tol = *e;
  if (a.precision) digits = parse_precision(*a.precision);
  if (a.tolerance) tol = *a.tolerance;
  QContext ctx(a.q, digits, tol);
  WorkingPrecision wp(ctx);
  auto val = [&](const std::string& key) { return parse_value(need(a, key), ctx); };

  SeriesValue out{Complex(0), Real(0), 0};
  const std::string& fn = a.fn;
  if (fn == "qpochhammer") {
    std::string k = need(a, "k");
    Length len = (k == "inf") ? kInfinite : Length(as_long(k));
    out = qpochhammer(val("a"), len, ctx);
  } else if (fn == "phi") {
    PhiParams p;
    if (auto s = maybe(a, "num")) p.numerators = as_list(*s, ctx);
    if (auto s = maybe(a, "den")) p.denominators = as_list(*s, ctx);
    p.argument = val("z");
    out = basic_hypergeometric(p, ctx);
  } else if (fn == "wall") {
    WallParams p;
    p.n = as_long(need(a, "n"));
    p.a = val("a");
    p.x = val("x");
    std::string norm = maybe(a, "norm").value_or("plain");
    if (norm == "tilde") {
      p.normalization = WallNormalization::tilde;
    } else if (norm == "check") {
      p.normalization = WallNormalization::check;
    } else if (norm != "plain") {
      throw ConfigError("--norm must be plain, tilde or check");
    }
    out.value = wall_polynomial(p, ctx);
  } else if (fn == "qbessel") {
    out.value = qbessel({val("nu"), val("x")}, ctx);
  } else if (fn == "Eq") {
    out = big_q_exponential(val("z"), ctx);
  } else if (fn == "kernel_plus") {
    out.value = kernel_plus(as_long(need(a, "p")), as_long(need(a, "v")), as_long(need(a, "w")), ctx);
  } else if (fn == "kernel_zero") {
    out.value = kernel_zero(as_long(need(a, "p")), as_long(need(a, "v")), as_long(need(a, "w")), ctx);
  } else if (fn == "erdelyi_lhs" || fn == "erdelyi_rhs") {
    ErdelyiParams p;
    p.n = as_long(need(a, "n"));
    p.m = as_long(need(a, "m"));
    p.nu = val("nu");
    p.sigma = val("sigma");
    p.z = val("z");
    if (fn == "erdelyi_lhs") {
      out = erdelyi_lhs(p, ctx);
    } else {
      out.value = erdelyi_rhs(p, ctx);
    }
  } else {
    throw ConfigError("unknown function '" + fn +
                      "'; known: qpochhammer, phi, wall, qbessel, Eq, kernel_plus, kernel_zero, "
                      "erdelyi_lhs, erdelyi_rhs");
  }
  print(out.value, out.tail_bound, digits);
  return 0;
}

struct VerifyArgs {
  std::string suite;
  std::optional<std::string> config;
  std::string out = "qerd_report.json";
  std::optional<unsigned> jobs;
  std::optional<std::string> precision;
  std::optional<std::string> tolerance;
  std::vector<std::string> grid;
};

int run_verify(const VerifyArgs& a) {
  SuiteConfig cfg;
  if (a.config) cfg = load_config(*a.config);
  cfg.suite = a.suite;
  if (auto e = env("QERD_PRECISION")) cfg.precision = parse_precision(*e);
  if (auto e = env("QERD_TOLERANCE")) cfg.tolerance = *e;
  if (a.precision) cfg.precision = parse_precision(*a.precision);
  if (a.tolerance) cfg.tolerance = *a.tolerance;
  if (a.jobs) cfg.jobs = *a.jobs;
  for (const auto& g : a.grid) {
    // "axis=values" for the selected suite, "suite.axis=values" otherwise
    auto eq = g.find('=');
    if (eq == std::string::npos) throw ConfigError("--grid expects axis=values, got '" + g + "'");
    std::string key = g.substr(0, eq);
    std::string suite = a.suite;
    if (auto dot = key.find('.'); dot != std::string::npos) {
      suite = key.substr(0, dot);
      key = key.substr(dot + 1);
    }
    cfg.grids[suite][key] = g.substr(eq + 1);
  }

  auto start = std::chrono::steady_clock::now();
  VerificationReport report = run_suite(cfg);
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::ofstream out(a.out, std::ios::binary);
  if (!out) throw ConfigError("cannot write report to " + a.out);
  out << report.to_json();

  std::map<std::string, std::array<std::size_t, 4>> per_suite;
  for (const auto& c : report.cases) ++per_suite[c.suite][static_cast<std::size_t>(c.status)];
  for (const auto& [name, n] : per_suite) {
    std::cout << name << ": " << n[0] << " pass, " << n[1] << " fail, " << n[2] << " truncation, "
              << n[3] << " error (tolerance " << report.tolerances[name] << ")\n";
  }
  std::size_t shown = 0;
  for (const auto& c : report.cases) {
    if (c.status == CaseStatus::pass) continue;
    if (shown++ == 20) {
      std::cout << "  ...\n";
      break;
    }
    std::cout << "  " << to_string(c.status) << " " << c.key;
    for (const auto& [k, v] : c.params) std::cout << " " << k << "=" << v;
    std::cout << " residual=" << (c.residual.empty() ? "-" : c.residual.substr(0, 12)) << " "
              << c.message << "\n";
  }
  std::cout << "report: " << a.out << "  (" << report.cases.size() << " cases, " << seconds
            << " s)\n";
  return report.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"q-special functions and verification of the q-Erdelyi formula"};
  app.require_subcommand(1);

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "evaluate one function");
  eval->add_option("fn", ea.fn, "function name")->required();
  for (const char* key : {"a", "k", "n", "m", "x", "z", "nu", "sigma", "p", "v", "w", "num", "den", "norm"}) {
    eval->add_option(std::string("--") + key, ea.params[key]);
  }
  eval->add_option("--q", ea.q, "base q in (0,1)");
  eval->add_option("--precision", ea.precision, "decimal digits");
  eval->add_option("--tolerance", ea.tolerance, "absolute accuracy target");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  std::string names;
  for (const auto& s : suite_names()) names += (names.empty() ? "" : ", ") + s;
  verify->add_option("suite", va.suite, "one of: " + names)->required();
  verify->add_option("--config", va.config, "INI config file");
  verify->add_option("--out", va.out, "report file");
  verify->add_option("--jobs", va.jobs, "worker threads (default: all processors)");
  verify->add_option("--precision", va.precision, "decimal digits");
  verify->add_option("--tolerance", va.tolerance, "tolerance for every suite");
  verify->add_option("--grid", va.grid, "grid override axis=values or suite.axis=values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*eval) return run_eval(ea);
    return run_verify(va);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return e.kind() == ErrorKind::TruncationInsufficient ? kExitTruncation : kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
}
