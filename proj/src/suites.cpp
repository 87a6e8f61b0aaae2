#include "qerd/suites.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <functional>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "qerd/erdelyi.hpp"
#include "qerd/kernels.hpp"
#include "qerd/operators.hpp"
#include "qerd/qfunctions.hpp"

namespace qerd {

const char* to_string(CaseStatus s) {
  switch (s) {
    case CaseStatus::pass: return "pass";
    case CaseStatus::fail: return "fail";
    case CaseStatus::truncation: return "truncation";
    case CaseStatus::error: return "error";
  }
  return "error";
}

namespace {

std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

Real parse_real_token(const std::string& t) {
  try {
    return Real(t);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + t + "'");
  }
}

long parse_long(const std::string& t) {
  try {
    std::size_t used = 0;
    long v = std::stol(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("not an integer: '" + t + "'");
  }
}

// "pi", "-pi/4", "2pi/3" or a plain decimal.
Real parse_angle(const std::string& t) {
  auto at = t.find("pi");
  if (at == std::string::npos) return parse_real_token(t);
  std::string coeff = t.substr(0, at);
  Real c = coeff.empty() ? Real(1) : coeff == "-" ? Real(-1) : parse_real_token(coeff);
  std::string rest = t.substr(at + 2);
  Real v = c * hp::pi();
  if (!rest.empty()) {
    if (rest[0] != '/') throw ConfigError("bad angle '" + t + "'");
    v /= parse_real_token(rest.substr(1));
  }
  return v;
}

}  // namespace

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    auto dots = item.find("..");
    if (dots != std::string::npos) {
      long lo = parse_long(trim(item.substr(0, dots)));
      long hi = parse_long(trim(item.substr(dots + 2)));
      if (hi < lo) throw ConfigError("empty range '" + item + "'");
      for (long i = lo; i <= hi; ++i) out.push_back(std::to_string(i));
    } else {
      out.push_back(item);
    }
  }
  if (out.empty()) throw ConfigError("empty value list '" + text + "'");
  return out;
}

Complex parse_value(const std::string& token, const QContext& ctx) {
  WorkingPrecision wp(ctx);
  std::string t;
  for (char ch : token) {
    if (!std::isspace(static_cast<unsigned char>(ch))) t.push_back(ch);
  }
  if (t.empty()) throw ConfigError("empty value");
  if (t == "q") return Complex(ctx.q());
  if (t.rfind("q^", 0) == 0) return qpower(Complex(parse_real_token(t.substr(2))), ctx);
  if (auto at = t.find('@'); at != std::string::npos) {
    return hp::polar(parse_real_token(t.substr(0, at)), parse_angle(t.substr(at + 1)));
  }
  if (t.back() == 'i') {
    std::string body = t.substr(0, t.size() - 1);
    std::size_t split = std::string::npos;
    for (std::size_t i = 1; i < body.size(); ++i) {
      if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') split = i;
    }
    auto imag = [](const std::string& s) {
      if (s.empty() || s == "+") return Real(1);
      if (s == "-") return Real(-1);
      return parse_real_token(s);
    };
    if (split == std::string::npos) return Complex(Real(0), imag(body));
    return Complex(parse_real_token(body.substr(0, split)), imag(body.substr(split)));
  }
  return Complex(parse_real_token(t));
}

namespace {

using Params = std::vector<std::pair<std::string, std::string>>;
using Grid = std::map<std::string, std::vector<std::string>>;

const std::string& get(const Params& p, const std::string& name) {
  for (const auto& [k, v] : p) {
    if (k == name) return v;
  }
  throw ConfigError("missing parameter '" + name + "'");
}
long get_long(const Params& p, const std::string& name) { return parse_long(get(p, name)); }

const std::vector<std::string>& axis(const Grid& g, const std::string& name) {
  auto it = g.find(name);
  if (it == g.end()) throw ConfigError("missing grid axis '" + name + "'");
  return it->second;
}

std::vector<long> axis_long(const Grid& g, const std::string& name) {
  std::vector<long> out;
  for (const auto& t : axis(g, name)) out.push_back(parse_long(t));
  return out;
}

// All combinations of the named axes, first axis varying slowest.
std::vector<Params> cartesian(const Grid& g, const std::vector<std::string>& names) {
  std::vector<Params> out{Params{}};
  for (const auto& name : names) {
    std::vector<Params> next;
    for (const auto& base : out) {
      for (const auto& v : axis(g, name)) {
        Params p = base;
        p.emplace_back(name, v);
        next.push_back(std::move(p));
      }
    }
    out = std::move(next);
  }
  return out;
}

// Per-thread evaluation state: contexts and kernel caches by base.
class Worker {
 public:
  Worker(unsigned precision, std::string tolerance)
      : precision_(precision), tolerance_(std::move(tolerance)) {}

  const QContext& context(const std::string& q) {
    auto it = contexts_.find(q);
    if (it == contexts_.end()) it = contexts_.emplace(q, QContext(q, precision_, tolerance_)).first;
    return it->second;
  }
  KernelEvaluator& kernels(const std::string& q) {
    auto it = kernels_.find(q);
    if (it == kernels_.end()) {
      it = kernels_.emplace(q, std::make_unique<KernelEvaluator>(context(q))).first;
    }
    return *it->second;
  }
  unsigned precision() const { return precision_; }
  const std::string& tolerance() const { return tolerance_; }

 private:
  unsigned precision_;
  std::string tolerance_;
  std::map<std::string, QContext> contexts_;
  std::map<std::string, std::unique_ptr<KernelEvaluator>> kernels_;
};

struct Outcome {
  Real residual;
  Real threshold;
  Real tail;
  std::string message;
  bool extra_failure = false;
};

struct Suite {
  std::string name;
  std::string tolerance;
  std::vector<std::pair<std::string, std::string>> defaults;
  std::function<std::vector<Params>(const Grid&)> expand;
  std::function<Outcome(const Params&, Worker&)> run;
};

Outcome simple(Real residual, const QContext& ctx, Real tail = Real(0)) {
  return {hp::abs(residual), ctx.tolerance(), std::move(tail), {}};
}

// max over the basis vectors of the window of |(A - B) e|.
Real map_difference(const LinearMap& a, const LinearMap& b, const std::vector<LegSpec>& legs) {
  Real worst(0);
  for (const auto& i : window_indices(legs)) worst = hp::max(worst, max_abs_diff(a.column(i), b.column(i)));
  return worst;
}

LinearMap lin(std::initializer_list<std::pair<Complex, LinearMap>> terms) {
  return combine(std::vector<std::pair<Complex, LinearMap>>(terms));
}

// --- suite bodies ----------------------------------------------------------

Outcome run_wall(const Params& p, Worker& w) {
  const QContext& ctx = w.context(get(p, "q"));
  WorkingPrecision wp(ctx);
  Real a = parse_value(get(p, "a"), ctx).re();
  bool dual = get(p, "mode") == "dual";
  if (!dual && get(p, "mode") != "primal") throw ConfigError("mode must be primal or dual");
  Complex r = wall_orthogonality_sum(get_long(p, "n"), get_long(p, "m"), a, dual, 0, ctx);
  return simple(hp::abs(r), ctx);
}

Outcome run_qbessel(const Params& p, Worker& w) {
  const QContext& ctx = w.context(get(p, "q"));
  WorkingPrecision wp(ctx);
  SeriesValue s = qbessel_orthogonality_residual(get_long(p, "n"), get_long(p, "m"),
                                                 get_long(p, "l"), get_long(p, "window"), ctx);
  return simple(hp::abs(s.value), ctx, s.tail_bound);
}

Outcome run_hankel(const Params& p, Worker& w) {
  const QContext& ctx = w.context(get(p, "q"));
  WorkingPrecision wp(ctx);
  const long n = get_long(p, "n"), m = get_long(p, "m");
  const long window = get_long(p, "window"), interior = get_long(p, "interior");
  Complex nu = parse_value(get(p, "nu"), ctx);
  Complex sigma = parse_value(get(p, "sigma"), ctx);
  const QContext cq = ctx.squared();

  // f(q^k) = q^{k nu} (q^{2+2k};q^2)_inf pt_n(q^{2k}; q^{2 sigma}) pt_m(q^{2k}; q^{2(nu-sigma)}), k >= 0
  WallPolynomial wn(n, qpower(Complex(2) * sigma, ctx), WallNormalization::tilde, cq);
  WallPolynomial wm(m, qpower(Complex(2) * (nu - sigma), ctx), WallNormalization::tilde, cq);
  PowerPochhammer table(cq);
  LatticeSamples f{-window, {}};
  for (long k = -window; k <= window; ++k) {
    if (k < 0) {
      f.values.emplace_back(0);
      continue;
    }
    Complex x(qpower(k, cq));
    f.values.push_back(qpower(Complex(k) * nu, ctx) * table.infinite(k + 1) * wn(x) * wm(x));
  }
  LatticeSamples g = qhankel_transform(f, nu, HankelDirection::forward, -window, window, ctx);
  LatticeSamples back = qhankel_transform(g, nu, HankelDirection::inverse, -interior, interior, ctx);
  Real worst(0);
  for (long k = -interior; k <= interior; ++k) worst = hp::max(worst, hp::abs(back.at(k) - f.at(k)));
  // The closed form of g, transformed back.
  Real closed = inverse_hankel_check(n, m, nu, sigma, -window, window, -interior, interior, ctx);
  Outcome o = simple(hp::max(worst, closed), ctx);
  o.message = "round trip " + worst.to_string(3) + ", closed form " + closed.to_string(3);
  return o;
}

std::vector<Params> expand_kernel_orthogonality(const Grid& g) {
  std::vector<Params> out;
  const auto index = axis_long(g, "index");
  const auto shift = axis_long(g, "shift");
  const std::set<long> in_range(index.begin(), index.end());
  for (const auto& q : axis(g, "q")) {
    for (const auto& mode : axis(g, "mode")) {
      if (mode == "first") {
        for (long v : index)
          for (long w : index)
            for (long v2 : index) {
              long w2 = v2 - v + w;
              if (!in_range.count(w2)) continue;
              out.push_back({{"q", q}, {"mode", mode}, {"v", std::to_string(v)},
                             {"w", std::to_string(w)}, {"v2", std::to_string(v2)},
                             {"w2", std::to_string(w2)}});
            }
      } else if (mode == "second") {
        for (long p : index)
          for (long p2 : index)
            for (long t : shift) {
              out.push_back({{"q", q}, {"mode", mode}, {"p", std::to_string(p)},
                             {"p2", std::to_string(p2)}, {"t", std::to_string(t)}});
            }
      } else {
        throw ConfigError("mode must be first or second");
      }
    }
  }
  return out;
}

Outcome run_kernel_orthogonality(const Params& p, Worker& w, KernelKind kind) {
  const QContext& ctx = w.context(get(p, "q"));
  WorkingPrecision wp(ctx);
  KernelOrthogonalityArgs a;
  a.kind = kind;
  if (get(p, "mode") == "first") {
    a.v = get_long(p, "v");
    a.w = get_long(p, "w");
    a.v2 = get_long(p, "v2");
    a.w2 = get_long(p, "w2");
  } else {
    a.mode = OrthogonalityMode::second;
    a.p = get_long(p, "p");
    a.p2 = get_long(p, "p2");
    a.t = get_long(p, "t");
  }
  ResidualValue r = kernel_orthogonality_residual(a, w.kernels(get(p, "q")));
  return simple(r.residual, ctx, r.tail_bound);
}

Outcome run_contraction(const Params& p, Worker& w) {
  KernelEvaluator& eval = w.kernels(get(p, "q"));
  WorkingPrecision wp(eval.context());
  Real r = kernel_contraction_residual(get_long(p, "p"), get_long(p, "v"), get_long(p, "w"),
                                       get_long(p, "N"), eval);
  return simple(r, eval.context());
}

Outcome run_su2(const Params& p, Worker& w) {
  const QContext& ctx = w.context(get(p, "q"));
  WorkingPrecision wp(ctx);
  const long nmax = get_long(p, "n_max"), kmax = get_long(p, "k_max");
  std::vector<LegSpec> legs{LegSpec::natural(nmax), LegSpec::integer(-kmax, kmax)};
  LinearMap a = maps::alpha(ctx), as = maps::alpha_adjoint(ctx);
  LinearMap c = maps::gamma(ctx), cs = maps::gamma_adjoint(ctx);
  const Complex q(ctx.q());
  const std::string& rel = get(p, "relation");
  LinearMap lhs, rhs;
  if (rel == "alpha_gamma") {
    lhs = compose(a, c);
    rhs = lin({{q, compose(c, a)}});
  } else if (rel == "alpha_gamma_star") {
    lhs = compose(a, cs);
    rhs = lin({{q, compose(cs, a)}});
  } else if (rel == "gamma_normal") {
    lhs = compose(cs, c);
    rhs = compose(c, cs);
  } else if (rel == "unitarity_left") {
    lhs = lin({{Complex(1), compose(as, a)}, {Complex(1), compose(cs, c)}});
    rhs = identity_map(2);
  } else if (rel == "unitarity_right") {
    lhs = lin({{Complex(1), compose(a, as)}, {q * q, compose(cs, c)}});
    rhs = identity_map(2);
  } else {
    throw ConfigError("unknown relation '" + rel + "'");
  }
  return simple(map_difference(lhs, rhs, legs), ctx);
}

Outcome run_comultiplication(const Params& p, Worker& w) {
  KernelEvaluator& eval = w.kernels(get(p, "q"));
  const QContext& ctx = eval.context();
  WorkingPrecision wp(ctx);
  const long nmax = get_long(p, "n_max"), kmax = get_long(p, "k_max");
  const long pad = kernel_padding(ctx) + nmax + kmax + 4;
  const std::string& which = get(p, "identity");
  if (which == "delta_zero_v") {
    std::vector<LegSpec> dom(4, LegSpec::integer(-kmax, kmax));
    SparseOperator v = SparseOperator::materialize(
        maps::shift_v(1), {LegSpec::integer(-pad, pad), LegSpec::integer(-pad, pad)},
        {LegSpec::integer(-pad - 1, pad), LegSpec::integer(-pad, pad)});
    SparseOperator d = comultiply(Comultiplication::zero, v, dom, eval);
    return simple(map_difference(d.as_map(Real(0)), tensor(maps::shift_v(1), maps::shift_v(1)), dom),
                  ctx);
  }
  std::vector<LegSpec> dom{LegSpec::natural(nmax), LegSpec::integer(-kmax, kmax),
                           LegSpec::natural(nmax), LegSpec::integer(-kmax, kmax)};
  Su2Generators su2 = build_su2_generators({LegSpec::natural(pad), LegSpec::integer(-pad, pad)}, ctx);
  LinearMap a = maps::alpha(ctx), as = maps::alpha_adjoint(ctx);
  LinearMap c = maps::gamma(ctx), cs = maps::gamma_adjoint(ctx);
  SparseOperator d;
  LinearMap expected;
  if (which == "delta_plus_alpha") {
    d = comultiply(Comultiplication::plus, su2.alpha, dom, eval);
    expected = lin({{Complex(1), tensor(a, a)}, {Complex(-ctx.q()), tensor(cs, c)}});
  } else if (which == "delta_plus_gamma") {
    d = comultiply(Comultiplication::plus, su2.gamma, dom, eval);
    expected = lin({{Complex(1), tensor(c, a)}, {Complex(1), tensor(as, c)}});
  } else {
    throw ConfigError("unknown identity '" + which + "'");
  }
  Real worst(0);
  for (const auto& i : window_indices(dom)) worst = hp::max(worst, max_abs_diff(d.column(i), expected.column(i)));
  return simple(worst, ctx);
}

Outcome run_podles(const Params& p, Worker& w) {
  const std::string& check = get(p, "check");
  if (check.rfind("coaction_", 0) == 0) {
    KernelEvaluator& eval = w.kernels(get(p, "q"));
    WorkingPrecision wp(eval.context());
    const long n = get_long(p, "coaction_n"), k = get_long(p, "coaction_k");
    static const std::map<std::string, PodlesElement> elements{
        {"coaction_x", PodlesElement::x},
        {"coaction_y", PodlesElement::y},
        {"coaction_z", PodlesElement::z},
        {"coaction_w", PodlesElement::one_minus_z}};
    auto it = elements.find(check);
    if (it == elements.end()) throw ConfigError("unknown check '" + check + "'");
    Real r = verify_coaction(it->second, {LegSpec::natural(n), LegSpec::integer(-k, k), LegSpec::natural(n)},
                             eval);
    return simple(r, eval.context());
  }
  const QContext& ctx = w.context(get(p, "q"));
  WorkingPrecision wp(ctx);
  const long nmax = get_long(p, "n_max"), kmax = get_long(p, "k_max");
  LinearMap X = maps::podles_x(ctx), Y = maps::podles_y(ctx), Z = maps::podles_z(ctx);
  const Complex q2(ctx.q() * ctx.q());
  const Complex q2inv = Complex(1) / q2;
  std::vector<LegSpec> one{LegSpec::natural(nmax)};
  LinearMap lhs, rhs;
  std::vector<LegSpec> legs = one;
  if (check == "xz") {
    lhs = compose(X, Z);
    rhs = lin({{q2, compose(Z, X)}});
  } else if (check == "yz") {
    lhs = compose(Y, Z);
    rhs = lin({{q2inv, compose(Z, Y)}});
  } else if (check == "xy") {
    lhs = compose(X, Y);
    rhs = lin({{Complex(1), Z}, {-q2, compose(Z, Z)}});
  } else if (check == "yx") {
    lhs = compose(Y, X);
    rhs = lin({{q2inv, Z}, {-q2inv, compose(Z, Z)}});
  } else if (check == "u_x" || check == "u_y" || check == "u_z") {
    legs = {LegSpec::natural(nmax), LegSpec::integer(-kmax, kmax)};
    LinearMap a = maps::alpha(ctx), as = maps::alpha_adjoint(ctx);
    LinearMap c = maps::gamma(ctx), cs = maps::gamma_adjoint(ctx);
    const LinearMap& x = check == "u_x" ? X : check == "u_y" ? Y : Z;
    lhs = compose(maps::u(ctx), compose(tensor(x, identity_map(1)), maps::u_adjoint(ctx)));
    if (check == "u_x") rhs = lin({{Complex(-1), compose(cs, a)}});
    if (check == "u_y") rhs = lin({{Complex(-1), compose(as, c)}});
    if (check == "u_z") rhs = compose(cs, c);
  } else {
    throw ConfigError("unknown check '" + check + "'");
  }
  return simple(map_difference(lhs, rhs, legs), ctx);
}

std::vector<Params> expand_corepresentation(const Grid& g) {
  std::vector<Params> out;
  const auto idx = axis_long(g, "index");
  for (const auto& q : axis(g, "q"))
    for (long l : axis_long(g, "l"))
      for (long b : axis_long(g, "b"))
        for (long d : axis_long(g, "d"))
          for (long a : idx)
            for (long c : idx)
              for (long e : idx)
                for (long y : idx)
                  for (long w : axis_long(g, "w")) {
                    // probe on the support of both sides
                    long u = w + a - c + e - y;
                    long v = b + c - l - y - e - w;
                    long x = d + y + e - a + l + u;
                    auto s = [](long i) { return std::to_string(i); };
                    out.push_back({{"q", q}, {"l", s(l)}, {"sample", s(a) + "," + s(b) + "," + s(c) + "," + s(d) + "," + s(e)},
                                   {"probe", s(u) + "," + s(v) + "," + s(w) + "," + s(x) + "," + s(y)}});
                  }
  return out;
}

BasisIndex parse_index(const std::string& text) {
  std::vector<long> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(parse_long(trim(item)));
  return BasisIndex(v);
}

Outcome run_corepresentation(const Params& p, Worker& w) {
  KernelEvaluator& eval = w.kernels(get(p, "q"));
  WorkingPrecision wp(eval.context());
  ResidualValue r = verify_corepresentation(get_long(p, "l"), parse_index(get(p, "sample")),
                                            parse_index(get(p, "probe")), eval);
  return simple(r.residual, eval.context(), r.tail_bound);
}

std::vector<Params> expand_scalar(const Grid& g) {
  std::vector<Params> out;
  const auto idx = axis_long(g, "index");
  const auto shifts = axis_long(g, "shift");
  const auto zexp = axis_long(g, "z_exponent");
  const std::set<long> zset(zexp.begin(), zexp.end());
  for (const auto& q : axis(g, "q"))
    for (const auto& check : axis(g, "check"))
      for (long a : idx)
        for (long c : idx)
          for (long e : idx)
            for (long y : idx)
              for (long w : shifts)
                for (long l : shifts) {
                  if (check == "lattice") {
                    if (a - c + e - y < 0 || !zset.count(-l - y - e - w)) continue;
                  } else if (check != "scalar") {
                    throw ConfigError("check must be scalar or lattice");
                  }
                  auto s = [](long i) { return std::to_string(i); };
                  out.push_back({{"q", q}, {"check", check}, {"a", s(a)}, {"c", s(c)}, {"e", s(e)},
                                 {"y", s(y)}, {"w", s(w)}, {"l", s(l)}});
                }
  return out;
}

Outcome run_scalar(const Params& p, Worker& w) {
  KernelEvaluator& eval = w.kernels(get(p, "q"));
  WorkingPrecision wp(eval.context());
  long a = get_long(p, "a"), c = get_long(p, "c"), e = get_long(p, "e"), y = get_long(p, "y");
  long ww = get_long(p, "w"), l = get_long(p, "l");
  if (get(p, "check") == "lattice") {
    LatticeConsistency g = lattice_continuum_residual(a, c, e, y, ww, l, eval);
    return simple(hp::max(g.lhs_gap, g.rhs_gap), eval.context());
  }
  ResidualValue r = scalar_identity_residual(a, c, e, y, ww, l, eval);
  return simple(r.residual, eval.context(), r.tail_bound);
}

std::vector<Params> expand_erdelyi(const Grid& g) {
  std::vector<Params> out;
  for (auto& p : cartesian(g, {"q", "n", "m", "nu", "sigma", "z"})) {
    Params t = p;
    t.emplace_back("check", "theorem");
    out.push_back(std::move(t));
    if (get(p, "n") == "0" && get(p, "m") == "0") {
      p.emplace_back("check", "closed_form");
      out.push_back(std::move(p));
    }
  }
  // Complex orders: a few spot checks at fixed degrees.
  for (const auto& q : axis(g, "q"))
    for (const auto& nu : axis(g, "complex_nu"))
      for (const auto& z : axis(g, "complex_nu_z")) {
        if (nu == "none") continue;
        out.push_back({{"q", q}, {"n", "1"}, {"m", "2"}, {"nu", nu}, {"sigma", "0.3"}, {"z", z},
                       {"check", "theorem"}});
      }
  return out;
}

ErdelyiParams erdelyi_params(const Params& p, const QContext& ctx) {
  ErdelyiParams e;
  e.n = get_long(p, "n");
  e.m = get_long(p, "m");
  e.nu = parse_value(get(p, "nu"), ctx);
  e.sigma = parse_value(get(p, "sigma"), ctx);
  e.z = parse_value(get(p, "z"), ctx);
  return e;
}

Outcome run_erdelyi(const Params& p, Worker& w) {
  const QContext& ctx = w.context(get(p, "q"));
  WorkingPrecision wp(ctx);
  ErdelyiParams e = erdelyi_params(p, ctx);
  SeriesValue lhs = erdelyi_lhs(e, ctx);
  Complex rhs;
  if (get(p, "check") == "closed_form") {
    // z^nu (z^2 q^2; q^2)_inf, evaluated without the Wall machinery
    const QContext cq = ctx.squared();
    rhs = hp::pow(e.z, e.nu) * qpochhammer(e.z * e.z * Complex(cq.q()), kInfinite, cq).value;
  } else {
    rhs = erdelyi_rhs(e, ctx);
  }
  Real scale = Real(1) + hp::abs(rhs);
  return {hp::abs(lhs.value - rhs), ctx.tolerance() * scale, lhs.tail_bound, {}};
}

Outcome run_erdelyi_qintegral(const Params& p, Worker& w) {
  const QContext& ctx = w.context(get(p, "q"));
  WorkingPrecision wp(ctx);
  ErdelyiParams e = erdelyi_params(p, ctx);
  QIntegralValue v = erdelyi_qintegral(e, std::nullopt, ctx);
  Real scale = Real(1) + hp::abs(v.rhs);
  Real direct = hp::abs(v.lhs.value - v.rhs);
  Real reduced = hp::abs(v.reduced_lhs - v.rhs);
  Outcome o{hp::max(direct, reduced), ctx.tolerance() * scale, v.lhs.tail_bound, {}};
  o.message = "jackson " + direct.to_string(3) + ", reduced " + reduced.to_string(3);
  return o;
}

Outcome run_classical(const Params& p, Worker& w) {
  const QContext& ctx = w.context("0.5");  // only for parsing and precision
  WorkingPrecision wp(ctx);
  std::vector<std::string> qs{get(p, "q_coarse"), get(p, "q_fine")};
  auto rows = classical_limit_table(get_long(p, "n"), get_long(p, "m"),
                                    parse_value(get(p, "nu"), ctx).re(),
                                    parse_value(get(p, "sigma"), ctx).re(),
                                    parse_value(get(p, "y"), ctx).re(), qs, w.precision(),
                                    w.tolerance());
  Outcome o{rows[1].gap, parse_real_token(get(p, "gap_limit")), Real(0), {}};
  o.message = "gap " + rows[0].gap.to_string(3) + " at q=" + rows[0].q + ", " +
              rows[1].gap.to_string(3) + " at q=" + rows[1].q;
  if (!(rows[1].gap < rows[0].gap)) {
    o.extra_failure = true;
    o.message += " (not shrinking)";
  }
  return o;
}

const std::vector<Suite>& registry() {
  static const std::vector<Suite> suites = [] {
    std::vector<Suite> s;
    auto plain = [](std::vector<std::string> axes) {
      return [axes](const Grid& g) { return cartesian(g, axes); };
    };
    s.push_back({"wall-orthogonality", "1e-30",
                 {{"q", "0.3, 0.6, 0.9"}, {"a", "q, q^2, 0.5"}, {"mode", "primal, dual"},
                  {"n", "0..6"}, {"m", "0..6"}},
                 plain({"q", "a", "mode", "n", "m"}), run_wall});
    s.push_back({"qbessel-orthogonality", "1e-25",
                 {{"q", "0.3"}, {"n", "-3..3"}, {"m", "-3..3"}, {"l", "-3..3"}, {"window", "40"}},
                 plain({"q", "window", "n", "m", "l"}), run_qbessel});
    s.push_back({"hankel-roundtrip", "1e-25",
                 {{"q", "0.3, 0.5"}, {"nu", "0.5, 1, 1.5"}, {"sigma", "0.2"}, {"n", "0..2"},
                  {"m", "0..1"}, {"window", "40"}, {"interior", "10"}},
                 plain({"q", "nu", "sigma", "n", "m", "window", "interior"}), run_hankel});
    s.push_back({"kernel-plus-orthogonality", "1e-25",
                 {{"q", "0.3, 0.5, 0.6"}, {"mode", "first, second"}, {"index", "0..6"},
                  {"shift", "-6..6"}},
                 expand_kernel_orthogonality,
                 [](const Params& p, Worker& w) { return run_kernel_orthogonality(p, w, KernelKind::plus); }});
    s.push_back({"kernel-zero-orthogonality", "1e-25",
                 {{"q", "0.3, 0.5, 0.6"}, {"mode", "first, second"}, {"index", "-4..4"},
                  {"shift", "-4..4"}},
                 expand_kernel_orthogonality,
                 [](const Params& p, Worker& w) { return run_kernel_orthogonality(p, w, KernelKind::zero); }});
    s.push_back({"kernel-contraction", "1e-15",
                 {{"q", "0.3, 0.5, 0.6"}, {"N", "40"}, {"p", "-3..3"}, {"v", "-3..3"}, {"w", "-3..3"}},
                 plain({"q", "N", "p", "v", "w"}), run_contraction});
    s.push_back({"su2-relations", "1e-30",
                 {{"q", "0.3, 0.6"},
                  {"relation", "alpha_gamma, alpha_gamma_star, gamma_normal, unitarity_left, unitarity_right"},
                  {"n_max", "10"}, {"k_max", "10"}},
                 plain({"q", "relation", "n_max", "k_max"}), run_su2});
    s.push_back({"comultiplication", "1e-30",
                 {{"q", "0.3"}, {"identity", "delta_plus_alpha, delta_plus_gamma, delta_zero_v"},
                  {"n_max", "5"}, {"k_max", "4"}},
                 plain({"q", "identity", "n_max", "k_max"}), run_comultiplication});
    s.push_back({"podles-coaction", "1e-25",
                 {{"q", "0.3"},
                  {"check", "xz, yz, xy, yx, u_x, u_y, u_z, coaction_x, coaction_y, coaction_z, coaction_w"},
                  {"n_max", "10"}, {"k_max", "10"}, {"coaction_n", "3"}, {"coaction_k", "2"}},
                 plain({"q", "check", "n_max", "k_max", "coaction_n", "coaction_k"}), run_podles});
    s.push_back({"corepresentation", "1e-25",
                 {{"q", "0.3"}, {"l", "-2, 0, 2"}, {"b", "1"}, {"d", "-1"}, {"index", "0..2"},
                  {"w", "-3..3"}},
                 expand_corepresentation, run_corepresentation});
    s.push_back({"scalar-identity", "1e-25",
                 {{"q", "0.3, 0.5"}, {"check", "scalar, lattice"}, {"index", "0..3"},
                  {"shift", "-3..3"}, {"z_exponent", "-3..3"}},
                 expand_scalar, run_scalar});
    s.push_back({"erdelyi", "1e-30",
                 {{"q", "0.3, 0.6, 0.9"}, {"n", "0..4"}, {"m", "0..4"}, {"nu", "-0.5, 0, 1, 2.5"},
                  {"sigma", "-1, 0.3, 1+0.5i"}, {"z", "0.3, q^2, 1.7, 0.5@pi/3"},
                  {"complex_nu", "0.5+0.5i, 1-0.3i"}, {"complex_nu_z", "0.7, 1.7@pi/4"}},
                 expand_erdelyi, run_erdelyi});
    s.push_back({"erdelyi-qintegral", "1e-30",
                 {{"q", "0.3, 0.6"}, {"n", "0..2"}, {"m", "0..2"}, {"nu", "-0.5, 0, 1"},
                  {"sigma", "0.3, 0.4+0.9i"}, {"z", "0.7, 1.7@pi/4"}},
                 plain({"q", "n", "m", "nu", "sigma", "z"}), run_erdelyi_qintegral});
    s.push_back({"classical-limit", "1e-20",
                 {{"n", "0..2"}, {"m", "0..2"}, {"nu", "0, 1"}, {"sigma", "0.3"}, {"y", "0.8"},
                  {"q_coarse", "0.99"}, {"q_fine", "0.999"}, {"gap_limit", "1e-2"}},
                 plain({"n", "m", "nu", "sigma", "y", "q_coarse", "q_fine", "gap_limit"}),
                 run_classical});
    return s;
  }();
  return suites;
}

const Suite& find_suite(const std::string& name) {
  for (const auto& s : registry()) {
    if (s.name == name) return s;
  }
  throw ConfigError("unknown suite '" + name + "'");
}

std::string effective_tolerance(const SuiteConfig& cfg, const Suite& s) {
  return cfg.tolerance ? *cfg.tolerance : s.tolerance;
}

bool numeric(const std::string& token) {
  static const QContext probe("0.5", 20, "1e-5");
  WorkingPrecision wp(probe);
  try {
    parse_value(token, probe);
    return true;
  } catch (const ConfigError&) {
    return false;
  }
}

Grid build_grid(const SuiteConfig& cfg, const Suite& s) {
  Grid g;
  for (const auto& [k, v] : s.defaults) g[k] = split_list(v);
  auto it = cfg.grids.find(s.name);
  if (it != cfg.grids.end()) {
    for (const auto& [k, v] : it->second) {
      if (!g.count(k)) throw ConfigError("suite " + s.name + " has no grid axis '" + k + "'");
      // axes whose defaults are numbers only take numbers ("none" switches an axis off)
      const bool numbers = std::all_of(g[k].begin(), g[k].end(), numeric);
      auto values = split_list(v);
      for (const auto& t : values) {
        if (numbers && t != "none" && !numeric(t)) {
          throw ConfigError("suite " + s.name + ", axis " + k + ": not a number: '" + t + "'");
        }
      }
      g[k] = std::move(values);
    }
  }
  return g;
}

std::vector<std::string> selected(const SuiteConfig& cfg) {
  if (cfg.suite == "all") {
    std::vector<std::string> all;
    for (const auto& s : registry()) all.push_back(s.name);
    return all;
  }
  find_suite(cfg.suite);
  return {cfg.suite};
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& s : registry()) n.push_back(s.name);
    n.push_back("all");
    return n;
  }();
  return names;
}

std::size_t VerificationReport::count(CaseStatus s) const {
  return static_cast<std::size_t>(
      std::count_if(cases.begin(), cases.end(), [s](const CaseResult& c) { return c.status == s; }));
}

int VerificationReport::exit_code() const {
  if (count(CaseStatus::fail) + count(CaseStatus::error) > 0) return 1;
  if (count(CaseStatus::truncation) > 0) return 3;
  return 0;
}

std::string VerificationReport::to_json() const {
  nlohmann::json j;
  j["suite"] = suite;
  j["precision"] = precision;
  j["tolerance"] = tolerances;
  j["summary"] = {{"cases", cases.size()},
                  {"pass", count(CaseStatus::pass)},
                  {"fail", count(CaseStatus::fail)},
                  {"truncation", count(CaseStatus::truncation)},
                  {"error", count(CaseStatus::error)}};
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& c : cases) {
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [k, v] : c.params) params[k] = v;
    rows.push_back({{"suite", c.suite},
                    {"key", c.key},
                    {"params", params},
                    {"status", to_string(c.status)},
                    {"residual", c.residual},
                    {"threshold", c.threshold},
                    {"tail_bound", c.tail_bound},
                    {"message", c.message}});
  }
  j["cases"] = std::move(rows);
  return j.dump(2) + "\n";
}

SuiteConfig parse_config(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  SuiteConfig cfg;
  for (const auto& [key, node] : tree) {
    if (!node.empty()) {
      GridOverrides& g = cfg.grids[key];
      for (const auto& [k, v] : node) g[k] = v.data();
      continue;
    }
    const std::string value = trim(node.data());
    if (key == "suite") {
      cfg.suite = value;
    } else if (key == "precision") {
      cfg.precision = static_cast<unsigned>(parse_long(value));
    } else if (key == "tolerance") {
      cfg.tolerance = value;
    } else if (key == "jobs") {
      cfg.jobs = static_cast<unsigned>(parse_long(value));
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  return cfg;
}

SuiteConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  return parse_config(in);
}

void validate(const SuiteConfig& cfg) {
  if (cfg.precision < 10 || cfg.precision > 5000) {
    throw ConfigError("precision must lie in [10, 5000]");
  }
  for (const auto& [name, grid] : cfg.grids) find_suite(name);
  for (const auto& name : selected(cfg)) {
    const Suite& s = find_suite(name);
    try {
      QContext probe("0.5", cfg.precision, effective_tolerance(cfg, s));
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    Grid g = build_grid(cfg, s);
    s.expand(g);
  }
}

VerificationReport run_suite(const SuiteConfig& cfg) {
  validate(cfg);
  VerificationReport report;
  report.suite = cfg.suite;
  report.precision = cfg.precision;

  struct Job {
    const Suite* suite;
    Params params;
    std::string key;
  };
  std::vector<Job> jobs;
  for (const auto& name : selected(cfg)) {
    const Suite& s = find_suite(name);
    report.tolerances[name] = effective_tolerance(cfg, s);
    auto cases = s.expand(build_grid(cfg, s));
    for (std::size_t i = 0; i < cases.size(); ++i) {
      std::ostringstream key;
      key << name << '/';
      key.width(6);
      key.fill('0');
      key << i;
      jobs.push_back({&s, std::move(cases[i]), key.str()});
    }
  }

  report.cases.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    std::map<const Suite*, std::unique_ptr<Worker>> workers;
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      auto& wk = workers[job.suite];
      if (!wk) wk = std::make_unique<Worker>(cfg.precision, effective_tolerance(cfg, *job.suite));
      CaseResult& r = report.cases[i];
      r.suite = job.suite->name;
      r.key = job.key;
      r.params = job.params;
      hp::PrecisionScope scope(cfg.precision + QContext::kGuardDigits);
      try {
        Outcome o = job.suite->run(job.params, *wk);
        r.residual = o.residual.to_string(cfg.precision);
        r.threshold = o.threshold.to_string(cfg.precision);
        r.tail_bound = o.tail.to_string(cfg.precision);
        r.message = o.message;
        r.status = (o.residual < o.threshold && !o.extra_failure) ? CaseStatus::pass : CaseStatus::fail;
      } catch (const Error& e) {
        r.status = (e.kind() == ErrorKind::TruncationInsufficient || e.kind() == ErrorKind::WindowTooSmall)
                       ? CaseStatus::truncation
                       : CaseStatus::error;
        r.message = e.what();
      } catch (const std::exception& e) {
        r.status = CaseStatus::error;
        r.message = e.what();
      }
    }
  };
  unsigned n = cfg.jobs ? cfg.jobs : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(1, jobs.size())));
  if (n == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return report;
}

}  // namespace qerd
