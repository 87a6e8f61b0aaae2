#include "qerd/operators.hpp"

#include <cmath>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>

namespace qerd {

// ---------------------------------------------------------------------------
// Basis indices and sparse vectors

BasisIndex::BasisIndex(std::initializer_list<long> idx) {
  if (idx.size() > kMaxLegs) throw Error(ErrorKind::InvalidArgument, "too many tensor legs");
  for (long i : idx) v_[n_++] = i;
}

BasisIndex::BasisIndex(const std::vector<long>& idx) {
  if (idx.size() > kMaxLegs) throw Error(ErrorKind::InvalidArgument, "too many tensor legs");
  for (long i : idx) v_[n_++] = i;
}

std::string BasisIndex::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < n_; ++i) {
    if (i) s += ' ';
    s += std::to_string(v_[i]);
  }
  return s;
}

bool in_window(const BasisIndex& idx, const std::vector<LegSpec>& legs) {
  if (idx.size() != legs.size()) return false;
  for (std::size_t i = 0; i < legs.size(); ++i) {
    if (!legs[i].contains(idx[i])) return false;
  }
  return true;
}

std::vector<BasisIndex> window_indices(const std::vector<LegSpec>& legs) {
  std::vector<BasisIndex> out;
  if (legs.empty() || legs.size() > BasisIndex::kMaxLegs) return out;
  std::vector<long> cur;
  for (const auto& l : legs) {
    if (l.hi < l.lo) return out;
    cur.push_back(l.lo);
  }
  for (;;) {
    out.emplace_back(cur);
    std::size_t i = legs.size();
    while (i > 0) {
      --i;
      if (cur[i] < legs[i].hi) {
        ++cur[i];
        for (std::size_t j = i + 1; j < legs.size(); ++j) cur[j] = legs[j].lo;
        break;
      }
      if (i == 0) return out;
    }
  }
}

void axpy(SparseVector& y, const Complex& a, const SparseVector& x) {
  for (const auto& [i, c] : x) {
    auto it = y.find(i);
    if (it == y.end()) {
      y.emplace(i, a * c);
    } else {
      it->second += a * c;
    }
  }
}

Real norm2(const SparseVector& x) {
  Real s(0);
  for (const auto& [i, c] : x) s += hp::norm(c);
  return s;
}

Complex inner(const SparseVector& x, const SparseVector& y) {
  Complex s(0);
  const SparseVector& small = x.size() <= y.size() ? x : y;
  const SparseVector& large = x.size() <= y.size() ? y : x;
  for (const auto& [i, c] : small) {
    auto it = large.find(i);
    if (it == large.end()) continue;
    if (&small == &x) {
      s += hp::conj(c) * it->second;
    } else {
      s += hp::conj(it->second) * c;
    }
  }
  return s;
}

Real max_abs_diff(const SparseVector& x, const SparseVector& y) {
  Real m(0);
  for (const auto& [i, c] : x) {
    auto it = y.find(i);
    m = hp::max(m, it == y.end() ? hp::abs(c) : hp::abs(c - it->second));
  }
  for (const auto& [i, c] : y) {
    if (!x.count(i)) m = hp::max(m, hp::abs(c));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Linear maps

SparseVector LinearMap::apply(const SparseVector& x) const {
  SparseVector y;
  for (const auto& [i, c] : x) {
    if (c.is_zero()) continue;
    if (!defined_at(i)) {
      if (hp::abs(c) > threshold_) {
        throw Error(ErrorKind::WindowTooSmall,
                    "weight " + hp::abs(c).to_string(6) + " on e_{" + i.to_string() +
                        "} outside the materialized window");
      }
      continue;
    }
    axpy(y, c, column_(i));
  }
  return y;
}

LinearMap compose(const LinearMap& a, const LinearMap& b) {
  return LinearMap(b.arity(), [a, b](const BasisIndex& i) { return a.apply(b.column(i)); },
                   [b](const BasisIndex& i) { return b.defined_at(i); });
}

LinearMap combine(const std::vector<std::pair<Complex, LinearMap>>& terms) {
  if (terms.empty()) throw Error(ErrorKind::InvalidArgument, "empty linear combination");
  return LinearMap(terms.front().second.arity(), [terms](const BasisIndex& i) {
    SparseVector y;
    for (const auto& [c, m] : terms) {
      if (m.defined_at(i)) axpy(y, c, m.column(i));
    }
    return y;
  });
}

LinearMap embed(const LinearMap& op, const std::vector<std::size_t>& positions, std::size_t arity) {
  if (positions.size() != op.arity()) {
    throw Error(ErrorKind::InvalidArgument, "embedding needs one position per operator leg");
  }
  auto restrict_to = [positions](const BasisIndex& i) {
    std::vector<long> sub;
    for (std::size_t p : positions) sub.push_back(i[p]);
    return BasisIndex(sub);
  };
  return LinearMap(
      arity,
      [op, positions, restrict_to](const BasisIndex& i) {
        SparseVector out;
        for (auto& [j, c] : op.column(restrict_to(i))) {
          BasisIndex k = i;
          for (std::size_t n = 0; n < positions.size(); ++n) k[positions[n]] = j[n];
          out.emplace(k, c);
        }
        return out;
      },
      [op, restrict_to](const BasisIndex& i) { return op.defined_at(restrict_to(i)); });
}

LinearMap tensor(const LinearMap& a, const LinearMap& b) {
  std::size_t n = a.arity() + b.arity();
  std::vector<std::size_t> pa, pb;
  for (std::size_t i = 0; i < a.arity(); ++i) pa.push_back(i);
  for (std::size_t i = a.arity(); i < n; ++i) pb.push_back(i);
  return compose(embed(a, pa, n), embed(b, pb, n));
}

LinearMap identity_map(std::size_t arity) {
  return LinearMap(arity, [](const BasisIndex& i) { return SparseVector{{i, Complex(1)}}; });
}

// ---------------------------------------------------------------------------
// Kernel rows with truncation

namespace {

struct Term {
  long index;
  Real value;
};
using Row = std::vector<Term>;

// Memoized truncated kernel rows shared by the copies of a LinearMap.
class KernelRows {
 public:
  explicit KernelRows(KernelEvaluator& eval) : eval_(eval) {}

  // p -> P+(p, v, w), p >= 0, rigorous geometric truncation.
  const Row& plus_row(long v, long w) {
    auto key = std::make_pair(v, w);
    auto it = plus_rows_.find(key);
    if (it != plus_rows_.end()) return it->second;
    const QContext& ctx = eval_.context();
    WorkingPrecision wp(ctx);
    Row row;
    const Real rho = hp::pow(ctx.q(), 1 + std::abs(v - w));
    for (long p = 0;; ++p) {
      row.push_back({p, eval_.plus(p, v, w)});
      if (eval_.plus_bound(p + 1, v, w) / (Real(1) - rho) <= ctx.series_target()) break;
    }
    return plus_rows_.emplace(key, std::move(row)).first->second;
  }

  // w -> P+(p, w+t, w), w >= max(0,-t), super-geometric decay in w.
  const Row& plus_dual_row(long p, long t) {
    auto key = std::make_pair(p, t);
    auto it = plus_dual_rows_.find(key);
    if (it != plus_dual_rows_.end()) return it->second;
    WorkingPrecision wp(eval_.context());
    Row row = collect([&](long w) { return eval_.plus(p, w + t, w); }, std::max(0L, -t), 1,
                      p + std::abs(t) + 2);
    return plus_dual_rows_.emplace(key, std::move(row)).first->second;
  }

  // d -> P0(w + d, w + t, w) = (-q)^d J_t(q^d), two-sided.
  const Row& zero_row(long t) {
    auto it = zero_rows_.find(t);
    if (it != zero_rows_.end()) return it->second;
    WorkingPrecision wp(eval_.context());
    auto f = [&](long d) { return eval_.zero(d, t, 0); };
    Row down = collect(f, -1, -1, std::abs(t) + 2);
    Row row(down.rbegin(), down.rend());
    Row up = collect(f, 0, 1, std::abs(t) + 2);
    row.insert(row.end(), std::make_move_iterator(up.begin()), std::make_move_iterator(up.end()));
    return zero_rows_.emplace(t, std::move(row)).first->second;
  }

 private:
  template <typename F>
  Row collect(F&& f, long start, long step, long min_steps) {
    const QContext& ctx = eval_.context();
    Row row;
    Real prev(-1);
    for (long i = 0; i < 100000; ++i) {
      long idx = start + i * step;
      Real v = f(idx);
      Real cur = hp::abs(v);
      row.push_back({idx, std::move(v)});
      if (i >= min_steps && prev >= Real(0) && prev <= ctx.series_target() &&
          cur <= ctx.series_target()) {
        if (cur.is_zero() || (cur < prev && cur * cur / (prev - cur) <= ctx.series_target())) break;
      }
      prev = std::move(cur);
    }
    return row;
  }

  KernelEvaluator& eval_;
  std::map<std::pair<long, long>, Row> plus_rows_;
  std::map<std::pair<long, long>, Row> plus_dual_rows_;
  std::map<long, Row> zero_rows_;
};

std::shared_ptr<KernelRows> rows_for(KernelEvaluator& eval) {
  // One row cache per evaluator, shared by all maps built from it.
  thread_local std::map<const KernelEvaluator*, std::weak_ptr<KernelRows>> registry;
  auto& slot = registry[&eval];
  if (auto sp = slot.lock()) return sp;
  auto sp = std::make_shared<KernelRows>(eval);
  slot = sp;
  return sp;
}

}  // namespace

namespace maps {

LinearMap w_plus(KernelEvaluator& eval) {
  auto rows = rows_for(eval);
  return LinearMap(4, [rows](const BasisIndex& i) {
    // W+ e_{m,k,n,l} = sum_p P+(p,m,n) e_{k+n-p, l-m+p, p, m-n}
    SparseVector out;
    const long m = i[0], k = i[1], n = i[2], l = i[3];
    if (m < 0 || n < 0) return out;
    for (const auto& [p, v] : rows->plus_row(m, n)) out.emplace(BasisIndex{k + n - p, l - m + p, p, m - n}, v);
    return out;
  });
}

LinearMap w_plus_adjoint(KernelEvaluator& eval) {
  auto rows = rows_for(eval);
  return LinearMap(4, [rows](const BasisIndex& i) {
    // W+^* e_{r,s,p,t} = xi+_{r,s,p,t} = sum_{v-w=t} P+(p,v,w) e_{v, r+p-w, w, s-p+v}
    SparseVector out;
    const long r = i[0], s = i[1], p = i[2], t = i[3];
    if (p < 0) return out;
    for (const auto& [w, v] : rows->plus_dual_row(p, t)) {
      out.emplace(BasisIndex{w + t, r + p - w, w, s - p + w + t}, v);
    }
    return out;
  });
}

LinearMap w_zero(KernelEvaluator& eval) {
  auto rows = rows_for(eval);
  return LinearMap(4, [rows](const BasisIndex& i) {
    // W0 e_{m,k,n,l} = sum_p P0(p,m,n) e_{k+n-p, l-m+p, p, m-n}
    SparseVector out;
    const long m = i[0], k = i[1], n = i[2], l = i[3];
    for (const auto& [d, v] : rows->zero_row(m - n)) {
      const long p = n + d;
      out.emplace(BasisIndex{k + n - p, l - m + p, p, m - n}, v);
    }
    return out;
  });
}

LinearMap w_zero_adjoint(KernelEvaluator& eval) {
  auto rows = rows_for(eval);
  return LinearMap(4, [rows](const BasisIndex& i) {
    // W0^* e_{r,s,p,t} = xi0_{r,s,p,t} = sum_{v-w=t} P0(p,v,w) e_{v, r+p-w, w, s-p+v}
    SparseVector out;
    const long r = i[0], s = i[1], p = i[2], t = i[3];
    for (const auto& [d, v] : rows->zero_row(t)) {
      const long w = p - d;
      out.emplace(BasisIndex{w + t, r + p - w, w, s - p + w + t}, v);
    }
    return out;
  });
}

LinearMap g(long l, KernelEvaluator& eval) {
  auto rows = rows_for(eval);
  return LinearMap(3, [rows, l](const BasisIndex& i) {
    // G^(l) e_{a,b,c} = sum_m P+(m,a,c) e_{a-l-c-m, b+c-m, m}
    SparseVector out;
    const long a = i[0], b = i[1], c = i[2];
    if (a < 0 || c < 0) return out;
    for (const auto& [m, v] : rows->plus_row(a, c)) out.emplace(BasisIndex{a - l - c - m, b + c - m, m}, v);
    return out;
  });
}

LinearMap g_adjoint(long l, KernelEvaluator& eval) {
  auto rows = rows_for(eval);
  return LinearMap(3, [rows, l](const BasisIndex& i) {
    // G^(l)* e_{x,r,p} = eta_{r,p,x+l+p} = sum_{v-w=t} P+(p,v,w) e_{v, r+p-w, w}
    SparseVector out;
    const long x = i[0], r = i[1], p = i[2];
    if (p < 0) return out;
    const long t = x + l + p;
    for (const auto& [w, v] : rows->plus_dual_row(p, t)) out.emplace(BasisIndex{w + t, r + p - w, w}, v);
    return out;
  });
}

namespace {

LinearMap two_leg(const QContext& ctx, std::function<void(const QContext&, long, long, SparseVector&)> f) {
  return LinearMap(2, [ctx, f](const BasisIndex& i) {
    WorkingPrecision wp(ctx);
    SparseVector out;
    if (i[0] >= 0) f(ctx, i[0], i[1], out);
    return out;
  });
}

LinearMap one_leg(const QContext& ctx, std::function<void(const QContext&, long, SparseVector&)> f) {
  return LinearMap(1, [ctx, f](const BasisIndex& i) {
    WorkingPrecision wp(ctx);
    SparseVector out;
    if (i[0] >= 0) f(ctx, i[0], out);
    return out;
  });
}

}  // namespace

LinearMap alpha(const QContext& ctx) {
  return two_leg(ctx, [](const QContext& c, long n, long k, SparseVector& out) {
    if (n > 0) out.emplace(BasisIndex{n - 1, k}, Complex(hp::sqrt(Real(1) - hp::pow(c.q(), 2 * n))));
  });
}

LinearMap alpha_adjoint(const QContext& ctx) {
  return two_leg(ctx, [](const QContext& c, long n, long k, SparseVector& out) {
    out.emplace(BasisIndex{n + 1, k}, Complex(hp::sqrt(Real(1) - hp::pow(c.q(), 2 * n + 2))));
  });
}

LinearMap gamma(const QContext& ctx) {
  return two_leg(ctx, [](const QContext& c, long n, long k, SparseVector& out) {
    out.emplace(BasisIndex{n, k + 1}, Complex(hp::pow(c.q(), n)));
  });
}

LinearMap gamma_adjoint(const QContext& ctx) {
  return two_leg(ctx, [](const QContext& c, long n, long k, SparseVector& out) {
    out.emplace(BasisIndex{n, k - 1}, Complex(hp::pow(c.q(), n)));
  });
}

LinearMap podles_x(const QContext& ctx) {
  return one_leg(ctx, [](const QContext& c, long n, SparseVector& out) {
    if (n > 0) {
      out.emplace(BasisIndex{n - 1},
                  Complex(-hp::pow(c.q(), n - 1) * hp::sqrt(Real(1) - hp::pow(c.q(), 2 * n))));
    }
  });
}

LinearMap podles_y(const QContext& ctx) {
  return one_leg(ctx, [](const QContext& c, long n, SparseVector& out) {
    out.emplace(BasisIndex{n + 1},
                Complex(-hp::pow(c.q(), n) * hp::sqrt(Real(1) - hp::pow(c.q(), 2 * n + 2))));
  });
}

LinearMap podles_z(const QContext& ctx) {
  return one_leg(ctx, [](const QContext& c, long n, SparseVector& out) {
    out.emplace(BasisIndex{n}, Complex(hp::pow(c.q(), 2 * n)));
  });
}

LinearMap u(const QContext& ctx) {
  return two_leg(ctx, [](const QContext&, long n, long k, SparseVector& out) {
    out.emplace(BasisIndex{n, n + k}, Complex(1));
  });
}

LinearMap u_adjoint(const QContext& ctx) {
  return two_leg(ctx, [](const QContext&, long n, long k, SparseVector& out) {
    out.emplace(BasisIndex{n, k - n}, Complex(1));
  });
}

LinearMap shift_v(long power) {
  return LinearMap(2, [power](const BasisIndex& i) {
    return SparseVector{{BasisIndex{i[0] - power, i[1]}, Complex(1)}};
  });
}

}  // namespace maps

// ---------------------------------------------------------------------------
// Materialized operators

SparseOperator SparseOperator::materialize(const LinearMap& map, std::vector<LegSpec> domain,
                                           std::vector<LegSpec> codomain) {
  if (domain.size() != map.arity() || codomain.size() != map.arity()) {
    throw Error(ErrorKind::InvalidArgument, "window arity does not match the operator");
  }
  for (const auto* legs : {&domain, &codomain}) {
    for (const auto& l : *legs) {
      if (l.kind == LegKind::natural && l.lo != 0) {
        throw Error(ErrorKind::InvalidArgument, "an N-leg window starts at 0");
      }
    }
  }
  SparseOperator op(std::move(domain), std::move(codomain));
  for (const auto& i : window_indices(op.domain_)) {
    SparseVector kept;
    Real dropped(0);
    for (auto& [j, c] : map.column(i)) {
      if (in_window(j, op.codomain_)) {
        kept.emplace(j, c);
      } else {
        dropped += hp::norm(c);
      }
    }
    op.set_column(i, std::move(kept), std::move(dropped));
  }
  return op;
}

const SparseVector& SparseOperator::column(const BasisIndex& i) const {
  auto it = columns_.find(i);
  if (it == columns_.end()) {
    throw Error(ErrorKind::WindowTooSmall, "no column e_{" + i.to_string() + "} in the window");
  }
  return it->second;
}

Real SparseOperator::deficit(const BasisIndex& i) const {
  auto it = deficits_.find(i);
  return it == deficits_.end() ? Real(0) : it->second;
}

Real SparseOperator::max_deficit() const {
  Real m(0);
  for (const auto& [i, d] : deficits_) m = hp::max(m, d);
  return m;
}

std::size_t SparseOperator::entry_count() const {
  std::size_t n = 0;
  for (const auto& [i, col] : columns_) n += col.size();
  return n;
}

void SparseOperator::set_column(const BasisIndex& i, SparseVector col, Real deficit) {
  columns_[i] = std::move(col);
  deficits_[i] = std::move(deficit);
}

LinearMap SparseOperator::as_map(const Real& threshold) const {
  auto self = std::make_shared<const SparseOperator>(*this);
  return LinearMap(
      domain_.size(), [self](const BasisIndex& i) { return self->column(i); },
      [self](const BasisIndex& i) { return self->columns_.count(i) > 0; }, threshold);
}

SparseOperator SparseOperator::adjoint() const {
  SparseOperator op(codomain_, domain_);
  for (const auto& i : window_indices(codomain_)) op.columns_[i];
  for (const auto& [i, col] : columns_) {
    for (const auto& [j, c] : col) op.columns_[j].emplace(i, hp::conj(c));
  }
  return op;
}

Real SparseOperator::gram_defect(const std::vector<BasisIndex>& sample) const {
  std::vector<BasisIndex> idx = sample;
  if (idx.empty()) {
    for (const auto& [i, col] : columns_) idx.push_back(i);
  }
  Real worst(0);
  for (std::size_t a = 0; a < idx.size(); ++a) {
    const SparseVector& ca = column(idx[a]);
    for (std::size_t b = a; b < idx.size(); ++b) {
      Complex g = inner(ca, column(idx[b]));
      if (a == b) g -= Complex(1);
      Real excess = hp::abs(g) - hp::sqrt(deficit(idx[a]) * deficit(idx[b]));
      worst = hp::max(worst, excess);
    }
  }
  return worst;
}

void SparseOperator::export_text(std::ostream& os) const {
  for (const auto& [i, col] : columns_) {
    for (const auto& [j, c] : col) {
      os << i.to_string() << " | " << j.to_string() << " | " << c.re().to_string() << ' '
         << c.im().to_string() << '\n';
    }
  }
}

SparseOperator SparseOperator::import_text(std::istream& is, std::vector<LegSpec> domain,
                                           std::vector<LegSpec> codomain) {
  SparseOperator op(std::move(domain), std::move(codomain));
  for (const auto& i : window_indices(op.domain_)) op.columns_[i];
  std::string line;
  auto parse_index = [](const std::string& s) {
    std::istringstream in(s);
    std::vector<long> v;
    long x;
    while (in >> x) v.push_back(x);
    return BasisIndex(v);
  };
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto a = line.find('|');
    auto b = line.find('|', a + 1);
    if (a == std::string::npos || b == std::string::npos) {
      throw Error(ErrorKind::InvalidArgument, "malformed operator line: " + line);
    }
    std::istringstream vals(line.substr(b + 1));
    std::string re, im;
    vals >> re >> im;
    op.columns_[parse_index(line.substr(0, a))].emplace(parse_index(line.substr(a + 1, b - a - 1)),
                                                        Complex(Real(re), Real(im)));
  }
  return op;
}

SparseOperator build_w_plus(const std::vector<LegSpec>& domain,
                            const std::vector<LegSpec>& codomain, KernelEvaluator& eval) {
  return SparseOperator::materialize(maps::w_plus(eval), domain, codomain);
}

SparseOperator build_w_zero(const std::vector<LegSpec>& domain,
                            const std::vector<LegSpec>& codomain, KernelEvaluator& eval) {
  return SparseOperator::materialize(maps::w_zero(eval), domain, codomain);
}

SparseOperator build_g(long l, const std::vector<LegSpec>& domain,
                       const std::vector<LegSpec>& codomain, KernelEvaluator& eval) {
  return SparseOperator::materialize(maps::g(l, eval), domain, codomain);
}

Su2Generators build_su2_generators(const std::vector<LegSpec>& legs, const QContext& ctx) {
  return {SparseOperator::materialize(maps::alpha(ctx), legs, legs),
          SparseOperator::materialize(maps::gamma(ctx), legs, legs)};
}

PodlesGenerators build_podles_generators(const LegSpec& leg, const std::vector<LegSpec>& u_legs,
                                         const QContext& ctx) {
  std::vector<LegSpec> one{leg};
  // U shifts the Z-leg by n; widen its codomain so no column is cut.
  std::vector<LegSpec> u_codomain = u_legs;
  if (u_legs.size() == 2) u_codomain[1].hi += u_legs[0].hi;
  return {SparseOperator::materialize(maps::podles_x(ctx), one, one),
          SparseOperator::materialize(maps::podles_y(ctx), one, one),
          SparseOperator::materialize(maps::podles_z(ctx), one, one),
          SparseOperator::materialize(maps::u(ctx), u_legs, u_codomain)};
}

SparseOperator comultiply(Comultiplication which, const SparseOperator& x,
                          const std::vector<LegSpec>& domain, KernelEvaluator& eval) {
  const QContext& ctx = eval.context();
  WorkingPrecision wp(ctx);
  if (x.domain().size() != 2) throw Error(ErrorKind::InvalidArgument, "x must act on two legs");
  LinearMap inner_map = embed(x.as_map(ctx.tolerance()), {2, 3}, 4);
  LinearMap right = which == Comultiplication::zero ? maps::w_zero(eval) : maps::w_plus(eval);
  LinearMap left =
      which == Comultiplication::plus ? maps::w_plus_adjoint(eval) : maps::w_zero_adjoint(eval);
  LinearMap chain = compose(left, compose(inner_map, right));

  std::vector<LegSpec> codomain = domain;
  if (which == Comultiplication::link) {
    for (auto& l : codomain) l.kind = LegKind::integer;
  }
  SparseOperator out(domain, codomain);
  for (const auto& i : window_indices(domain)) {
    SparseVector col;
    for (auto& [j, c] : chain.column(i)) {
      if (hp::abs(c) > ctx.series_target()) col.emplace(j, std::move(c));
    }
    out.set_column(i, std::move(col));
  }
  return out;
}

long kernel_padding(const QContext& ctx, long order) {
  WorkingPrecision wp(ctx);
  Real steps = hp::log(ctx.series_target()) / (ctx.log_q() * Real(1 + std::abs(order)));
  return static_cast<long>(std::ceil(steps.to_double())) + 2;
}

// ---------------------------------------------------------------------------
// Corepresentation and coaction

ResidualValue verify_corepresentation(long l, const BasisIndex& sample, const BasisIndex& probe,
                                      KernelEvaluator& eval) {
  if (sample.size() != 5 || probe.size() != 5) {
    throw Error(ErrorKind::InvalidArgument, "sample and probe need five indices");
  }
  const long a = sample[0], b = sample[1], c = sample[2], d = sample[3], e = sample[4];
  const long u = probe[0], v = probe[1], w = probe[2], x = probe[3], y = probe[4];
  if (a < 0 || c < 0 || e < 0 || y < 0) {
    throw Error(ErrorKind::InvalidArgument, "N-leg indices must be >= 0");
  }
  const QContext& ctx = eval.context();
  WorkingPrecision wp(ctx);

  // Right side: sum_{m,r} P+(m,c,e) P+(r,a,m) e_{a-l-r-m, b-r+m, c-l-e-m, d+e-m, r}.
  // Only r = y and m = c-l-e-w can meet the probe.
  Real rhs(0);
  const long r = y;
  const long m = c - l - e - w;
  if (m >= 0 && a - l - r - m == u && b - r + m == v && d + e - m == x) {
    rhs = eval.plus(m, c, e) * eval.plus(r, a, m);
  }

  // Left side: sum_{p,m} P+(p,a,c) P+(m,p,e) xi0_{b+c-p, d-a+p, p-l-m-e, a-c+e-m} (x) e_m,
  // with <e_{u,v,w,x}, xi0_{R,S,P,T}> = P0(P,u,w) when u-w = T, v = R+P-w, x = S-P+u.
  // Each |P+(m,p,e) P0| <= 1, so the tail is bounded by that of |P+(p,a,c)|.
  Real lhs(0);
  const Real rho = hp::pow(ctx.q(), 1 + std::abs(a - c));
  Real tail(0);
  long terms = 0;
  for (long p = 0;; ++p) {
    const long R = b + c - p, S = d - a + p, P = p - l - y - e, T = a - c + e - y;
    if (u - w == T && v == R + P - w && x == S - P + u) {
      lhs += eval.plus(p, a, c) * eval.plus(y, p, e) * eval.zero(P, u, w);
    }
    ++terms;
    tail = eval.plus_bound(p + 1, a, c) / (Real(1) - rho);
    if (tail <= ctx.series_target() && p >= y) break;
  }
  return {lhs - rhs, std::move(tail), terms};
}

std::pair<LinearMap, LinearMap> corepresentation_maps(long l, KernelEvaluator& eval) {
  const std::vector<std::size_t> first_pair{0, 1, 2, 3};
  LinearMap g23 = embed(maps::g(l, eval), {2, 3, 4}, 5);
  LinearMap g13 = embed(maps::g(l, eval), {0, 1, 4}, 5);
  LinearMap lhs = compose(embed(maps::w_zero_adjoint(eval), first_pair, 5),
                          compose(g23, embed(maps::w_plus(eval), first_pair, 5)));
  LinearMap rhs = compose(g13, g23);
  return {lhs, rhs};
}

Real verify_coaction(PodlesElement x, const std::vector<LegSpec>& domain, KernelEvaluator& eval) {
  const QContext& ctx = eval.context();
  WorkingPrecision wp(ctx);
  if (domain.size() != 3) throw Error(ErrorKind::InvalidArgument, "coaction acts on three legs");
  const Real q2 = ctx.q() * ctx.q();
  const Complex one_q2(Real(1) + q2);

  // Exact algebra on l^2(N) (x) l^2(Z) (x) l^2(N).
  LinearMap a = maps::alpha(ctx), as = maps::alpha_adjoint(ctx);
  LinearMap c = maps::gamma(ctx), cs = maps::gamma_adjoint(ctx);
  LinearMap X = maps::podles_x(ctx), Y = maps::podles_y(ctx), Z = maps::podles_z(ctx);
  LinearMap id1 = identity_map(1), id2 = identity_map(2);
  LinearMap W = combine({{Complex(1), id1}, {-one_q2, Z}});  // 1 - (1+q^2) Z

  auto row = [&](const LinearMap& ux, const LinearMap& uw, const LinearMap& uy) {
    return combine({{Complex(1), tensor(ux, X)}, {Complex(1), tensor(uw, W)}, {Complex(1), tensor(uy, Y)}});
  };
  LinearMap ups_x = row(compose(a, a), combine({{Complex(-1), compose(cs, a)}}),
                        combine({{Complex(-ctx.q()), compose(cs, cs)}}));
  LinearMap ups_w = row(combine({{one_q2, compose(a, c)}}),
                        combine({{Complex(1), id2}, {-one_q2, compose(cs, c)}}),
                        combine({{one_q2, compose(cs, as)}}));
  LinearMap ups_y = row(combine({{Complex(-ctx.q()), compose(c, c)}}),
                        combine({{Complex(-1), compose(as, c)}}), compose(as, as));

  LinearMap target_x, expected;
  switch (x) {
    case PodlesElement::x: target_x = X; expected = ups_x; break;
    case PodlesElement::y: target_x = Y; expected = ups_y; break;
    case PodlesElement::one_minus_z: target_x = W; expected = ups_w; break;
    case PodlesElement::z:
      target_x = Z;
      // Upsilon(Z) = (1 (x) 1 - Upsilon(1 - (1+q^2) Z)) / (1+q^2)
      expected = combine({{Complex(1) / one_q2, identity_map(3)}, {Complex(-1) / one_q2, ups_w}});
      break;
  }

  // x materialized on a padded N window, as the implementation would see it.
  long max_c = 0;
  if (domain[2].hi > max_c) max_c = domain[2].hi;
  long pad = domain[0].hi + max_c + kernel_padding(ctx) + 2;
  SparseOperator xm = SparseOperator::materialize(target_x, {LegSpec::natural(pad)},
                                                  {LegSpec::natural(pad + 1)});
  LinearMap implemented =
      compose(maps::g_adjoint(0, eval), compose(embed(xm.as_map(ctx.tolerance()), {2}, 3), maps::g(0, eval)));

  Real worst(0);
  for (const auto& i : window_indices(domain)) {
    SparseVector lhs = implemented.column(i);
    SparseVector rhs = expected.column(i);
    worst = hp::max(worst, max_abs_diff(lhs, rhs));
  }
  return worst;
}

}  // namespace qerd
