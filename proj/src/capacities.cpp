#include "rgdist/capacities.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "quadrature.hpp"
#include "rgdist/simd/kernels.hpp"

namespace rgdist {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double pareto_xmin(const SurvivalModel::Pareto& p) { return std::pow(p.c, 1.0 / (p.tau - 1.0)); }

double poisson_pmf(std::size_t n, double rate) {
  if (rate <= 0.0) return n == 0 ? 1.0 : 0.0;
  const double nn = static_cast<double>(n);
  return std::exp(nn * std::log(rate) - rate - std::lgamma(nn + 1.0));
}

// P(Poi(rate) > n).
double poisson_tail(std::size_t n, double rate) {
  if (rate <= 0.0) return 0.0;
  return boost::math::gamma_p(static_cast<double>(n) + 1.0, rate);
}

// Atoms and masses of a discrete model (constant or table).
std::pair<std::vector<double>, std::vector<double>> discrete_atoms(const SurvivalModel& m) {
  std::vector<double> xs;
  std::vector<double> ws;
  std::visit(overloaded{
                 [&](const SurvivalModel::Constant& c) {
                   xs.push_back(c.lambda);
                   ws.push_back(1.0);
                 },
                 [&](const SurvivalModel::Table& t) {
                   for (std::size_t k = 1; k < t.points.size(); ++k) {
                     const double mass = t.points[k - 1].second - t.points[k].second;
                     if (mass > 0.0) {
                       xs.push_back(t.points[k].first);
                       ws.push_back(mass);
                     }
                   }
                 },
                 [&](const SurvivalModel::Pareto&) {},
             },
             m.variant());
  return {xs, ws};
}

// ∫_s^t F̄(x) dx for s at or beyond every breakpoint of the model, where F̄ is
// either 0 or the pure power tail.
double tail_survival_integral(const SurvivalModel& m, double s, double t) {
  if (const auto* p = std::get_if<SurvivalModel::Pareto>(&m.variant())) {
    const double e = 2.0 - p->tau;
    const double hi = std::isinf(t) ? 0.0 : std::pow(t, e);
    return p->c * (std::pow(s, e) - hi) / (p->tau - 2.0);
  }
  return 0.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// SurvivalModel

SurvivalModel SurvivalModel::pareto(double tau, double c) {
  if (!(tau > 3.0) || !std::isfinite(tau))
    throw std::invalid_argument("pareto model requires tau > 3");
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("pareto model requires c > 0");
  return SurvivalModel(Pareto{tau, c});
}

SurvivalModel SurvivalModel::constant(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("constant model requires lambda > 0");
  return SurvivalModel(Constant{lambda});
}

SurvivalModel SurvivalModel::table(std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) throw std::invalid_argument("table model needs at least two points");
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto [x, s] = points[k];
    if (!std::isfinite(x) || x < 0.0) throw std::invalid_argument("table x must be >= 0");
    if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("table survival values must be in [0,1]");
    if (k > 0) {
      if (!(x > points[k - 1].first)) throw std::invalid_argument("table x must be increasing");
      if (s > points[k - 1].second)
        throw std::invalid_argument("table survival values must be non-increasing");
    }
  }
  if (points.front().second != 1.0)
    throw std::invalid_argument("table survival at the smallest x must equal 1");
  if (points.back().second != 0.0)
    throw std::invalid_argument("table survival must reach 0 at the largest x");
  return SurvivalModel(Table{std::move(points)});
}

SurvivalModel SurvivalModel::figure1() {
  constexpr double kSupportMin = 0.7437937;
  constexpr double kTau = 3.5;
  return pareto(kTau, std::pow(kSupportMin, kTau - 1.0));
}

double SurvivalModel::survival(double x) const noexcept {
  return std::visit(overloaded{
                        [&](const Pareto& p) {
                          if (x <= 0.0) return 1.0;
                          return std::min(1.0, p.c * std::pow(x, 1.0 - p.tau));
                        },
                        [&](const Constant& c) { return x < c.lambda ? 1.0 : 0.0; },
                        [&](const Table& t) {
                          double s = 1.0;
                          for (const auto& [px, ps] : t.points) {
                            if (px > x) break;
                            s = ps;
                          }
                          return s;
                        },
                    },
                    v_);
}

double SurvivalModel::inverse_survival(double u) const {
  if (!(u > 0.0 && u <= 1.0))
    throw std::domain_error("inverse_survival: u must lie in (0, 1]");
  return std::visit(overloaded{
                        [&](const Pareto& p) {
                          return std::max(pareto_xmin(p), std::pow(p.c / u, 1.0 / (p.tau - 1.0)));
                        },
                        [&](const Constant& c) { return c.lambda; },
                        [&](const Table& t) {
                          // At u = 1 the infimum is the smallest atom, not the
                          // first table abscissa.
                          for (std::size_t k = 1; k < t.points.size(); ++k) {
                            const bool atom = t.points[k].second < t.points[k - 1].second;
                            if (t.points[k].second <= u && (u < 1.0 || atom))
                              return t.points[k].first;
                          }
                          return t.points.back().first;
                        },
                    },
                    v_);
}

double SurvivalModel::mean() const noexcept {
  if (const auto* p = std::get_if<Pareto>(&v_))
    return pareto_xmin(*p) * (p->tau - 1.0) / (p->tau - 2.0);
  const auto [xs, ws] = discrete_atoms(*this);
  return std::inner_product(xs.begin(), xs.end(), ws.begin(), 0.0);
}

double SurvivalModel::second_moment() const noexcept {
  if (const auto* p = std::get_if<Pareto>(&v_)) {
    const double xm = pareto_xmin(*p);
    return xm * xm * (p->tau - 1.0) / (p->tau - 3.0);
  }
  const auto [xs, ws] = discrete_atoms(*this);
  double s = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) s += ws[k] * xs[k] * xs[k];
  return s;
}

double SurvivalModel::support_min() const noexcept { return inverse_survival(1.0); }

std::vector<double> SurvivalModel::x_breakpoints() const {
  return std::visit(overloaded{
                        [](const Pareto& p) { return std::vector<double>{pareto_xmin(p)}; },
                        [](const Constant& c) { return std::vector<double>{c.lambda}; },
                        [](const Table& t) {
                          std::vector<double> xs;
                          for (const auto& pt : t.points) xs.push_back(pt.first);
                          return xs;
                        },
                    },
                    v_);
}

std::vector<double> SurvivalModel::u_breakpoints() const {
  std::vector<double> us;
  if (const auto* t = std::get_if<Table>(&v_)) {
    for (const auto& [px, ps] : t->points)
      if (ps > 0.0 && ps < 1.0) us.push_back(ps);
    std::sort(us.begin(), us.end());
    us.erase(std::unique(us.begin(), us.end()), us.end());
  }
  return us;
}

std::string SurvivalModel::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const Pareto& p) { os << "pareto(tau=" << p.tau << ",c=" << p.c << ")"; },
                 [&](const Constant& c) { os << "constant(lambda=" << c.lambda << ")"; },
                 [&](const Table& t) { os << "table(" << t.points.size() << " points)"; },
             },
             v_);
  return os.str();
}

// ---------------------------------------------------------------------------
// AliasTable (Vose)

AliasTable::AliasTable(std::span<const double> weights) {
  const std::size_t n = weights.size();
  if (n == 0) throw std::invalid_argument("AliasTable: empty weights");
  if (n > std::numeric_limits<std::uint32_t>::max())
    throw std::invalid_argument("AliasTable: too many atoms");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("AliasTable: weights must have positive sum");

  prob_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small;
  std::vector<std::uint32_t> large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = weights[i] * static_cast<double>(n) / total;
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (auto l : large) {
    prob_[l] = 1.0;
    alias_[l] = l;
  }
  for (auto s : small) {
    prob_[s] = 1.0;
    alias_[s] = s;
  }
}

std::size_t AliasTable::sample(Engine& g) const noexcept {
  const double u = uniform01(g) * static_cast<double>(prob_.size());
  const auto i = std::min(static_cast<std::size_t>(u), prob_.size() - 1);
  const double frac = u - static_cast<double>(i);
  return frac < prob_[i] ? i : alias_[i];
}

// ---------------------------------------------------------------------------
// CapacitySequence, laws

CapacitySequence::CapacitySequence(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("capacity sequence must be non-empty");
  for (double v : values_)
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("capacities must be positive and finite");
  const auto s = simd::sum_and_sum_sq(values_);
  l_ = s.sum;
  sum_sq_ = s.sum_sq;
  mu_ = l_ / static_cast<double>(values_.size());
  nu_ = sum_sq_ / l_;
  max_ = *std::max_element(values_.begin(), values_.end());
}

double MixedPoissonLaw::truncated_mean() const noexcept {
  double m = 0.0;
  for (std::size_t n = 0; n < pmf.size(); ++n) m += static_cast<double>(n) * pmf[n];
  return m;
}

MixedPoissonLaw MixedPoissonLaw::poisson(double rate, std::size_t n_max) {
  MixedPoissonLaw law;
  law.pmf.resize(n_max + 1);
  for (std::size_t n = 0; n <= n_max; ++n) law.pmf[n] = poisson_pmf(n, rate);
  law.tail_mass = poisson_tail(n_max, rate);
  return law;
}

MixedPoissonLaw MixedPoissonLaw::point_mass(std::size_t k, std::size_t n_max) {
  MixedPoissonLaw law;
  law.pmf.assign(n_max + 1, 0.0);
  if (k <= n_max)
    law.pmf[k] = 1.0;
  else
    law.tail_mass = 1.0;
  return law;
}

MixingLaw::MixingLaw(std::vector<double> atoms, std::vector<double> weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (atoms_.empty() || atoms_.size() != weights_.size())
    throw std::invalid_argument("mixing law: atoms and weights must be non-empty and equal length");
  double total = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (!(atoms_[i] > 0.0)) throw std::invalid_argument("mixing law: atoms must be positive");
    if (!(weights_[i] >= 0.0)) throw std::invalid_argument("mixing law: weights must be >= 0");
    total += weights_[i];
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("mixing law: weights must sum to 1");
  alias_ = AliasTable(weights_);
}

double MixingLaw::mean() const noexcept {
  return std::inner_product(atoms_.begin(), atoms_.end(), weights_.begin(), 0.0);
}

// ---------------------------------------------------------------------------
// Operations

double inverse_survival(const SurvivalModel& model, double u) {
  return model.inverse_survival(u);
}

CapacitySequence deterministic_capacities(const SurvivalModel& model, std::size_t n) {
  if (n == 0) throw std::invalid_argument("deterministic_capacities: N must be >= 1");
  std::vector<double> v(n);
  const double nn = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = model.inverse_survival(static_cast<double>(i + 1) / nn);
  return CapacitySequence(std::move(v));
}

CapacitySequence iid_capacities(const SurvivalModel& model, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("iid_capacities: N must be >= 1");
  Engine g = make_engine(seed, {0x1ca9ULL});
  std::vector<double> v(n);
  for (auto& x : v) x = model.inverse_survival(uniform_open(g));
  return CapacitySequence(std::move(v));
}

Moments moments(std::span<const double> values) {
  if (values.empty()) throw std::domain_error("moments: empty sequence");
  const auto s = simd::sum_and_sum_sq(values);
  return {s.sum, s.sum / static_cast<double>(values.size()), s.sum_sq / s.sum};
}

Moments moments(const CapacitySequence& seq) { return {seq.total(), seq.mean(), seq.nu()}; }

MixingLaw mark_law(const CapacitySequence& seq) {
  std::vector<double> atoms(seq.values().begin(), seq.values().end());
  std::vector<double> w(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) w[i] = atoms[i] / seq.total();
  return MixingLaw(std::move(atoms), std::move(w));
}

std::size_t adaptive_n_max(double rate, double tol) {
  auto n = static_cast<std::size_t>(std::floor(rate));
  while (poisson_tail(n, rate) >= tol) n += 1 + n / 64;
  return n;
}

OffspringPair offspring_laws(const CapacitySequence& seq, std::size_t n_max, double ceiling) {
  const std::size_t len = n_max + 1;
  std::vector<double> f(len, 0.0);
  std::vector<double> lf(len, 0.0);
  simd::poisson_mixture_accumulate(seq.values(), f, lf);

  const double inv_n = 1.0 / static_cast<double>(seq.size());
  const double inv_l = 1.0 / seq.total();
  double tail_f = 0.0;
  double tail_g = 0.0;
  for (double lam : seq.values()) {
    const double t = poisson_tail(n_max, lam);
    tail_f += t;
    tail_g += lam * t;
  }
  OffspringPair out;
  out.f.pmf.resize(len);
  out.g.pmf.resize(len);
  for (std::size_t n = 0; n < len; ++n) {
    out.f.pmf[n] = f[n] * inv_n;
    out.g.pmf[n] = lf[n] * inv_l;
  }
  out.f.tail_mass = tail_f * inv_n;
  out.g.tail_mass = tail_g * inv_l;
  const double worst = std::max(out.f.tail_mass, out.g.tail_mass);
  if (worst > ceiling) {
    throw TruncationError("offspring_laws: tail mass " + std::to_string(worst) +
                              " exceeds ceiling at n_max=" + std::to_string(n_max) +
                              "; raise n_max",
                          worst);
  }
  return out;
}

OffspringPair offspring_laws(const CapacitySequence& seq) {
  // g is size-biased, so its tail sits one step further out than f's.
  return offspring_laws(seq, adaptive_n_max(seq.max(), kDefaultTailCeiling * 1e-2) + 1);
}

OffspringPair limit_offspring_laws(const SurvivalModel& model, std::size_t n_max) {
  OffspringPair out;
  const std::size_t len = n_max + 1;
  out.f.pmf.assign(len, 0.0);
  out.g.pmf.assign(len, 0.0);
  const double mu = model.mean();

  if (const auto* p = std::get_if<SurvivalModel::Pareto>(&model.variant())) {
    // Density (τ-1) c x^{-τ} on [x_min, ∞). Every Poisson weight up to n_max+1
    // is negligible beyond x_hi, so the integrals run over [x_min, x_hi] in
    // pieces around each peak, and the tails past x_hi are added in closed form.
    constexpr double kTol = 1e-10;
    const double x_min = model.support_min();
    const double nm = static_cast<double>(n_max);
    const double x_hi = std::max(x_min, nm + 40.0 + 12.0 * std::sqrt(nm + 1.0));
    auto density = [&](double x) { return (p->tau - 1.0) * p->c * std::pow(x, -p->tau); };
    auto integrate = [&](const std::function<double(double)>& h, double centre) {
      const double s = std::sqrt(centre + 1.0);
      std::vector<double> cuts{x_min, x_hi};
      for (double k : {-10.0, -3.0, 0.0, 3.0, 10.0}) {
        const double c = centre + k * s;
        if (c > x_min && c < x_hi) cuts.push_back(c);
      }
      std::sort(cuts.begin(), cuts.end());
      double total = 0.0;
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += detail::integrate_kronrod([&](double x) { return h(x) * density(x); }, cuts[i],
                                           cuts[i + 1], kTol);
      return total;
    };
    std::vector<double> f_ext(len + 1);
    for (std::size_t n = 0; n <= len; ++n)
      f_ext[n] = integrate([&](double x) { return poisson_pmf(n, x); }, static_cast<double>(n));
    for (std::size_t n = 0; n < len; ++n) {
      out.f.pmf[n] = f_ext[n];
      out.g.pmf[n] = static_cast<double>(n + 1) * f_ext[n + 1] / mu;
    }
    // ∫_{x_hi}^∞ dF and ∫_{x_hi}^∞ x dF.
    const double far0 = model.survival(x_hi);
    const double far1 = (p->tau - 1.0) / (p->tau - 2.0) * p->c * std::pow(x_hi, 2.0 - p->tau);
    out.f.tail_mass = integrate([&](double x) { return poisson_tail(n_max, x); }, nm) + far0;
    out.g.tail_mass =
        (integrate([&](double x) { return x * poisson_tail(n_max, x); }, nm) + far1) / mu;
    return out;
  }

  const auto [xs, ws] = discrete_atoms(model);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    for (std::size_t n = 0; n < len; ++n) {
      const double p = ws[k] * poisson_pmf(n, xs[k]);
      out.f.pmf[n] += p;
      out.g.pmf[n] += xs[k] * p / mu;
    }
    const double t = ws[k] * poisson_tail(n_max, xs[k]);
    out.f.tail_mass += t;
    out.g.tail_mass += xs[k] * t / mu;
  }
  return out;
}

MixingLaw size_bias(const MixingLaw& law) {
  double denom = 0.0;
  for (std::size_t i = 0; i < law.size(); ++i) denom += law.weights()[i] * law.atoms()[i];
  if (!(denom > 0.0)) throw std::domain_error("size_bias: weighted mean must be positive");
  std::vector<double> atoms(law.atoms().begin(), law.atoms().end());
  std::vector<double> w(law.size());
  for (std::size_t i = 0; i < law.size(); ++i) w[i] = law.weights()[i] * atoms[i] / denom;
  return MixingLaw(std::move(atoms), std::move(w));
}

double total_variation(const MixedPoissonLaw& p, const MixedPoissonLaw& q) {
  const std::size_t len = std::max(p.pmf.size(), q.pmf.size());
  std::vector<double> a(len, 0.0);
  std::vector<double> b(len, 0.0);
  std::copy(p.pmf.begin(), p.pmf.end(), a.begin());
  std::copy(q.pmf.begin(), q.pmf.end(), b.begin());
  const double s = simd::abs_diff_sum(a, b) + std::abs(p.tail_mass - q.tail_mass);
  return std::min(1.0, 0.5 * s);
}

void ConditionConfig::validate() const {
  if (!(tau > 3.0)) throw std::invalid_argument("condition config: tau must exceed 3");
  if (!(epsilon > 0.0)) throw std::invalid_argument("condition config: epsilon must be positive");
  if (!(gamma() < 0.5))
    throw std::invalid_argument("condition config: gamma = 1/(tau-1) + epsilon must be < 1/2");
}

ConditionConfig ConditionConfig::for_model(const SurvivalModel& model, double tau, double epsilon,
                                           std::size_t n_max) {
  ConditionConfig cfg;
  cfg.tau = tau;
  cfg.epsilon = epsilon;
  cfg.mu = model.mean();
  cfg.nu = model.nu();
  auto laws = limit_offspring_laws(model, n_max);
  cfg.f = std::move(laws.f);
  cfg.g = std::move(laws.g);
  cfg.validate();
  return cfg;
}

ConditionReport check_conditions(const CapacitySequence& seq, const ConditionConfig& cfg,
                                 std::size_t n_max) {
  cfg.validate();
  const auto laws = offspring_laws(seq, n_max);
  ConditionReport r;
  r.mu_gap = std::abs(seq.mean() - cfg.mu);
  r.nu_gap = std::abs(seq.nu() - cfg.nu);
  r.f_tv = total_variation(laws.f, cfg.f);
  r.g_tv = total_variation(laws.g, cfg.g);
  r.moment_stat = s_nq(seq, cfg.tau - 1.0 - cfg.epsilon);
  r.max_lambda = seq.max();
  r.max_bound = std::pow(static_cast<double>(seq.size()), cfg.gamma());
  r.pass = r.max_lambda <= r.max_bound &&
           (!cfg.moment_bound || r.moment_stat <= *cfg.moment_bound);
  return r;
}

double s_nq(const CapacitySequence& seq, double q) {
  if (!(q > 0.0)) throw std::domain_error("s_nq: q must be positive");
  double s = 0.0;
  for (double v : seq.values()) s += std::pow(v, q);
  return s / static_cast<double>(seq.size());
}

QuantileDistance integrated_quantile_distance(const SurvivalModel& g, const SurvivalModel& h) {
  QuantileDistance out{};

  // ∫_0^1 |Ḡ^{-1} - H̄^{-1}| du, split where either quantile function jumps.
  std::vector<double> ucuts{0.0, 1.0};
  for (double u : g.u_breakpoints()) ucuts.push_back(u);
  for (double u : h.u_breakpoints()) ucuts.push_back(u);
  std::sort(ucuts.begin(), ucuts.end());
  ucuts.erase(std::unique(ucuts.begin(), ucuts.end()), ucuts.end());
  auto du = [&](double u) {
    u = std::min(u, 1.0);
    if (u <= 0.0) u = std::numeric_limits<double>::min();
    return g.inverse_survival(u) - h.inverse_survival(u);
  };
  for (std::size_t i = 0; i + 1 < ucuts.size(); ++i)
    out.via_quantiles += detail::integrate_abs(du, ucuts[i], ucuts[i + 1]);

  // ∫_0^∞ |Ḡ - H̄| dx: quadrature up to the last breakpoint, closed form beyond.
  std::vector<double> xcuts{0.0};
  for (double x : g.x_breakpoints()) xcuts.push_back(x);
  for (double x : h.x_breakpoints()) xcuts.push_back(x);
  std::sort(xcuts.begin(), xcuts.end());
  xcuts.erase(std::unique(xcuts.begin(), xcuts.end()), xcuts.end());
  auto dx = [&](double x) { return g.survival(x) - h.survival(x); };
  for (std::size_t i = 0; i + 1 < xcuts.size(); ++i)
    out.via_survivals += detail::integrate_abs(dx, xcuts[i], xcuts[i + 1]);

  const double last = xcuts.back();
  const auto* pg = std::get_if<SurvivalModel::Pareto>(&g.variant());
  const auto* ph = std::get_if<SurvivalModel::Pareto>(&h.variant());
  std::vector<double> tail_cuts{last};
  if (pg && ph && pg->tau != ph->tau) {
    // c_g x^{1-tau_g} = c_h x^{1-tau_h}
    const double cross = std::pow(pg->c / ph->c, 1.0 / (pg->tau - ph->tau));
    if (cross > last && std::isfinite(cross)) tail_cuts.push_back(cross);
  }
  tail_cuts.push_back(std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i + 1 < tail_cuts.size(); ++i) {
    const double s = tail_cuts[i];
    const double t = tail_cuts[i + 1];
    out.via_survivals += std::abs(tail_survival_integral(g, s, t) - tail_survival_integral(h, s, t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV

void write_capacities_csv(std::ostream& out, const CapacitySequence& seq) {
  out << "index,lambda\n";
  char buf[64];
  for (std::size_t i = 0; i < seq.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i + 1, seq[i]);
    out << buf;
  }
}

CapacitySequence read_capacities_csv(std::istream& in) {
  std::string line;
  do {
    if (!std::getline(in, line)) throw std::invalid_argument("capacity CSV: missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
  } while (!line.empty() && line.front() == '#');
  if (line != "index,lambda")
    throw std::invalid_argument("capacity CSV: header must be 'index,lambda'");
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("capacity CSV: malformed row");
    std::size_t used = 0;
    const auto idx = std::stoull(line.substr(0, comma), &used);
    if (idx != values.size() + 1)
      throw std::invalid_argument("capacity CSV: indices must run 1..N in order");
    const std::string rest = line.substr(comma + 1);
    const double v = std::stod(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("capacity CSV: malformed lambda");
    values.push_back(v);
  }
  return CapacitySequence(std::move(values));
}

}  // namespace rgdist
