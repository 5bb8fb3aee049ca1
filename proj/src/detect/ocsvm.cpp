#include "scdt/detect/ocsvm.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <stdexcept>

#include "scdt/log.hpp"

namespace scdt::detect {

void OcsvmParams::validate() const {
  if (!(nu > 0.0 && nu <= 1.0)) throw std::invalid_argument("ocsvm: nu must be in (0, 1]");
  if (!(gamma > 0.0)) throw std::invalid_argument("ocsvm: gamma must be > 0");
  if (!(tolerance > 0.0)) throw std::invalid_argument("ocsvm: tolerance must be > 0");
}

namespace {

constexpr double kTau = 1e-12;

Eigen::VectorXd kernel_column(const Eigen::ArrayXd& x, Eigen::Index i, double gamma) {
  return (-gamma * (x - x(i)).square()).exp().matrix();
}

// Least-recently-used store of kernel columns.
class ColumnCache {
 public:
  ColumnCache(const Eigen::ArrayXd& x, double gamma, std::size_t budget_bytes)
      : x_(x), gamma_(gamma), slot_of_(static_cast<std::size_t>(x.size()), -1) {
    const std::size_t per_column = sizeof(double) * static_cast<std::size_t>(x.size());
    capacity_ = std::max<std::size_t>(2, budget_bytes / std::max<std::size_t>(per_column, 1));
    capacity_ = std::min<std::size_t>(capacity_, static_cast<std::size_t>(x.size()));
  }

  const Eigen::VectorXd& column(Eigen::Index i) {
    auto& slot = slot_of_[static_cast<std::size_t>(i)];
    if (slot >= 0) {
      lru_.splice(lru_.begin(), lru_, entries_[static_cast<std::size_t>(slot)].where);
      return entries_[static_cast<std::size_t>(slot)].values;
    }
    std::size_t target;
    if (entries_.size() < capacity_) {
      target = entries_.size();
      entries_.push_back({});
    } else {
      target = lru_.back();
      lru_.pop_back();
      slot_of_[static_cast<std::size_t>(entries_[target].owner)] = -1;
    }
    auto& e = entries_[target];
    e.owner = i;
    e.values = kernel_column(x_, i, gamma_);
    lru_.push_front(target);
    e.where = lru_.begin();
    slot = static_cast<long>(target);
    return e.values;
  }

 private:
  struct Entry {
    Eigen::Index owner = -1;
    Eigen::VectorXd values;
    std::list<std::size_t>::iterator where;
  };
  const Eigen::ArrayXd& x_;
  double gamma_;
  std::size_t capacity_ = 2;
  std::vector<long> slot_of_;
  std::vector<Entry> entries_;
  std::list<std::size_t> lru_;
};

Eigen::VectorXd full_gradient(const Eigen::ArrayXd& x, const Eigen::VectorXd& alpha, double gamma) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(alpha.size());
  for (Eigen::Index k = 0; k < alpha.size(); ++k)
    if (alpha(k) != 0.0) g += alpha(k) * kernel_column(x, k, gamma);
  return g;
}

Eigen::ArrayXd as_array(std::span<const double> x) {
  return Eigen::Map<const Eigen::ArrayXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

double offset(const Eigen::VectorXd& alpha, const Eigen::VectorXd& g, double bound) {
  double ub = std::numeric_limits<double>::infinity();
  double lb = -ub;
  double sum_free = 0.0;
  long free = 0;
  for (Eigen::Index k = 0; k < alpha.size(); ++k) {
    if (alpha(k) >= bound) lb = std::max(lb, g(k));
    else if (alpha(k) <= 0.0) ub = std::min(ub, g(k));
    else {
      sum_free += g(k);
      ++free;
    }
  }
  return free > 0 ? sum_free / static_cast<double>(free) : 0.5 * (ub + lb);
}

double pair_gap(const Eigen::VectorXd& alpha, const Eigen::VectorXd& g, double bound) {
  double up = -std::numeric_limits<double>::infinity();   // max -G over alpha < C
  double low = -std::numeric_limits<double>::infinity();  // max G over alpha > 0
  for (Eigen::Index k = 0; k < alpha.size(); ++k) {
    if (alpha(k) < bound) up = std::max(up, -g(k));
    if (alpha(k) > 0.0) low = std::max(low, g(k));
  }
  return up + low;
}

// Solves the equality-constrained subproblem on the free variables with the
// bounded ones held fixed. Returns false if the result leaves the box or
// does not improve the optimality gap.
bool polish_free_set(const Eigen::ArrayXd& x, Eigen::VectorXd& alpha, Eigen::VectorXd& g,
                     double bound, double gamma, std::size_t max_free) {
  std::vector<Eigen::Index> free;
  for (Eigen::Index k = 0; k < alpha.size(); ++k)
    if (alpha(k) > 0.0 && alpha(k) < bound) free.push_back(k);
  const auto m = static_cast<Eigen::Index>(free.size());
  if (m == 0 || free.size() > max_free) return false;

  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + 1, m + 1);
  Eigen::VectorXd rhs(m + 1);
  Eigen::VectorXd af(m);
  double free_mass = 0.0;
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) kkt(a, b) = rbf(x(free[a]), x(free[b]), gamma);
    kkt(a, m) = -1.0;
    kkt(m, a) = 1.0;
    af(a) = alpha(free[a]);
    free_mass += af(a);
  }
  // K_FF a_F - rho = -K_FB a_B, and K_FB a_B = G_F - K_FF a_F
  const Eigen::MatrixXd qff = kkt.topLeftCorner(m, m);
  for (Eigen::Index a = 0; a < m; ++a) rhs(a) = qff.row(a).dot(af) - g(free[a]);
  rhs(m) = free_mass;

  const Eigen::VectorXd sol = kkt.partialPivLu().solve(rhs);
  if (!sol.allFinite()) return false;
  const double slack = 1e-12 * bound;
  for (Eigen::Index a = 0; a < m; ++a)
    if (sol(a) < -slack || sol(a) > bound + slack) return false;

  Eigen::VectorXd next = alpha;
  for (Eigen::Index a = 0; a < m; ++a) next(free[a]) = std::clamp(sol(a), 0.0, bound);
  Eigen::VectorXd next_g = g;
  for (Eigen::Index a = 0; a < m; ++a) {
    const double d = next(free[a]) - alpha(free[a]);
    if (d != 0.0) next_g += d * kernel_column(x, free[a], gamma);
  }
  if (pair_gap(next, next_g, bound) > pair_gap(alpha, g, bound)) return false;
  alpha = std::move(next);
  g = std::move(next_g);
  return true;
}

}  // namespace

OcsvmSolution ocsvm_solve(std::span<const double> points, const OcsvmParams& params) {
  params.validate();
  const std::size_t n = points.size();
  if (n < 2) throw std::invalid_argument("ocsvm: need at least two training points");
  for (double v : points)
    if (!std::isfinite(v)) throw std::invalid_argument("ocsvm: non-finite training point");
  const Eigen::ArrayXd x = as_array(points);
  const auto size = static_cast<Eigen::Index>(n);

  // Work in the scaled form 0 <= b_i <= 1, sum b = nu n; alpha = b / (nu n).
  const double scale = params.nu * static_cast<double>(n);
  const double c = 1.0;
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(size);
  const auto full = static_cast<Eigen::Index>(std::floor(scale + 1e-9));
  for (Eigen::Index k = 0; k < std::min(full, size); ++k) alpha(k) = c;
  if (full < size) alpha(full) = std::max(0.0, scale - static_cast<double>(full));
  Eigen::VectorXd g = full_gradient(x, alpha, params.gamma);
  ColumnCache cache(x, params.gamma, params.cache_bytes);

  OcsvmSolution s;
  const long cap = static_cast<long>(std::min(params.iteration_factor * static_cast<double>(n), 9e18));
  while (s.iterations < cap) {
    double gmax = -std::numeric_limits<double>::infinity();
    Eigen::Index i = -1;
    for (Eigen::Index t = 0; t < size; ++t)
      if (alpha(t) < c && -g(t) > gmax) {
        gmax = -g(t);
        i = t;
      }
    double gmax2 = -std::numeric_limits<double>::infinity();
    Eigen::Index j = -1;
    double best = std::numeric_limits<double>::infinity();
    const Eigen::VectorXd* qi = i >= 0 ? &cache.column(i) : nullptr;
    for (Eigen::Index t = 0; t < size; ++t) {
      if (!(alpha(t) > 0.0)) continue;
      gmax2 = std::max(gmax2, g(t));
      const double b = gmax + g(t);
      if (qi != nullptr && b > 0.0) {
        double a = 2.0 - 2.0 * (*qi)(t);
        if (a <= 0.0) a = kTau;
        const double obj = -(b * b) / a;
        if (obj < best) {
          best = obj;
          j = t;
        }
      }
    }
    s.gap = gmax + gmax2;
    if (s.gap < params.tolerance || i < 0 || j < 0) {
      s.converged = true;
      break;
    }
    ++s.iterations;

    const Eigen::VectorXd col_i = *qi;  // the next lookup may evict it
    const Eigen::VectorXd& col_j = cache.column(j);
    double quad = 2.0 - 2.0 * col_i(j);
    if (quad <= 0.0) quad = kTau;
    const double delta = (g(i) - g(j)) / quad;
    const double old_i = alpha(i), old_j = alpha(j);
    const double sum = old_i + old_j;
    double ai = old_i - delta, aj = old_j + delta;
    if (sum > c) {
      if (ai > c) { ai = c; aj = sum - c; }
    } else {
      if (aj < 0) { aj = 0; ai = sum; }
    }
    if (sum > c) {
      if (aj > c) { aj = c; ai = sum - c; }
    } else {
      if (ai < 0) { ai = 0; aj = sum; }
    }
    alpha(i) = ai;
    alpha(j) = aj;
    g += (ai - old_i) * col_i + (aj - old_j) * col_j;
  }

  if (params.polish && polish_free_set(x, alpha, g, c, params.gamma, params.max_polish))
    s.gap = pair_gap(alpha, g, c);
  s.rho = offset(alpha, g, c) / scale;
  s.alpha = alpha / scale;
  s.bound = c / scale;
  return s;
}

double kkt_violation(std::span<const double> x, const Eigen::VectorXd& alpha, double rho,
                     double gamma, double bound) {
  const Eigen::VectorXd g = full_gradient(as_array(x), alpha, gamma);
  double worst = std::abs(alpha.sum() - 1.0);
  for (Eigen::Index k = 0; k < alpha.size(); ++k) {
    const double f = g(k) - rho;
    worst = std::max(worst, std::max(-alpha(k), alpha(k) - bound));
    if (alpha(k) <= 0.0) worst = std::max(worst, -f);
    else if (alpha(k) >= bound) worst = std::max(worst, f);
    else worst = std::max(worst, std::abs(f));
  }
  return worst;
}

double OcsvmModel::decision(double x) const {
  double f = 0.0;
  for (Eigen::Index k = 0; k < support.size(); ++k) f += alpha(k) * rbf(support(k), x, gamma);
  return f - rho;
}

OcsvmModel ocsvm_fit(std::span<const double> x, const OcsvmParams& params) {
  const auto s = ocsvm_solve(x, params);
  if (!s.converged)
    log_warning("ocsvm: iteration cap reached, best pair gap " + std::to_string(s.gap));
  OcsvmModel m;
  m.nu = params.nu;
  m.gamma = params.gamma;
  m.rho = s.rho;
  m.iterations = s.iterations;
  m.gap = s.gap;
  m.converged = s.converged;
  std::vector<double> sv, a;
  for (Eigen::Index k = 0; k < s.alpha.size(); ++k)
    if (s.alpha(k) > 0.0) {
      sv.push_back(x[static_cast<std::size_t>(k)]);
      a.push_back(s.alpha(k));
    }
  m.support = Eigen::Map<Eigen::VectorXd>(sv.data(), static_cast<Eigen::Index>(sv.size()));
  m.alpha = Eigen::Map<Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()));
  return m;
}

nlohmann::json to_json(const OcsvmModel& m) {
  return {{"nu", m.nu},
          {"gamma", m.gamma},
          {"rho", m.rho},
          {"support_vectors", std::vector<double>(m.support.data(), m.support.data() + m.support.size())},
          {"alpha", std::vector<double>(m.alpha.data(), m.alpha.data() + m.alpha.size())},
          {"iterations", m.iterations},
          {"gap", m.gap},
          {"converged", m.converged}};
}

OcsvmModel ocsvm_from_json(const nlohmann::json& j) {
  OcsvmModel m;
  m.nu = j.at("nu").get<double>();
  m.gamma = j.at("gamma").get<double>();
  m.rho = j.at("rho").get<double>();
  auto sv = j.at("support_vectors").get<std::vector<double>>();
  auto a = j.at("alpha").get<std::vector<double>>();
  if (sv.size() != a.size()) throw std::runtime_error("ocsvm: support/alpha length mismatch");
  m.support = Eigen::Map<Eigen::VectorXd>(sv.data(), static_cast<Eigen::Index>(sv.size()));
  m.alpha = Eigen::Map<Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()));
  m.iterations = j.value("iterations", 0L);
  m.gap = j.value("gap", 0.0);
  m.converged = j.value("converged", true);
  return m;
}

Eigen::VectorXd project_capped_simplex(const Eigen::VectorXd& v, double bound, double total) {
  auto mass = [&](double tau) { return (v.array() - tau).cwiseMax(0.0).cwiseMin(bound).sum(); };
  double lo = v.minCoeff() - bound - 1.0;  // mass(lo) = n * bound >= total
  double hi = v.maxCoeff();                // mass(hi) = 0
  for (int k = 0; k < 200 && hi - lo > 0.0; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (mass(mid) > total ? lo : hi) = mid;
  }
  const double tau = 0.5 * (lo + hi);
  return (v.array() - tau).cwiseMax(0.0).cwiseMin(bound).matrix();
}

Eigen::VectorXd qp_reference(std::span<const double> x, double nu, double gamma, int iterations) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) k(a, b) = rbf(x[static_cast<std::size_t>(a)], x[static_cast<std::size_t>(b)], gamma);
  const double lipschitz = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(k).eigenvalues().maxCoeff();
  const double bound = 1.0 / (nu * static_cast<double>(n));

  Eigen::VectorXd a = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  Eigen::VectorXd y = a;
  double t = 1.0;
  auto objective = [&](const Eigen::VectorXd& z) { return 0.5 * z.dot(k * z); };
  double last = objective(a);
  for (int it = 0; it < iterations; ++it) {
    const Eigen::VectorXd next = project_capped_simplex(y - (k * y) / lipschitz, bound);
    const double value = objective(next);
    if (value > last) {  // restart momentum
      t = 1.0;
      y = a;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = next + ((t - 1.0) / t_next) * (next - a);
    a = next;
    t = t_next;
    last = value;
  }
  return a;
}

}  // namespace scdt::detect
