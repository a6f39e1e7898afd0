#include "rsdesign/region.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace rsdesign {

namespace {

// Sum of exponents, or -1 when any exponent is odd (mean is then zero).
int even_degree(const std::vector<int>& exponents) {
  int total = 0;
  for (int e : exponents) {
    if (e % 2 != 0) return -1;
    total += e;
  }
  return total;
}

// E[prod u_i^e_i] for u uniform on the unit sphere S^{q-1}, all e_i even:
//   prod Gamma((e_i+1)/2) / Gamma(1/2)^q * Gamma(q/2) / Gamma((q+|e|)/2)
double unit_sphere_mean(int q, const std::vector<int>& exponents, int degree) {
  double log_m = std::lgamma(0.5 * q) - std::lgamma(0.5 * (q + degree));
  const double log_half = std::lgamma(0.5);
  for (int e : exponents) log_m += std::lgamma(0.5 * (e + 1)) - log_half;
  return std::exp(log_m);
}

std::vector<int> product_exponents(const ModelSpec& model, int a, int b) {
  std::vector<int> e(model.factors());
  const Term& ta = model.terms()[a];
  const Term& tb = model.terms()[b];
  for (int i = 0; i < model.factors(); ++i) e[i] = ta.exponent(i) + tb.exponent(i);
  return e;
}

template <class MonomialMean>
MomentMatrix fill_moments(const ModelSpec& model, MonomialMean&& mean) {
  const int p = model.size();
  MomentMatrix m(p, p);
  for (int a = 0; a < p; ++a) {
    for (int b = a; b < p; ++b) {
      m(a, b) = mean(product_exponents(model, a, b));
      m(b, a) = m(a, b);
    }
  }
  return m;
}

void check_dims(const Region& region, const ModelSpec& model) {
  if (region.q != model.factors()) {
    throw std::invalid_argument("region and model disagree on the number of factors");
  }
}

// P(u_1^2 + ... + u_k^2 <= t) for u uniform on [0,1]^k, tabulated on an
// even grid over t in [0,k] through the recursion
//   V_k(t) = int_0^min(1,sqrt t) V_{k-1}(t - u^2) du,  V_1(t) = min(1, sqrt t).
// Quadrature weights are positive, so every table is nondecreasing in t.
class CubeBallTable {
 public:
  explicit CubeBallTable(int q) : q_(q) {
    std::vector<double> prev;  // V_{k-1} on its grid
    for (int k = 2; k <= q; ++k) {
      const int size = k * kPerUnit + 1;
      std::vector<double> cur(size);
      for (int j = 0; j < size; ++j) {
        const double t = static_cast<double>(j) / kPerUnit;
        cur[j] = integrate(k - 1, prev, t);
      }
      prev = std::move(cur);
    }
    table_ = std::move(prev);
  }

  double operator()(double t) const { return lookup(q_, table_, t); }

 private:
  static constexpr int kPerUnit = 4000;
  static constexpr int kPanels = 400;

  static double lookup(int k, const std::vector<double>& table, double t) {
    if (t <= 0.0) return 0.0;
    if (k == 1) return std::min(1.0, std::sqrt(t));
    if (t >= k) return table.back();
    const double pos = t * kPerUnit;
    const auto j = std::min(static_cast<std::size_t>(pos), table.size() - 2);
    const double w = pos - static_cast<double>(j);
    return (1.0 - w) * table[j] + w * table[j + 1];
  }

  // Composite 4-point Gauss-Legendre on [0, min(1, sqrt t)].
  static double integrate(int inner, const std::vector<double>& table, double t) {
    static constexpr std::array<double, 4> kNodes = {-0.8611363115940526, -0.3399810435848563,
                                                     0.3399810435848563, 0.8611363115940526};
    static constexpr std::array<double, 4> kWeights = {0.3478548451374538, 0.6521451548625461,
                                                       0.6521451548625461, 0.3478548451374538};
    const double upper = std::min(1.0, std::sqrt(t));
    if (upper <= 0.0) return 0.0;
    const double h = upper / kPanels;
    double total = 0.0;
    for (int panel = 0; panel < kPanels; ++panel) {
      const double mid = (panel + 0.5) * h;
      for (std::size_t g = 0; g < kNodes.size(); ++g) {
        const double u = mid + 0.5 * h * kNodes[g];
        total += kWeights[g] * lookup(inner, table, t - u * u);
      }
    }
    return 0.5 * h * total;
  }

  int q_;
  std::vector<double> table_;
};

const CubeBallTable& cube_ball_table(int q) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<CubeBallTable>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[q];
  if (!slot) slot = std::make_unique<CubeBallTable>(q);
  return *slot;
}

}  // namespace

double region_monomial_mean(const Region& region, const std::vector<int>& exponents) {
  const int degree = even_degree(exponents);
  if (degree < 0) return 0.0;
  if (region.kind == RegionKind::Cube) {
    double m = 1.0;
    for (int e : exponents) m /= (e + 1);
    return m;
  }
  // Uniform ball: radial density q u^{q-1} on [0,1] contributes q/(q+|e|).
  const int q = region.q;
  return std::pow(region.rho, degree) * static_cast<double>(q) / (q + degree) *
         unit_sphere_mean(q, exponents, degree);
}

double shell_monomial_mean(int q, double radius, const std::vector<int>& exponents) {
  const int degree = even_degree(exponents);
  if (degree < 0) return 0.0;
  return std::pow(radius, degree) * unit_sphere_mean(q, exponents, degree);
}

MomentMatrix moment_matrix(const Region& region, const ModelSpec& model) {
  check_dims(region, model);
  return fill_moments(model, [&](const std::vector<int>& e) { return region_monomial_mean(region, e); });
}

MomentMatrix zero_intercept(MomentMatrix m) {
  m.row(0).setZero();
  m.col(0).setZero();
  return m;
}

MomentMatrix difference_moment_matrix(const Region& region, const ModelSpec& model) {
  return zero_intercept(moment_matrix(region, model));
}

MomentMatrix shell_moment_matrix(const Region& region, const ModelSpec& model, double r) {
  check_dims(region, model);
  if (!(r > 0.0)) throw std::invalid_argument("shell radius fraction must be positive");
  const double radius = r * region.max_radius();
  return fill_moments(model, [&](const std::vector<int>& e) {
    return shell_monomial_mean(region.q, radius, e);
  });
}

MomentMatrix shell_difference_moment_matrix(const Region& region, const ModelSpec& model,
                                            double r) {
  return zero_intercept(shell_moment_matrix(region, model, r));
}

MomentMatrix surface_moment_matrix(const Region& region, const ModelSpec& model) {
  return shell_moment_matrix(region, model, 1.0);
}

double ball_volume(int q, double radius) {
  return std::pow(std::numbers::pi, 0.5 * q) / std::tgamma(0.5 * q + 1.0) * std::pow(radius, q);
}

double volume_fraction(const Region& region, double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("radius fraction must lie in [0,1]");
  if (r == 0.0) return 0.0;
  if (r == 1.0) return 1.0;
  const int q = region.q;
  if (region.kind == RegionKind::Sphere) return std::pow(r, q);

  const double radius = r * std::sqrt(static_cast<double>(q));
  const double cube_volume = std::ldexp(1.0, q);
  if (radius <= 1.0) return ball_volume(q, radius) / cube_volume;

  // Beyond the inscribed ball, by tabulated quadrature normalized so the
  // whole cube maps to exactly one.
  const CubeBallTable& table = cube_ball_table(q);
  const double inner = ball_volume(q, 1.0) / cube_volume;
  const double value = table(radius * radius) / table(static_cast<double>(q));
  return std::clamp(value, inner, 1.0);
}

}  // namespace rsdesign
