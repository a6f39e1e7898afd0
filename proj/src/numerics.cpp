#include "rsdesign/numerics.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace rsdesign {

namespace {

// Continued fraction for I_x(a,b) (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

// Rough standard normal quantile (Abramowitz & Stegun 26.2.23), |error| < 5e-4.
double approx_normal_quantile(double p) {
  const double pp = p < 0.5 ? p : 1.0 - p;
  const double t = std::sqrt(-2.0 * std::log(pp));
  const double z = t - (2.515517 + 0.802853 * t + 0.010328 * t * t) /
                           (1.0 + 1.432788 * t + 0.189269 * t * t + 0.001308 * t * t * t);
  return p < 0.5 ? -z : z;
}

// Paulson's cube-root normal approximation to the F quantile.
double approx_f_quantile(int df1, int df2, double level) {
  const double z = approx_normal_quantile(level);
  const double a = 2.0 / (9.0 * df1);
  const double b = 2.0 / (9.0 * df2);
  const double disc = (1 - a) * (1 - a) * b + (1 - b) * (1 - b) * a - a * b * z * z;
  const double denom = (1 - b) * (1 - b) - b * z * z;
  if (disc <= 0.0 || denom <= 0.0) return 1.0;
  const double root = ((1 - a) * (1 - b) + z * std::sqrt(disc)) / denom;
  const double guess = root * root * root;
  return (std::isfinite(guess) && guess > 0.0) ? guess : 1.0;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("incomplete_beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_upper_tail(int df1, int df2, double f) {
  if (df1 < 1 || df2 < 1) throw std::invalid_argument("F distribution needs positive df");
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  // P(F > f) = I_{d2/(d2 + d1 f)}(d2/2, d1/2)
  const double x = df2 / (df2 + df1 * f);
  return incomplete_beta(0.5 * df2, 0.5 * df1, x);
}

double f_quantile(int df1, int df2, double level) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("quantile level must lie in (0,1)");
  if (df1 < 1) throw std::invalid_argument("numerator degrees of freedom must be >= 1");
  if (df2 < 0) throw std::invalid_argument("denominator degrees of freedom must be >= 0");
  if (df2 == 0) return std::numeric_limits<double>::infinity();

  const double target = 1.0 - level;  // upper-tail probability
  const double guess = approx_f_quantile(df1, df2, level);
  double lo = 0.5 * guess;
  double hi = 2.0 * guess;
  while (f_upper_tail(df1, df2, lo) < target) lo *= 0.5;
  while (f_upper_tail(df1, df2, hi) > target) hi *= 2.0;

  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= 1e-10 * 0.01) break;
    if (f_upper_tail(df1, df2, mid) > target) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double f_quantile_cached(int df1, int df2, double level) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, double>, double> memo;
  const auto key = std::make_tuple(df1, df2, level);
  {
    std::lock_guard lock(mu);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
  }
  const double value = f_quantile(df1, df2, level);
  std::lock_guard lock(mu);
  memo.emplace(key, value);
  return value;
}

namespace {

void require_symmetric(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix is not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument("matrix is not symmetric");
  }
}

bool pivots_ok(const Vector& pivots) {
  if (pivots.size() == 0) return true;
  const double largest = pivots.cwiseAbs().maxCoeff();
  if (!(largest > 0.0)) return false;
  for (double d : pivots)
    if (!(d > kSingularPivot * largest)) return false;
  return true;
}

}  // namespace

double logdet_psd(const Matrix& m) {
  require_symmetric(m);
  if (m.rows() == 0) return 0.0;
  Eigen::LDLT<Matrix> ldlt(m);
  const Vector pivots = ldlt.vectorD();
  if (!pivots_ok(pivots)) return -std::numeric_limits<double>::infinity();
  return pivots.array().log().sum();
}

std::optional<double> trace_prod_inv(const Matrix& a, const Matrix& m) {
  if (a.rows() != a.cols() || m.rows() != a.rows() || m.cols() != a.cols()) {
    throw std::invalid_argument("trace_prod_inv: dimension mismatch");
  }
  Eigen::LDLT<Matrix> ldlt(a);
  if (ldlt.info() != Eigen::Success || !pivots_ok(ldlt.vectorD())) return std::nullopt;
  return ldlt.solve(m).trace();
}

int psd_rank(const Matrix& m) {
  if (m.rows() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  const Vector& ev = eig.eigenvalues();
  const double largest = ev.cwiseAbs().maxCoeff();
  if (!(largest > 0.0)) return 0;
  int rank = 0;
  for (double v : ev) rank += v > kSingularPivot * largest;
  return rank;
}

}  // namespace rsdesign
