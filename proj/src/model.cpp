#include "rsdesign/model.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rsdesign {

std::string Term::label() const {
  switch (kind) {
    case Kind::Intercept:
      return "1";
    case Kind::Linear:
      return "x" + std::to_string(first + 1);
    case Kind::Quadratic:
      return "x" + std::to_string(first + 1) + "^2";
    case Kind::Interaction:
      return "x" + std::to_string(first + 1) + "*x" + std::to_string(second + 1);
  }
  return {};
}

int Term::exponent(int i) const {
  switch (kind) {
    case Kind::Intercept:
      return 0;
    case Kind::Linear:
      return i == first ? 1 : 0;
    case Kind::Quadratic:
      return i == first ? 2 : 0;
    case Kind::Interaction:
      return (i == first || i == second) ? 1 : 0;
  }
  return 0;
}

ModelSpec::ModelSpec(int q, std::vector<Term> terms, bool full)
    : q_(q), terms_(std::move(terms)), full_quadratic_(full) {}

ModelSpec ModelSpec::full_quadratic(int q) {
  if (q < 1) throw std::invalid_argument("model needs at least one factor");
  std::vector<Term> terms;
  terms.reserve(1 + 2 * q + q * (q - 1) / 2);
  terms.push_back({Term::Kind::Intercept, -1, -1});
  for (int i = 0; i < q; ++i) terms.push_back({Term::Kind::Linear, i, -1});
  for (int i = 0; i < q; ++i) terms.push_back({Term::Kind::Quadratic, i, -1});
  for (int i = 0; i < q; ++i)
    for (int j = i + 1; j < q; ++j) terms.push_back({Term::Kind::Interaction, i, j});
  return ModelSpec(q, std::move(terms), true);
}

ModelSpec ModelSpec::intercept_only(int q) {
  if (q < 1) throw std::invalid_argument("model needs at least one factor");
  return ModelSpec(q, {Term{Term::Kind::Intercept, -1, -1}}, false);
}

void ModelSpec::expand_into(std::span<const double> x, Eigen::Ref<Vector> out) const {
  if (static_cast<int>(x.size()) != q_) {
    throw std::invalid_argument("point has " + std::to_string(x.size()) +
                                " coordinates, model expects " + std::to_string(q_));
  }
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    const Term& t = terms_[k];
    switch (t.kind) {
      case Term::Kind::Intercept:
        out[k] = 1.0;
        break;
      case Term::Kind::Linear:
        out[k] = x[t.first];
        break;
      case Term::Kind::Quadratic:
        out[k] = x[t.first] * x[t.first];
        break;
      case Term::Kind::Interaction:
        out[k] = x[t.first] * x[t.second];
        break;
    }
  }
}

Vector ModelSpec::expand(std::span<const double> x) const {
  Vector f(size());
  expand_into(x, f);
  return f;
}

Region Region::cube(int q) {
  if (q < 1) throw std::invalid_argument("region needs at least one factor");
  return Region{RegionKind::Cube, q, 1.0};
}

Region Region::sphere(int q, double rho) {
  if (q < 1) throw std::invalid_argument("region needs at least one factor");
  if (!(rho > 0.0)) throw std::invalid_argument("sphere radius must be positive");
  return Region{RegionKind::Sphere, q, rho};
}

double Region::max_radius() const {
  return kind == RegionKind::Sphere ? rho : std::sqrt(static_cast<double>(q));
}

bool Region::contains(std::span<const double> x, double tol) const {
  if (static_cast<int>(x.size()) != q) return false;
  if (kind == RegionKind::Cube) {
    for (double v : x)
      if (std::abs(v) > 1.0 + tol) return false;
    return true;
  }
  double ss = 0.0;
  for (double v : x) ss += v * v;
  return std::sqrt(ss) <= rho + tol;
}

std::string Region::describe() const {
  std::ostringstream os;
  if (kind == RegionKind::Cube) {
    os << "cube q=" << q;
  } else {
    os.precision(10);
    os << "sphere q=" << q << " rho=" << rho;
  }
  return os.str();
}

Design::Design(int q, std::vector<FactorPoint> points) : q_(q), points_(std::move(points)) {
  if (q < 1) throw std::invalid_argument("design needs at least one factor");
  for (const auto& p : points_) {
    if (static_cast<int>(p.size()) != q) {
      throw std::invalid_argument("design point has " + std::to_string(p.size()) +
                                  " coordinates, expected " + std::to_string(q));
    }
    for (double v : p)
      if (!std::isfinite(v)) throw std::invalid_argument("design point has a non-finite coordinate");
  }
}

int distinct_points(const Design& design) {
  std::set<std::vector<long long>> keys;
  for (const auto& p : design.points()) {
    std::vector<long long> key(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) key[i] = std::llround(p[i] * 1e10);
    keys.insert(std::move(key));
  }
  return static_cast<int>(keys.size());
}

DfAccounting df_accounting(const Design& design, const ModelSpec& model) {
  DfAccounting df;
  df.distinct = distinct_points(design);
  df.pure_error = design.runs() - df.distinct;
  df.lack_of_fit = df.distinct - model.size();
  return df;
}

Matrix model_matrix(const ModelSpec& model, const Design& design) {
  if (design.factors() != model.factors() && design.runs() > 0) {
    throw std::invalid_argument("design and model disagree on the number of factors");
  }
  Matrix x(design.runs(), model.size());
  Vector row(model.size());
  for (int i = 0; i < design.runs(); ++i) {
    model.expand_into(design[i], row);
    x.row(i) = row.transpose();
  }
  return x;
}

Matrix model_matrix_without_intercept(const ModelSpec& model, const Design& design) {
  Matrix x = model_matrix(model, design);
  return x.rightCols(x.cols() - 1);
}

Matrix centering_projector(int n) {
  return Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n);
}

CandidateSet candidate_set(int q, const Region& region) {
  if (q < 1) throw std::invalid_argument("candidate set needs at least one factor");
  if (region.q != q) throw std::invalid_argument("region dimension does not match q");
  CandidateSet set;
  set.region = region;
  std::size_t total = 1;
  for (int i = 0; i < q; ++i) total *= 3;
  set.points.reserve(total);

  std::vector<int> digits(q, -1);
  for (std::size_t k = 0; k < total; ++k) {
    FactorPoint p(digits.begin(), digits.end());
    if (region.kind == RegionKind::Sphere) {
      int nonzero = 0;
      for (int d : digits) nonzero += d != 0;
      if (nonzero > 0) {
        const double scale = region.rho / std::sqrt(static_cast<double>(nonzero));
        for (auto& v : p) v *= scale;
      }
    }
    set.points.push_back(std::move(p));
    // odometer with the last factor varying fastest
    for (int i = q - 1; i >= 0; --i) {
      if (++digits[i] <= 1) break;
      digits[i] = -1;
    }
  }
  return set;
}

Design snap_to_sphere(const Design& design, double rho) {
  std::vector<FactorPoint> points = design.points();
  for (auto& p : points) {
    int nonzero = 0;
    double ss = 0.0;
    for (double v : p) {
      nonzero += std::abs(v) > 1e-9;
      ss += v * v;
    }
    if (nonzero == 0) continue;
    if (std::abs(std::sqrt(ss) - rho) > 0.02 * rho) continue;
    const double mag = rho / std::sqrt(static_cast<double>(nonzero));
    bool on_grid = true;
    for (double v : p)
      if (std::abs(v) > 1e-9 && std::abs(std::abs(v) - mag) > 0.02 * mag) on_grid = false;
    if (!on_grid) continue;
    for (auto& v : p) {
      if (std::abs(v) > 1e-9) v = v > 0 ? mag : -mag;
      else v = 0.0;
    }
  }
  return Design(design.factors(), std::move(points));
}

}  // namespace rsdesign
