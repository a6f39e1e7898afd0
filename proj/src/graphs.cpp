#include "rsdesign/graphs.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "rsdesign/errors.hpp"
#include "rsdesign/numerics.hpp"
#include "rsdesign/optimizer.hpp"
#include "rsdesign/region.hpp"
#include "parallel.hpp"
#include "random.hpp"

namespace rsdesign {

namespace {

constexpr int kBlock = 4096;          // FDS samples per RNG stream
constexpr int kMinShellPoints = 1000;  // accepted points on clipped cube shells
constexpr int kDrawBudgetFactor = 20;  // rejection draws per requested point

void check_inputs(const Design& design, const ModelSpec& model, const Region& region,
                  const GraphConfig& cfg) {
  if (design.factors() != model.factors() || region.q != model.factors()) {
    throw std::invalid_argument("design, model and region disagree on the number of factors");
  }
  if (cfg.radii < 2) throw std::invalid_argument("graphs need at least 2 radii");
  if (cfg.samples < 1) throw std::invalid_argument("graphs need at least 1 sample");
  if (cfg.shell_samples < 1) throw std::invalid_argument("graphs need at least 1 shell sample");
  if (cfg.interval_alpha && !(*cfg.interval_alpha > 0.0 && *cfg.interval_alpha < 1.0)) {
    throw std::invalid_argument("interval alpha must lie in (0,1)");
  }
}

// F_{1,d;1-alpha} for interval graphs, 1 for point graphs.
double interval_multiplier(const GraphConfig& cfg, int pure_error) {
  if (!cfg.interval_alpha) return 1.0;
  if (pure_error < 1) {
    throw ContractError(
        "interval graphs need pure-error degrees of freedom, but the design has no replicated "
        "points (d = 0)");
  }
  return f_quantile_cached(1, pure_error, 1.0 - *cfg.interval_alpha);
}

// Scale and interval transforms. In s.e. scale the multiplier enters as
// sqrt(F) after the root so that interval rows equal point rows times sqrt(F).
double transform(double v, const GraphConfig& cfg, double multiplier) {
  if (cfg.scale == GraphScale::Variance) return v * multiplier;
  return std::sqrt(std::max(v, 0.0)) * std::sqrt(multiplier);
}

FactorPoint random_direction(int q, std::mt19937_64& rng, detail::Gaussian& gauss) {
  FactorPoint d(static_cast<std::size_t>(q));
  double norm = 0.0;
  do {
    norm = 0.0;
    for (auto& c : d) {
      c = gauss(rng);
      norm += c * c;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (auto& c : d) c /= norm;
  return d;
}

// Points of the shell at `radius` to search for extrema. Spheres and cube
// shells inside the cube are sampled directly; cube shells that leave the
// cube are restricted to the cube by rejection, topped up by projection
// when acceptance is too rare to reach the minimum count.
std::vector<FactorPoint> shell_points(const Region& region, double radius, int count,
                                      std::uint64_t seed) {
  const int q = region.q;
  std::mt19937_64 rng = detail::unit_stream(seed, 0);
  detail::Gaussian gauss;
  std::vector<FactorPoint> out;
  out.reserve(static_cast<std::size_t>(count));
  const bool clipped = region.kind == RegionKind::Cube && radius > 1.0;
  if (!clipped) {
    for (int i = 0; i < count; ++i) {
      FactorPoint d = random_direction(q, rng, gauss);
      for (auto& c : d) c *= radius;
      out.push_back(std::move(d));
    }
    return out;
  }
  const long long budget = static_cast<long long>(kDrawBudgetFactor) * count;
  for (long long draw = 0; draw < budget && static_cast<int>(out.size()) < count; ++draw) {
    FactorPoint d = random_direction(q, rng, gauss);
    bool inside = true;
    for (auto& c : d) {
      c *= radius;
      inside = inside && std::abs(c) <= 1.0;
    }
    if (inside) out.push_back(std::move(d));
  }
  const int minimum = std::min(count, kMinShellPoints);
  while (static_cast<int>(out.size()) < minimum) {
    out.push_back(project_to_clipped_shell(random_direction(q, rng, gauss), radius));
  }
  return out;
}

FactorPoint uniform_region_point(const Region& region, std::mt19937_64& rng,
                                 detail::Gaussian& gauss) {
  const int q = region.q;
  if (region.kind == RegionKind::Cube) {
    FactorPoint x(static_cast<std::size_t>(q));
    for (auto& c : x) c = 2.0 * detail::uniform01(rng) - 1.0;
    return x;
  }
  FactorPoint x = random_direction(q, rng, gauss);
  const double radius = region.rho * std::pow(detail::uniform01(rng), 1.0 / q);
  for (auto& c : x) c *= radius;
  return x;
}

int thread_count(const GraphConfig& cfg) {
  return cfg.threads > 0 ? cfg.threads : default_thread_count();
}

GraphSeries dispersion(const Design& design, const ModelSpec& model, const Region& region,
                       const GraphConfig& cfg, bool difference) {
  check_inputs(design, model, region, cfg);
  const PredictionVariance pv(model, design);
  GraphSeries series;
  series.config = cfg;
  series.pure_error = df_accounting(design, model).pure_error;
  series.multiplier = interval_multiplier(cfg, series.pure_error);
  series.dispersion.resize(static_cast<std::size_t>(cfg.radii));

  const FactorPoint center(static_cast<std::size_t>(region.q), 0.0);
  const double at_center = pv.at(center, difference);
  const bool sphere = region.kind == RegionKind::Sphere;

  detail::parallel_for(cfg.radii, thread_count(cfg), [&](int k) {
    const double r = static_cast<double>(k) / (cfg.radii - 1);
    double lo = at_center;
    double hi = at_center;
    std::optional<double> mean;
    if (sphere) mean = at_center;
    if (k > 0) {
      const double radius = r * region.max_radius();
      lo = std::numeric_limits<double>::infinity();
      hi = -lo;
      if (sphere) {
        const MomentMatrix m = difference ? shell_difference_moment_matrix(region, model, r)
                                          : shell_moment_matrix(region, model, r);
        mean = m.cwiseProduct(pv.inverse_information()).sum();
        lo = hi = *mean;
      }
      const auto pts = shell_points(region, radius, cfg.shell_samples,
                                    detail::splitmix64(cfg.seed) ^ static_cast<std::uint64_t>(k));
      for (const auto& x : pts) {
        const double v = pv.at(x, difference);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    auto& row = series.dispersion[static_cast<std::size_t>(k)];
    row.x = cfg.axis == GraphAxis::Distance ? r * region.max_radius() : volume_fraction(region, r);
    row.min = transform(lo, cfg, series.multiplier);
    row.max = transform(hi, cfg, series.multiplier);
    if (mean) row.mean = transform(*mean, cfg, series.multiplier);
  });
  return series;
}

GraphSeries fraction_series(const Design& design, const ModelSpec& model, const Region& region,
                            const GraphConfig& cfg, bool difference) {
  check_inputs(design, model, region, cfg);
  const PredictionVariance pv(model, design);
  GraphSeries series;
  series.config = cfg;
  series.pure_error = df_accounting(design, model).pure_error;
  series.multiplier = interval_multiplier(cfg, series.pure_error);

  std::vector<double> v =
      sample_region_variances(pv, region, cfg.samples, cfg.seed, difference, cfg.threads);
  std::sort(v.begin(), v.end());
  const double denom = static_cast<double>(v.size()) + 1.0;
  series.fraction.reserve(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    series.fraction.push_back(
        {static_cast<double>(j + 1) / denom, transform(v[j], cfg, series.multiplier)});
  }
  return series;
}

void write_number(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  os << buf;
}

}  // namespace

std::string to_string(GraphVariant v) {
  switch (v) {
    case GraphVariant::VDG: return "VDG";
    case GraphVariant::DVDG: return "DVDG";
    case GraphVariant::FDS: return "FDS";
    case GraphVariant::DFDS: return "DFDS";
  }
  return "?";
}

std::string to_string(GraphScale s) { return s == GraphScale::Variance ? "variance" : "se"; }

std::string to_string(GraphAxis a) {
  return a == GraphAxis::Distance ? "distance" : "volume-fraction";
}

std::optional<GraphVariant> parse_graph_variant(const std::string& s) {
  std::string u;
  for (char c : s) u += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  // The standard-error dispersion graphs go by their own names.
  if (u == "VDG" || u == "SEDG") return GraphVariant::VDG;
  if (u == "DVDG" || u == "DSEDG") return GraphVariant::DVDG;
  if (u == "FDS") return GraphVariant::FDS;
  if (u == "DFDS") return GraphVariant::DFDS;
  return std::nullopt;
}

PredictionVariance::PredictionVariance(const ModelSpec& model, const Design& design)
    : model_(model) {
  if (design.factors() != model.factors()) {
    throw std::invalid_argument("design and model disagree on the number of factors");
  }
  const Matrix x = model_matrix(model, design);
  const Matrix info = x.transpose() * x;
  if (logdet_psd(info) == -std::numeric_limits<double>::infinity()) {
    throw ContractError("X'X is singular; prediction variances are undefined for this design");
  }
  const Matrix identity = Matrix::Identity(info.rows(), info.cols());
  inv_ = info.ldlt().solve(identity);
  inv_ = 0.5 * (inv_ + inv_.transpose()).eval();
}

double PredictionVariance::point(std::span<const double> x) const {
  const Vector f = model_.expand(x);
  return f.dot(inv_ * f);
}

double PredictionVariance::difference(std::span<const double> x) const {
  Vector g = model_.expand(x);
  g[0] -= 1.0;  // f(0) = e_1 for every polynomial model with an intercept
  return g.dot(inv_ * g);
}

double PredictionVariance::at(std::span<const double> x, bool difference) const {
  return difference ? this->difference(x) : point(x);
}

std::vector<double> sample_region_variances(const PredictionVariance& pv, const Region& region,
                                            int count, std::uint64_t seed, bool difference,
                                            int threads) {
  if (count < 1) throw std::invalid_argument("sample count must be positive");
  std::vector<double> v(static_cast<std::size_t>(count));
  const int blocks = (count + kBlock - 1) / kBlock;
  detail::parallel_for(blocks, threads > 0 ? threads : default_thread_count(), [&](int b) {
    std::mt19937_64 rng = detail::unit_stream(seed, static_cast<std::uint64_t>(b));
    detail::Gaussian gauss;
    const int end = std::min(count, (b + 1) * kBlock);
    for (int j = b * kBlock; j < end; ++j) {
      v[static_cast<std::size_t>(j)] = pv.at(uniform_region_point(region, rng, gauss), difference);
    }
  });
  return v;
}

std::vector<FactorPoint> sample_shell(int q, double radius, int count, std::uint64_t seed) {
  if (q < 1 || count < 0 || !(radius >= 0.0)) throw std::invalid_argument("bad shell request");
  return shell_points(Region::sphere(q, std::max(radius, 1.0)), radius, count, seed);
}

FactorPoint project_to_clipped_shell(const FactorPoint& direction, double radius) {
  const int q = static_cast<int>(direction.size());
  FactorPoint x(direction.size());
  if (radius * radius >= q) {
    for (int i = 0; i < q; ++i) x[i] = direction[i] < 0.0 ? -1.0 : 1.0;
    return x;
  }
  // Water filling: scale the free coordinates to take up the remaining
  // squared radius, clipping any that exceed 1, until none do.
  std::vector<bool> clipped(direction.size(), false);
  for (;;) {
    double free_norm = 0.0;
    int n_clipped = 0;
    for (int i = 0; i < q; ++i) {
      if (clipped[i]) ++n_clipped;
      else free_norm += direction[i] * direction[i];
    }
    const double remaining = radius * radius - n_clipped;
    bool changed = false;
    for (int i = 0; i < q; ++i) {
      if (clipped[i]) {
        x[i] = direction[i] < 0.0 ? -1.0 : 1.0;
        continue;
      }
      // All remaining direction mass is zero: spread the radius evenly.
      const double value = free_norm > 0.0
                               ? direction[i] * std::sqrt(remaining / free_norm)
                               : std::sqrt(remaining / (q - n_clipped));
      if (std::abs(value) > 1.0) {
        clipped[i] = true;
        changed = true;
      }
      x[i] = value;
    }
    if (!changed) return x;
  }
}

GraphSeries vdg(const Design& design, const ModelSpec& model, const Region& region,
                const GraphConfig& cfg) {
  return dispersion(design, model, region, cfg, false);
}

GraphSeries dvdg(const Design& design, const ModelSpec& model, const Region& region,
                 const GraphConfig& cfg) {
  return dispersion(design, model, region, cfg, true);
}

GraphSeries fds(const Design& design, const ModelSpec& model, const Region& region,
                const GraphConfig& cfg) {
  return fraction_series(design, model, region, cfg, false);
}

GraphSeries dfds(const Design& design, const ModelSpec& model, const Region& region,
                 const GraphConfig& cfg) {
  return fraction_series(design, model, region, cfg, true);
}

GraphSeries graph_series(const Design& design, const ModelSpec& model, const Region& region,
                         const GraphConfig& cfg) {
  switch (cfg.variant) {
    case GraphVariant::VDG: return vdg(design, model, region, cfg);
    case GraphVariant::DVDG: return dvdg(design, model, region, cfg);
    case GraphVariant::FDS: return fds(design, model, region, cfg);
    case GraphVariant::DFDS: return dfds(design, model, region, cfg);
  }
  throw std::invalid_argument("unknown graph variant");
}

void write_graph_csv(std::ostream& os, const GraphSeries& series,
                     const std::vector<std::pair<std::string, std::string>>& metadata) {
  const GraphConfig& cfg = series.config;
  os << "# variant: " << to_string(cfg.variant) << '\n';
  os << "# scale: " << to_string(cfg.scale) << '\n';
  os << "# interval_alpha: ";
  if (cfg.interval_alpha) write_number(os, *cfg.interval_alpha);
  else os << "none";
  os << '\n';
  os << "# multiplier: ";
  write_number(os, series.multiplier);
  os << '\n';
  os << "# pure_error_df: " << series.pure_error << '\n';
  os << "# axis: " << to_string(cfg.axis) << '\n';
  os << "# seed: " << cfg.seed << '\n';
  for (const auto& [key, value] : metadata) os << "# " << key << ": " << value << '\n';

  if (cfg.variant == GraphVariant::VDG || cfg.variant == GraphVariant::DVDG) {
    os << "x,min,mean,max\n";
    for (const auto& row : series.dispersion) {
      write_number(os, row.x);
      os << ',';
      write_number(os, row.min);
      os << ',';
      if (row.mean) write_number(os, *row.mean);
      os << ',';
      write_number(os, row.max);
      os << '\n';
    }
  } else {
    os << "fraction,value\n";
    for (const auto& row : series.fraction) {
      write_number(os, row.fraction);
      os << ',';
      write_number(os, row.value);
      os << '\n';
    }
  }
}

}  // namespace rsdesign
