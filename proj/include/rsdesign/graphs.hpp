#ifndef RSDESIGN_GRAPHS_HPP
#define RSDESIGN_GRAPHS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rsdesign/model.hpp"

namespace rsdesign {

enum class GraphVariant { VDG, DVDG, FDS, DFDS };
enum class GraphScale { Variance, StandardError };
enum class GraphAxis { Distance, VolumeFraction };

std::string to_string(GraphVariant v);
std::string to_string(GraphScale s);
std::string to_string(GraphAxis a);
std::optional<GraphVariant> parse_graph_variant(const std::string& s);

struct GraphConfig {
  GraphVariant variant = GraphVariant::FDS;
  GraphScale scale = GraphScale::Variance;
  /// When set, values are for pointwise intervals: variances are multiplied
  /// by F_{1,d;1-alpha}.
  std::optional<double> interval_alpha;
  GraphAxis axis = GraphAxis::Distance;
  int radii = 101;              // VDG-family grid size on [0,1]
  int samples = 100000;         // FDS-family sample size N
  int shell_samples = 10000;    // per-radius samples for min/max
  std::uint64_t seed = 20240607;
  int threads = 0;              // 0: default_thread_count()
};

struct DispersionRow {
  double x = 0.0;
  double min = 0.0;
  std::optional<double> mean;  // absent for cubes
  double max = 0.0;
};

struct FractionRow {
  double fraction = 0.0;
  double value = 0.0;
};

struct GraphSeries {
  GraphConfig config;
  int pure_error = 0;
  double multiplier = 1.0;  // F_{1,d;1-alpha}, 1 for point predictions
  std::vector<DispersionRow> dispersion;  // VDG / DVDG
  std::vector<FractionRow> fraction;      // FDS / DFDS
};

/// Scaled prediction variance f(x)'(X'X)^-1 f(x) and difference variance
/// (f(x)-f(0))'(X'X)^-1(f(x)-f(0)) for a fixed design.
class PredictionVariance {
 public:
  /// Throws ContractError when X'X is singular.
  PredictionVariance(const ModelSpec& model, const Design& design);

  double point(std::span<const double> x) const;
  double difference(std::span<const double> x) const;
  double at(std::span<const double> x, bool difference) const;
  const Matrix& inverse_information() const { return inv_; }
  const ModelSpec& model() const { return model_; }

 private:
  ModelSpec model_;
  Matrix inv_;
};

/// Variance dispersion graph: min / mean / max of the prediction variance
/// on spheres of radius r * max_radius(), r on an even grid over [0,1].
/// Spheres are clipped to the cube for cuboidal regions, which report no mean.
GraphSeries vdg(const Design& design, const ModelSpec& model, const Region& region,
                const GraphConfig& cfg);
/// As vdg, for differences from the center.
GraphSeries dvdg(const Design& design, const ModelSpec& model, const Region& region,
                 const GraphConfig& cfg);
/// Fraction of design space: sorted variances of N uniform region points
/// against j/(N+1).
GraphSeries fds(const Design& design, const ModelSpec& model, const Region& region,
                const GraphConfig& cfg);
GraphSeries dfds(const Design& design, const ModelSpec& model, const Region& region,
                 const GraphConfig& cfg);
/// Dispatches on cfg.variant.
GraphSeries graph_series(const Design& design, const ModelSpec& model, const Region& region,
                         const GraphConfig& cfg);

/// Unsorted scaled variances at `count` uniform region points (seeded).
std::vector<double> sample_region_variances(const PredictionVariance& pv, const Region& region,
                                            int count, std::uint64_t seed, bool difference,
                                            int threads = 0);

/// `count` points on the sphere of the given radius, uniform in direction.
std::vector<FactorPoint> sample_shell(int q, double radius, int count, std::uint64_t seed);

/// Point of shell-intersect-cube closest in direction to `direction`
/// (coordinates clipped to +-1, free coordinates rescaled).
FactorPoint project_to_clipped_shell(const FactorPoint& direction, double radius);

/// CSV with `#` metadata lines; dispersion header `x,min,mean,max`, fraction
/// header `fraction,value`; values carry 10 significant digits.
void write_graph_csv(std::ostream& os, const GraphSeries& series,
                     const std::vector<std::pair<std::string, std::string>>& metadata = {});

}  // namespace rsdesign

#endif  // RSDESIGN_GRAPHS_HPP
