#ifndef RSDESIGN_CRITERIA_HPP
#define RSDESIGN_CRITERIA_HPP

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rsdesign/model.hpp"
#include "rsdesign/region.hpp"

namespace rsdesign {

/// The eight single criteria reported in efficiency tables.
enum class Criterion { Ds, DPs, As, APs, I, IP, ID, IDP };

inline constexpr std::array<Criterion, 8> kAllCriteria = {
    Criterion::Ds, Criterion::DPs, Criterion::As, Criterion::APs,
    Criterion::I,  Criterion::IP,  Criterion::ID, Criterion::IDP};

std::string_view criterion_name(Criterion c);
/// Parses names such as "Ds", "DPs", "I_D", "(I_DP)" (case-insensitive).
std::optional<Criterion> parse_criterion(std::string_view name);

/// Which measure spherical regions use for the I-type moment matrices.
/// Cubes always use the volume measure.
enum class SphereMeasure { Surface, Volume };

struct CriterionConfig {
  /// kappa[0..8]: D_S, (DP)_S, (AP)_S, A_S, df, I, (IP), I_D, (I_DP).
  std::array<double, 9> kappa{};
  double alpha_dp = 0.05;   // alpha_1
  double alpha_ap = 0.05;   // alpha_2
  double alpha_ip = 0.05;   // alpha_3
  double alpha_idp = 0.05;  // alpha_4
  /// Diagonal of W. Empty means default_weights(model).
  Vector weights;
  SphereMeasure sphere_measure = SphereMeasure::Surface;

  /// kappa = e_i for the weight that selects `c` alone.
  static CriterionConfig single(Criterion c);
  /// Throws std::invalid_argument when weights are negative, do not sum to
  /// one within 1e-9, or an alpha lies outside (0,1).
  void validate() const;
};

/// Index into CriterionConfig::kappa that selects criterion `c`.
int kappa_index(Criterion c);

/// W diagonal: 0 for the intercept, 1 for linear and interaction terms,
/// `quadratic_weight` for pure quadratic terms.
Vector default_weights(const ModelSpec& model, double quadratic_weight = 0.25);

/// Moment matrix used by I-type criteria for this region and measure.
MomentMatrix criterion_moments(const Region& region, const ModelSpec& model, SphereMeasure measure);

struct CriterionComponent {
  std::string name;
  double exponent = 0.0;
  double base = 0.0;
};

struct CriterionValue {
  double value = 0.0;  // larger is better; 0 when undefined
  double log_value = 0.0;
  bool defined = false;
  std::vector<CriterionComponent> components;
};

/// Everything about a design that the criteria depend on.
struct InformationSummary {
  int runs = 0;
  int pure_error = 0;
  bool singular = true;
  double logdet_info = 0.0;  // log|X'X|
  double trace_w = 0.0;      // tr(W (X'X)^-1)
  double trace_m = 0.0;      // tr(M (X'X)^-1)
  double trace_m0 = 0.0;     // tr(M0 (X'X)^-1)
};

/// Model, region and configuration with the derived matrices cached.
class CriterionContext {
 public:
  CriterionContext(ModelSpec model, Region region, CriterionConfig config);

  const ModelSpec& model() const { return model_; }
  const Region& region() const { return region_; }
  const CriterionConfig& config() const { return config_; }
  const MomentMatrix& moments() const { return m_; }
  const MomentMatrix& difference_moments() const { return m0_; }
  const Matrix& weight_matrix() const { return w_; }

  /// Same model/region/matrices with a different kappa vector.
  CriterionContext with_kappa(const std::array<double, 9>& kappa) const;

 private:
  ModelSpec model_;
  Region region_;
  CriterionConfig config_;
  MomentMatrix m_;
  MomentMatrix m0_;
  Matrix w_;
};

InformationSummary summarize(const CriterionContext& ctx, const Matrix& info, int runs,
                             int pure_error);
InformationSummary summarize(const CriterionContext& ctx, const Design& design);

/// The compound criterion
///   F_{p-1,d}^{-k1} F_{1,d}^{-k2} |X0'QX0|^{(k0+k1)/(p-1)} (n-d)^{k4}
///   F_{1,d}^{-k6} F_{1,d}^{-k8}
///   / ( tr(W A^-1)^{k2+k3} tr(M A^-1)^{k5+k6} tr(M0 A^-1)^{k7+k8} )
/// with A = X'X. Factors whose exponent is zero are skipped.
CriterionValue compound_from_summary(const CriterionContext& ctx, const InformationSummary& s);
CriterionValue compound_value(const Design& design, const CriterionContext& ctx);

/// Log of the compound criterion for designs with a fixed run count, with
/// the F-quantile factors tabulated per pure-error df. Returns -infinity when
/// the criterion is undefined. Agrees with compound_from_summary.
class CompoundEvaluator {
 public:
  CompoundEvaluator(const CriterionContext& ctx, int runs);

  double log_value(const InformationSummary& s) const;
  bool uses_trace_w() const { return exp_w_ != 0.0; }
  bool uses_trace_m() const { return exp_m_ != 0.0; }
  bool uses_trace_m0() const { return exp_m0_ != 0.0; }
  bool uses_pure_error() const { return needs_pure_error_; }

 private:
  int runs_;
  double exp_det_ = 0.0;
  double exp_df_ = 0.0;
  double exp_w_ = 0.0;
  double exp_m_ = 0.0;
  double exp_m0_ = 0.0;
  double log_runs_ = 0.0;
  bool needs_pure_error_ = false;
  std::vector<double> penalty_;  // indexed by pure-error df
};

// Single criteria, larger is better, 0 when undefined.
double ds_value(const Design& design, const ModelSpec& model);
double dps_value(const Design& design, const ModelSpec& model, double alpha);
double as_value(const Design& design, const ModelSpec& model, const Vector& weights);
double aps_value(const Design& design, const ModelSpec& model, const Vector& weights, double alpha);
double i_value(const Design& design, const ModelSpec& model, const MomentMatrix& m);
double ip_value(const Design& design, const ModelSpec& model, const MomentMatrix& m, double alpha);
double id_value(const Design& design, const ModelSpec& model, const MomentMatrix& m);
double idp_value(const Design& design, const ModelSpec& model, const MomentMatrix& m, double alpha);

/// Value of one single criterion under the context's alphas, W and moments.
double single_value(const Design& design, const CriterionContext& ctx, Criterion c);

struct EfficiencyRow {
  std::string label;
  DfAccounting df;
  std::array<double, 8> values{};
  std::array<double, 8> efficiency{};  // percent; NaN when the reference is 0
};

struct EfficiencyTable {
  std::vector<EfficiencyRow> rows;
  std::array<double, 8> reference{};
};

struct LabeledDesign {
  std::string label;
  Design design;
};

/// Efficiencies 100 * value / reference for every design and criterion.
/// The reference defaults to the best value within the supplied set.
/// Throws std::invalid_argument for an empty list or mixed factor counts.
EfficiencyTable efficiency_table(const std::vector<LabeledDesign>& designs,
                                 const CriterionContext& ctx,
                                 const std::optional<std::array<double, 8>>& reference = std::nullopt);

void write_efficiency_csv(std::ostream& os, const EfficiencyTable& table);
void write_efficiency_text(std::ostream& os, const EfficiencyTable& table);
void write_breakdown(std::ostream& os, const CriterionValue& value);

}  // namespace rsdesign

#endif  // RSDESIGN_CRITERIA_HPP
