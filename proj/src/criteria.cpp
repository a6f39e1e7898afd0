#include "rsdesign/criteria.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "rsdesign/numerics.hpp"

namespace rsdesign {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string normalize_name(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '(' || c == ')' || c == '_' || c == '-' || c == ' ') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

double safe_ratio_log(double trace) { return trace > 0.0 ? -std::log(trace) : kNegInf; }

}  // namespace

std::string_view criterion_name(Criterion c) {
  switch (c) {
    case Criterion::Ds: return "D_S";
    case Criterion::DPs: return "(DP)_S";
    case Criterion::As: return "A_S";
    case Criterion::APs: return "(AP)_S";
    case Criterion::I: return "I";
    case Criterion::IP: return "(IP)";
    case Criterion::ID: return "I_D";
    case Criterion::IDP: return "(I_DP)";
  }
  return "?";
}

std::optional<Criterion> parse_criterion(std::string_view name) {
  const std::string key = normalize_name(name);
  for (Criterion c : kAllCriteria)
    if (normalize_name(criterion_name(c)) == key) return c;
  return std::nullopt;
}

int kappa_index(Criterion c) {
  switch (c) {
    case Criterion::Ds: return 0;
    case Criterion::DPs: return 1;
    case Criterion::APs: return 2;
    case Criterion::As: return 3;
    case Criterion::I: return 5;
    case Criterion::IP: return 6;
    case Criterion::ID: return 7;
    case Criterion::IDP: return 8;
  }
  return 0;
}

CriterionConfig CriterionConfig::single(Criterion c) {
  CriterionConfig cfg;
  cfg.kappa[kappa_index(c)] = 1.0;
  return cfg;
}

void CriterionConfig::validate() const {
  for (std::size_t i = 0; i < kappa.size(); ++i) {
    if (!(kappa[i] >= 0.0) || !std::isfinite(kappa[i])) {
      throw std::invalid_argument("kappa" + std::to_string(i) + " must be a nonnegative number");
    }
  }
  const double total = std::accumulate(kappa.begin(), kappa.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "criterion weights must sum to 1 (got " << std::setprecision(12) << total << ")";
    throw std::invalid_argument(os.str());
  }
  for (double a : {alpha_dp, alpha_ap, alpha_ip, alpha_idp}) {
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("significance levels must lie in (0,1)");
  }
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw std::invalid_argument("W weights must be nonnegative");
  }
}

Vector default_weights(const ModelSpec& model, double quadratic_weight) {
  Vector w(model.size());
  for (int k = 0; k < model.size(); ++k) {
    switch (model.terms()[k].kind) {
      case Term::Kind::Intercept: w[k] = 0.0; break;
      case Term::Kind::Quadratic: w[k] = quadratic_weight; break;
      default: w[k] = 1.0; break;
    }
  }
  return w;
}

MomentMatrix criterion_moments(const Region& region, const ModelSpec& model, SphereMeasure measure) {
  if (region.kind == RegionKind::Sphere && measure == SphereMeasure::Surface) {
    return surface_moment_matrix(region, model);
  }
  return moment_matrix(region, model);
}

CriterionContext::CriterionContext(ModelSpec model, Region region, CriterionConfig config)
    : model_(std::move(model)), region_(region), config_(std::move(config)) {
  config_.validate();
  if (config_.weights.size() == 0) config_.weights = default_weights(model_);
  if (config_.weights.size() != model_.size()) {
    throw std::invalid_argument("W has " + std::to_string(config_.weights.size()) +
                                " entries, model has " + std::to_string(model_.size()) + " terms");
  }
  m_ = criterion_moments(region_, model_, config_.sphere_measure);
  m0_ = zero_intercept(m_);
  w_ = config_.weights.asDiagonal();
}

CriterionContext CriterionContext::with_kappa(const std::array<double, 9>& kappa) const {
  CriterionContext copy = *this;
  copy.config_.kappa = kappa;
  copy.config_.validate();
  return copy;
}

InformationSummary summarize(const CriterionContext& ctx, const Matrix& info, int runs,
                             int pure_error) {
  InformationSummary s;
  s.runs = runs;
  s.pure_error = pure_error;
  Eigen::LDLT<Matrix> ldlt(info);
  const Vector pivots = ldlt.vectorD();
  const double largest = pivots.size() ? pivots.cwiseAbs().maxCoeff() : 0.0;
  bool ok = ldlt.info() == Eigen::Success && largest > 0.0;
  for (Eigen::Index i = 0; ok && i < pivots.size(); ++i) ok = pivots[i] > kSingularPivot * largest;
  if (!ok) {
    s.singular = true;
    s.logdet_info = kNegInf;
    return s;
  }
  s.singular = false;
  s.logdet_info = pivots.array().log().sum();
  const Matrix inv = ldlt.solve(Matrix::Identity(info.rows(), info.cols()));
  s.trace_w = (ctx.weight_matrix().diagonal().asDiagonal() * inv).trace();
  s.trace_m = (ctx.moments().cwiseProduct(inv)).sum();
  s.trace_m0 = (ctx.difference_moments().cwiseProduct(inv)).sum();
  return s;
}

InformationSummary summarize(const CriterionContext& ctx, const Design& design) {
  const Matrix x = model_matrix(ctx.model(), design);
  const Matrix info = x.transpose() * x;
  const DfAccounting df = df_accounting(design, ctx.model());
  return summarize(ctx, info, design.runs(), df.pure_error);
}

CriterionValue compound_from_summary(const CriterionContext& ctx, const InformationSummary& s) {
  const auto& k = ctx.config().kappa;
  const auto& cfg = ctx.config();
  const int p = ctx.model().size();
  const int d = s.pure_error;
  CriterionValue out;
  out.defined = !s.singular;
  double log_value = 0.0;

  auto add = [&](std::string name, double exponent, double base, double log_base) {
    if (exponent == 0.0) return;
    out.components.push_back({std::move(name), exponent, base});
    log_value += exponent * log_base;
  };
  auto add_f = [&](const char* name, double exponent, int df1, double alpha) {
    if (exponent == 0.0) return;
    const double f = f_quantile_cached(df1, d, 1.0 - alpha);
    if (!std::isfinite(f)) out.defined = false;
    add(name, -exponent, f, std::log(f));
  };

  add_f("F(p-1,d;1-alpha1)", k[1], p - 1, cfg.alpha_dp);
  add_f("F(1,d;1-alpha2)", k[2], 1, cfg.alpha_ap);
  if (p > 1 && k[0] + k[1] != 0.0) {
    const double logdet_ds = s.logdet_info - std::log(static_cast<double>(s.runs));
    add("|X0'QX0|", (k[0] + k[1]) / (p - 1), std::exp(logdet_ds), logdet_ds);
  }
  const double t = s.runs - d;
  add("n-d", k[4], t, std::log(t));
  add_f("F(1,d;1-alpha3)", k[6], 1, cfg.alpha_ip);
  add_f("F(1,d;1-alpha4)", k[8], 1, cfg.alpha_idp);
  if (!s.singular) {
    add("tr(W A^-1)", -(k[2] + k[3]), s.trace_w, std::log(s.trace_w));
    add("tr(M A^-1)", -(k[5] + k[6]), s.trace_m, std::log(s.trace_m));
    add("tr(M0 A^-1)", -(k[7] + k[8]), s.trace_m0, std::log(s.trace_m0));
  }

  if (!out.defined || !std::isfinite(log_value)) {
    out.defined = false;
    out.value = 0.0;
    out.log_value = kNegInf;
    return out;
  }
  out.log_value = log_value;
  out.value = std::exp(log_value);
  return out;
}

CompoundEvaluator::CompoundEvaluator(const CriterionContext& ctx, int runs) : runs_(runs) {
  const auto& k = ctx.config().kappa;
  const auto& cfg = ctx.config();
  const int p = ctx.model().size();
  exp_det_ = p > 1 ? (k[0] + k[1]) / (p - 1) : 0.0;
  exp_df_ = k[4];
  exp_w_ = k[2] + k[3];
  exp_m_ = k[5] + k[6];
  exp_m0_ = k[7] + k[8];
  log_runs_ = runs > 0 ? std::log(static_cast<double>(runs)) : 0.0;
  needs_pure_error_ = k[1] != 0.0 || k[2] != 0.0 || k[6] != 0.0 || k[8] != 0.0;
  penalty_.assign(std::max(runs, 0) + 1, 0.0);
  for (int d = 0; d <= runs; ++d) {
    double pen = 0.0;
    auto add_f = [&](double exponent, int df1, double alpha) {
      if (exponent == 0.0) return;
      pen -= exponent * std::log(f_quantile_cached(df1, d, 1.0 - alpha));
    };
    add_f(k[1], p - 1, cfg.alpha_dp);
    add_f(k[2], 1, cfg.alpha_ap);
    add_f(k[6], 1, cfg.alpha_ip);
    add_f(k[8], 1, cfg.alpha_idp);
    penalty_[d] = pen;
  }
}

double CompoundEvaluator::log_value(const InformationSummary& s) const {
  if (s.singular || s.pure_error < 0 || s.pure_error > runs_) return kNegInf;
  double v = penalty_[s.pure_error];
  if (exp_det_ != 0.0) v += exp_det_ * (s.logdet_info - log_runs_);
  if (exp_df_ != 0.0) v += exp_df_ * std::log(static_cast<double>(s.runs - s.pure_error));
  if (exp_w_ != 0.0) v -= exp_w_ * std::log(s.trace_w);
  if (exp_m_ != 0.0) v -= exp_m_ * std::log(s.trace_m);
  if (exp_m0_ != 0.0) v -= exp_m0_ * std::log(s.trace_m0);
  return std::isfinite(v) ? v : kNegInf;
}

CriterionValue compound_value(const Design& design, const CriterionContext& ctx) {
  return compound_from_summary(ctx, summarize(ctx, design));
}

namespace {

double trace_criterion(const Design& design, const ModelSpec& model, const Matrix& m) {
  const Matrix x = model_matrix(model, design);
  const auto tr = trace_prod_inv(x.transpose() * x, m);
  if (!tr || !(*tr > 0.0)) return 0.0;
  return std::exp(safe_ratio_log(*tr));
}

double f_penalty(const Design& design, const ModelSpec& model, int df1, double alpha) {
  const int d = df_accounting(design, model).pure_error;
  return f_quantile_cached(df1, d, 1.0 - alpha);
}

}  // namespace

double ds_value(const Design& design, const ModelSpec& model) {
  const int p = model.size();
  if (p < 2 || design.runs() == 0) return 0.0;
  const Matrix x0 = model_matrix_without_intercept(model, design);
  // X0'QX0 = X0'X0 - (X0'1)(1'X0)/n
  const Vector col_sums = x0.colwise().sum().transpose();
  const Matrix centered = x0.transpose() * x0 - col_sums * col_sums.transpose() / design.runs();
  const double logdet = logdet_psd(0.5 * (centered + centered.transpose()));
  if (!std::isfinite(logdet)) return 0.0;
  return std::exp(logdet / (p - 1));
}

double dps_value(const Design& design, const ModelSpec& model, double alpha) {
  const double f = f_penalty(design, model, model.size() - 1, alpha);
  if (!std::isfinite(f)) return 0.0;
  return ds_value(design, model) / f;
}

double as_value(const Design& design, const ModelSpec& model, const Vector& weights) {
  return trace_criterion(design, model, weights.asDiagonal().toDenseMatrix());
}

double aps_value(const Design& design, const ModelSpec& model, const Vector& weights, double alpha) {
  const double f = f_penalty(design, model, 1, alpha);
  if (!std::isfinite(f)) return 0.0;
  return as_value(design, model, weights) / f;
}

double i_value(const Design& design, const ModelSpec& model, const MomentMatrix& m) {
  return trace_criterion(design, model, m);
}

double ip_value(const Design& design, const ModelSpec& model, const MomentMatrix& m, double alpha) {
  const double f = f_penalty(design, model, 1, alpha);
  if (!std::isfinite(f)) return 0.0;
  return i_value(design, model, m) / f;
}

double id_value(const Design& design, const ModelSpec& model, const MomentMatrix& m) {
  return trace_criterion(design, model, zero_intercept(m));
}

double idp_value(const Design& design, const ModelSpec& model, const MomentMatrix& m, double alpha) {
  const double f = f_penalty(design, model, 1, alpha);
  if (!std::isfinite(f)) return 0.0;
  return id_value(design, model, m) / f;
}

double single_value(const Design& design, const CriterionContext& ctx, Criterion c) {
  const auto& cfg = ctx.config();
  const auto& model = ctx.model();
  switch (c) {
    case Criterion::Ds: return ds_value(design, model);
    case Criterion::DPs: return dps_value(design, model, cfg.alpha_dp);
    case Criterion::As: return as_value(design, model, cfg.weights);
    case Criterion::APs: return aps_value(design, model, cfg.weights, cfg.alpha_ap);
    case Criterion::I: return i_value(design, model, ctx.moments());
    case Criterion::IP: return ip_value(design, model, ctx.moments(), cfg.alpha_ip);
    case Criterion::ID: return id_value(design, model, ctx.moments());
    case Criterion::IDP: return idp_value(design, model, ctx.moments(), cfg.alpha_idp);
  }
  return 0.0;
}

EfficiencyTable efficiency_table(const std::vector<LabeledDesign>& designs,
                                 const CriterionContext& ctx,
                                 const std::optional<std::array<double, 8>>& reference) {
  if (designs.empty()) throw std::invalid_argument("efficiency table needs at least one design");
  EfficiencyTable table;
  for (const auto& [label, design] : designs) {
    if (design.factors() != ctx.model().factors()) {
      throw std::invalid_argument("design '" + label + "' has the wrong number of factors");
    }
    EfficiencyRow row;
    row.label = label;
    row.df = df_accounting(design, ctx.model());
    for (std::size_t c = 0; c < kAllCriteria.size(); ++c) {
      row.values[c] = single_value(design, ctx, kAllCriteria[c]);
    }
    table.rows.push_back(std::move(row));
  }
  if (reference) {
    table.reference = *reference;
  } else {
    table.reference.fill(0.0);
    for (const auto& row : table.rows)
      for (std::size_t c = 0; c < 8; ++c) table.reference[c] = std::max(table.reference[c], row.values[c]);
  }
  for (auto& row : table.rows) {
    for (std::size_t c = 0; c < 8; ++c) {
      row.efficiency[c] = table.reference[c] > 0.0 ? 100.0 * row.values[c] / table.reference[c]
                                                   : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return table;
}

namespace {

std::string format_efficiency(double e) {
  if (std::isnan(e)) return "NA";
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << e;
  return os.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

}  // namespace

void write_efficiency_csv(std::ostream& os, const EfficiencyTable& table) {
  os << "design,pure_error_df,lack_of_fit_df";
  for (Criterion c : kAllCriteria) os << ',' << criterion_name(c);
  for (Criterion c : kAllCriteria) os << ",value_" << criterion_name(c);
  os << '\n';
  for (const auto& row : table.rows) {
    os << csv_field(row.label) << ',' << row.df.pure_error << ',' << row.df.lack_of_fit;
    for (double e : row.efficiency) os << ',' << format_efficiency(e);
    os << std::setprecision(10);
    for (double v : row.values) os << ',' << v;
    os << '\n';
  }
}

void write_efficiency_text(std::ostream& os, const EfficiencyTable& table) {
  std::size_t label_width = 6;
  for (const auto& row : table.rows) label_width = std::max(label_width, row.label.size());
  os << std::left << std::setw(static_cast<int>(label_width)) << "Design" << "  "
     << std::setw(10) << "df(PE,LoF)";
  for (Criterion c : kAllCriteria) os << std::right << std::setw(9) << criterion_name(c);
  os << '\n';
  for (const auto& row : table.rows) {
    const std::string df = "(" + std::to_string(row.df.pure_error) + "," +
                           std::to_string(row.df.lack_of_fit) + ")";
    os << std::left << std::setw(static_cast<int>(label_width)) << row.label << "  "
       << std::setw(10) << df;
    for (double e : row.efficiency) os << std::right << std::setw(9) << format_efficiency(e);
    os << '\n';
  }
  os << std::left;
}

void write_breakdown(std::ostream& os, const CriterionValue& value) {
  os << std::setprecision(12);
  os << "defined=" << (value.defined ? "true" : "false") << '\n';
  os << "value=" << value.value << '\n';
  os << "log_value=" << value.log_value << '\n';
  for (const auto& c : value.components) {
    os << "factor." << c.name << ".base=" << c.base << '\n';
    os << "factor." << c.name << ".exponent=" << c.exponent << '\n';
  }
}

}  // namespace rsdesign
