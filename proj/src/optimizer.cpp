#include "rsdesign/optimizer.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

#include "rsdesign/errors.hpp"
#include "rsdesign/numerics.hpp"
#include "parallel.hpp"
#include "random.hpp"

namespace rsdesign {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kImprovement = 1e-12;  // relative, i.e. absolute on the log scale
constexpr double kMinDetRatio = 1e-10;

using detail::bounded;

struct StartOutcome {
  std::vector<std::size_t> indices;
  double log_value = kNegInf;
  int passes = 0;
  std::vector<double> trace;
  long long evaluations = 0;
};

struct SearchData {
  const SearchConfig& cfg;
  Matrix features;  // p x C, column c = f(candidate c)
  CompoundEvaluator evaluator;
  int p;
  std::size_t candidates;
};

// One start of the exchange algorithm.
class ExchangeRun {
 public:
  ExchangeRun(const SearchData& data, std::vector<std::size_t> indices)
      : data_(data), idx_(std::move(indices)), counts_(data.candidates, 0) {
    for (std::size_t c : idx_) ++counts_[c];
    rebuild();
  }

  StartOutcome run() {
    StartOutcome out;
    if (defined()) out.trace.push_back(std::exp(log_value_));
    const int n = static_cast<int>(idx_.size());
    for (int pass = 0; pass < data_.cfg.max_passes; ++pass) {
      bool changed = false;
      for (int i = 0; i < n; ++i) {
        const bool was_defined = defined();
        if (was_defined ? improve_position(i) : repair_position(i)) {
          changed = true;
          if (defined()) out.trace.push_back(std::exp(log_value_));
        }
      }
      out.passes = pass + 1;
      if (!changed) break;
    }
    out.indices = idx_;
    out.log_value = log_value_;
    out.evaluations = evaluations_;
    return out;
  }

 private:
  bool defined() const { return log_value_ > kNegInf; }

  int distinct() const {
    int t = 0;
    for (int c : counts_) t += c > 0;
    return t;
  }

  Matrix information(const std::vector<std::size_t>& ids) const {
    Matrix sel(data_.p, static_cast<Eigen::Index>(ids.size()));
    for (std::size_t k = 0; k < ids.size(); ++k) sel.col(static_cast<Eigen::Index>(k)) = data_.features.col(ids[k]);
    return sel * sel.transpose();
  }

  void rebuild() {
    info_ = information(idx_);
    const int n = static_cast<int>(idx_.size());
    pure_error_ = n - distinct();
    summary_ = summarize(data_.cfg.criterion, info_, n, pure_error_);
    log_value_ = data_.evaluator.log_value(summary_);
    ++evaluations_;
    if (!defined()) {
      rank_ = psd_rank(info_);
      return;
    }
    rank_ = data_.p;
    const Matrix inv = info_.ldlt().solve(Matrix::Identity(data_.p, data_.p));
    ainv_f_ = inv * data_.features;
    g_ = data_.features.cwiseProduct(ainv_f_).colwise().sum().transpose();
    const auto& ctx = data_.cfg.criterion;
    prepare_trace(data_.evaluator.uses_trace_w(), inv, ctx.weight_matrix(), w_);
    prepare_trace(data_.evaluator.uses_trace_m(), inv, ctx.moments(), m_);
    prepare_trace(data_.evaluator.uses_trace_m0(), inv, ctx.difference_moments(), m0_);
  }

  struct TraceTerm {
    bool active = false;
    Matrix bf;   // A^-1 T A^-1 F
    Vector q;    // diag(F' A^-1 T A^-1 F)
    Vector h_o;  // F' A^-1 T A^-1 f_o for the position being scanned
  };

  void prepare_trace(bool active, const Matrix& inv, const Matrix& t, TraceTerm& term) {
    term.active = active;
    if (!active) return;
    term.bf = (inv * t * inv) * data_.features;
    term.q = data_.features.cwiseProduct(term.bf).colwise().sum().transpose();
  }

  static double updated_trace(double trace, const TraceTerm& term, std::size_t c, std::size_t o,
                              double g_cc, double g_oo, double g_co, double det_k) {
    const double h = (g_oo - 1.0) * term.q[c] - 2.0 * g_co * term.h_o[c] + (1.0 + g_cc) * term.q[o];
    return trace - h / det_k;
  }

  // Scores every candidate for position i with rank-2 updates of (X'X)^-1,
  // then confirms the best one with a full evaluation.
  bool improve_position(int i) {
    const std::size_t o = idx_[i];
    const Vector g_o = data_.features.transpose() * ainv_f_.col(static_cast<Eigen::Index>(o));
    for (TraceTerm* term : {&w_, &m_, &m0_}) {
      if (term->active) term->h_o = data_.features.transpose() * term->bf.col(static_cast<Eigen::Index>(o));
    }
    const double g_oo = g_[o];
    const int n = static_cast<int>(idx_.size());
    const int t_now = n - pure_error_;

    double best_log = log_value_;
    std::size_t best_c = o;
    InformationSummary trial = summary_;
    for (std::size_t c = 0; c < data_.candidates; ++c) {
      if (c == o) continue;
      ++evaluations_;
      const double g_cc = g_[c];
      const double g_co = g_o[c];
      const double det_k = (1.0 + g_cc) * (g_oo - 1.0) - g_co * g_co;
      const double ratio = -det_k;
      if (!(ratio > kMinDetRatio)) continue;
      trial.logdet_info = summary_.logdet_info + std::log(ratio);
      if (w_.active) trial.trace_w = updated_trace(summary_.trace_w, w_, c, o, g_cc, g_oo, g_co, det_k);
      if (m_.active) trial.trace_m = updated_trace(summary_.trace_m, m_, c, o, g_cc, g_oo, g_co, det_k);
      if (m0_.active) trial.trace_m0 = updated_trace(summary_.trace_m0, m0_, c, o, g_cc, g_oo, g_co, det_k);
      const int t_new = t_now - (counts_[o] == 1 ? 1 : 0) + (counts_[c] == 0 ? 1 : 0);
      trial.pure_error = n - t_new;
      const double v = data_.evaluator.log_value(trial);
      if (v > best_log + kImprovement) {
        best_log = v;
        best_c = c;
      }
    }
    if (best_c == o) return false;
    return try_exchange(i, best_c);
  }

  // Applies idx[i] = c if the full evaluation confirms a strict improvement.
  bool try_exchange(int i, std::size_t c) {
    const std::size_t o = idx_[i];
    const double old_log = log_value_;
    idx_[i] = c;
    --counts_[o];
    ++counts_[c];
    const int n = static_cast<int>(idx_.size());
    const Matrix info = information(idx_);
    const InformationSummary s = summarize(data_.cfg.criterion, info, n, n - distinct());
    const double v = data_.evaluator.log_value(s);
    ++evaluations_;
    if (v > old_log + kImprovement) {
      rebuild();
      return true;
    }
    idx_[i] = o;
    --counts_[c];
    ++counts_[o];
    return false;
  }

  // Undefined current design: accept the exchange that makes the criterion
  // defined with the best value, otherwise the one with the highest rank of
  // X'X, then the most pure-error df.
  bool repair_position(int i) {
    const std::size_t o = idx_[i];
    const int n = static_cast<int>(idx_.size());
    const Vector f_o = data_.features.col(static_cast<Eigen::Index>(o));
    const Matrix base = info_ - f_o * f_o.transpose();
    const int t_now = n - pure_error_;

    double best_log = kNegInf;
    int best_rank = rank_;
    int best_d = pure_error_;
    std::size_t best_c = o;
    for (std::size_t c = 0; c < data_.candidates; ++c) {
      if (c == o) continue;
      ++evaluations_;
      const Vector f_c = data_.features.col(static_cast<Eigen::Index>(c));
      const Matrix info = base + f_c * f_c.transpose();
      const int d = n - (t_now - (counts_[o] == 1 ? 1 : 0) + (counts_[c] == 0 ? 1 : 0));
      const InformationSummary s = summarize(data_.cfg.criterion, info, n, d);
      const double v = data_.evaluator.log_value(s);
      if (v > kNegInf) {
        if (v > best_log + kImprovement) {
          best_log = v;
          best_c = c;
        }
        continue;
      }
      if (best_log > kNegInf) continue;
      const int r = psd_rank(info);
      if (r > best_rank || (r == best_rank && d > best_d)) {
        best_rank = r;
        best_d = d;
        best_c = c;
      }
    }
    if (best_c == o) return false;
    idx_[i] = best_c;
    --counts_[o];
    ++counts_[best_c];
    rebuild();
    return true;
  }

  const SearchData& data_;
  std::vector<std::size_t> idx_;
  std::vector<int> counts_;
  Matrix info_;
  InformationSummary summary_;
  double log_value_ = kNegInf;
  int pure_error_ = 0;
  int rank_ = 0;
  Matrix ainv_f_;
  Vector g_;
  TraceTerm w_, m_, m0_;
  long long evaluations_ = 0;
};

std::vector<std::size_t> draw_start(const SearchConfig& cfg, int start) {
  if (start == 0 && !cfg.initial.empty()) return cfg.initial;
  std::mt19937_64 rng = detail::unit_stream(cfg.seed, static_cast<std::uint64_t>(start));
  std::vector<std::size_t> idx(static_cast<std::size_t>(cfg.runs));
  for (auto& c : idx) c = bounded(rng, cfg.candidates.size());
  return idx;
}

Design design_from_indices(const CandidateSet& set, const std::vector<std::size_t>& idx, int q) {
  std::vector<FactorPoint> pts;
  pts.reserve(idx.size());
  for (std::size_t c : idx) pts.push_back(set.points[c]);
  return Design(q, std::move(pts));
}

}  // namespace

int default_thread_count() {
  if (const char* env = std::getenv("RSDESIGN_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

SearchResult exchange_search(const SearchConfig& cfg,
                             const std::function<void(const StartReport&)>& progress) {
  const ModelSpec& model = cfg.criterion.model();
  const int p = model.size();
  if (cfg.candidates.size() == 0) throw std::invalid_argument("candidate set is empty");
  if (cfg.starts < 1) throw std::invalid_argument("starts must be at least 1");
  if (cfg.max_passes < 0) throw std::invalid_argument("max_passes must be nonnegative");
  if (cfg.runs < p) {
    throw InfeasibleError("run size " + std::to_string(cfg.runs) + " is below the " +
                          std::to_string(p) + " model parameters; no design can be estimable");
  }
  if (!cfg.initial.empty()) {
    if (static_cast<int>(cfg.initial.size()) != cfg.runs) {
      throw std::invalid_argument("initial design has the wrong number of runs");
    }
    for (std::size_t c : cfg.initial)
      if (c >= cfg.candidates.size()) throw std::invalid_argument("initial design index out of range");
  }

  SearchData data{cfg, Matrix(p, static_cast<Eigen::Index>(cfg.candidates.size())),
                  CompoundEvaluator(cfg.criterion, cfg.runs), p, cfg.candidates.size()};
  for (std::size_t c = 0; c < cfg.candidates.size(); ++c) {
    data.features.col(static_cast<Eigen::Index>(c)) = model.expand(cfg.candidates.points[c]);
  }

  std::vector<StartOutcome> outcomes(static_cast<std::size_t>(cfg.starts));
  std::mutex mu;
  const int threads = cfg.threads > 0 ? cfg.threads : default_thread_count();
  detail::parallel_for(cfg.starts, threads, [&](int s) {
    ExchangeRun run(data, draw_start(cfg, s));
    outcomes[s] = run.run();
    if (progress) {
      const auto& o = outcomes[s];
      std::lock_guard lock(mu);
      progress({s, o.passes, o.log_value > kNegInf ? std::exp(o.log_value) : 0.0,
                o.log_value > kNegInf});
    }
  });

  SearchResult result;
  int best = -1;
  for (int s = 0; s < cfg.starts; ++s) {
    const auto& o = outcomes[s];
    result.evaluations += o.evaluations;
    result.start_values.push_back(o.log_value > kNegInf ? std::exp(o.log_value) : 0.0);
    result.traces.push_back(o.trace);
    if (o.log_value > kNegInf && (best < 0 || o.log_value > outcomes[best].log_value)) best = s;
  }
  if (best < 0) {
    throw InfeasibleError("no start reached a design with a defined criterion (runs=" +
                          std::to_string(cfg.runs) + ", p=" + std::to_string(p) +
                          ", candidates=" + std::to_string(cfg.candidates.size()) + ")");
  }
  result.best_start = best;
  result.best_indices = outcomes[best].indices;
  result.best = design_from_indices(cfg.candidates, result.best_indices, model.factors());
  result.value = compound_value(result.best, cfg.criterion);
  return result;
}

OptimalityReport verify_optimal(const Design& design, const SearchConfig& cfg,
                                const std::function<void(const StartReport&)>& progress) {
  OptimalityReport report;
  report.search = exchange_search(cfg, progress);
  report.candidate_value = compound_value(design, cfg.criterion).value;
  report.best_found = report.search.value.value;
  report.relative_gap = report.best_found > 0.0
                            ? (report.best_found - report.candidate_value) / report.best_found
                            : 0.0;
  report.not_improved = report.candidate_value >= report.best_found * (1.0 - 1e-9);
  return report;
}

}  // namespace rsdesign
