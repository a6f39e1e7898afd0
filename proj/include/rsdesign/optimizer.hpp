#ifndef RSDESIGN_OPTIMIZER_HPP
#define RSDESIGN_OPTIMIZER_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "rsdesign/criteria.hpp"
#include "rsdesign/model.hpp"

namespace rsdesign {

struct SearchConfig {
  SearchConfig(CriterionContext criterion, CandidateSet candidates, int runs)
      : criterion(std::move(criterion)), candidates(std::move(candidates)), runs(runs) {}

  CriterionContext criterion;
  CandidateSet candidates;
  int runs;
  int starts = 100;
  int max_passes = 50;
  std::uint64_t seed = 20240607;
  /// Worker threads for independent starts; 0 picks the default
  /// (RSDESIGN_THREADS, else hardware concurrency).
  int threads = 0;
  /// Optional candidate indices used as the first start instead of a draw.
  std::vector<std::size_t> initial;
};

/// Progress of one finished start.
struct StartReport {
  int start = 0;
  int passes = 0;
  double value = 0.0;
  bool defined = false;
};

struct SearchResult {
  Design best;
  std::vector<std::size_t> best_indices;  // into the candidate set
  CriterionValue value;
  int best_start = 0;
  std::vector<double> start_values;          // final value per start (0 if undefined)
  std::vector<std::vector<double>> traces;   // accepted values within each start
  long long evaluations = 0;                 // full and rank-2 criterion evaluations
};

/// Thread count used when SearchConfig::threads is 0.
int default_thread_count();

/// Multistart point exchange over the candidate set.
///
/// Each start draws `runs` candidate points uniformly with replacement, then
/// sweeps the run positions; at every position all candidates are scored and
/// the best replacement is taken when it improves the criterion by more than
/// 1e-12 relative. A start ends after a pass without exchanges or after
/// max_passes. Starts whose criterion is undefined are first repaired by
/// exchanges that raise the rank of X'X, then the pure-error df.
///
/// Throws InfeasibleError when runs < p or no start reaches a design with a
/// defined criterion.
SearchResult exchange_search(const SearchConfig& cfg,
                             const std::function<void(const StartReport&)>& progress = {});

struct OptimalityReport {
  double candidate_value = 0.0;
  double best_found = 0.0;
  /// (best_found - candidate_value) / best_found; <= 0 when not improved upon.
  double relative_gap = 0.0;
  bool not_improved = false;
  SearchResult search;
};

/// Runs exchange_search and checks whether `design` is matched within 1e-9
/// relative. A positive outcome means "not improved upon", not a proof.
OptimalityReport verify_optimal(const Design& design, const SearchConfig& cfg,
                                const std::function<void(const StartReport&)>& progress = {});

}  // namespace rsdesign

#endif  // RSDESIGN_OPTIMIZER_HPP
