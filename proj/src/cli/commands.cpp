#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "rsdesign/ccd.hpp"
#include "rsdesign/cli.hpp"
#include "rsdesign/csv_io.hpp"
#include "rsdesign/errors.hpp"
#include "rsdesign/optimizer.hpp"

namespace rsdesign {

namespace {

// Flags shared by several subcommands. Each records whether it was given so
// that only explicit flags override the config file.
struct Overrides {
  std::string config;
  std::string region;
  double rho = 0.0;
  CLI::Option* rho_opt = nullptr;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  int starts = 0;
  CLI::Option* starts_opt = nullptr;
  int max_passes = 0;
  CLI::Option* passes_opt = nullptr;
  double alpha = 0.0;
  CLI::Option* alpha_opt = nullptr;
  int threads = 0;
  CLI::Option* threads_opt = nullptr;
  double quadratic_weight = 0.0;
  CLI::Option* qw_opt = nullptr;
  std::string measure;
  std::string criterion;
  bool no_snap = false;
  std::string output;
};

void add_config(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "JSON configuration file");
}
void add_region(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--region", o.region, "Experimental region")->check(CLI::IsMember({"cube", "sphere"}));
  o.rho_opt = cmd->add_option("--rho", o.rho, "Sphere radius (default sqrt(q))");
}
void add_search(CLI::App* cmd, Overrides& o) {
  o.seed_opt = cmd->add_option("--seed", o.seed, "Random seed");
  o.starts_opt = cmd->add_option("--starts", o.starts, "Number of random starts");
  o.passes_opt = cmd->add_option("--max-passes", o.max_passes, "Exchange passes per start");
  o.threads_opt = cmd->add_option("--threads", o.threads, "Worker threads (0: default)");
}
void add_criterion(CLI::App* cmd, Overrides& o) {
  o.alpha_opt = cmd->add_option("--alpha", o.alpha, "Significance level for all P-criteria");
  o.qw_opt = cmd->add_option("--quadratic-weight", o.quadratic_weight,
                             "W weight of the pure quadratic terms");
  cmd->add_option("--measure", o.measure, "Sphere measure for I-type criteria")
      ->check(CLI::IsMember({"surface", "volume"}));
}

RunConfig base_config(const Overrides& o) {
  return o.config.empty() ? RunConfig{} : load_run_config(o.config);
}

void apply_common(RunConfig& cfg, const Overrides& o) {
  if (o.region == "cube") cfg.region_kind = RegionKind::Cube;
  if (o.region == "sphere") cfg.region_kind = RegionKind::Sphere;
  if (o.rho_opt && o.rho_opt->count()) cfg.rho = o.rho;
  if (o.seed_opt && o.seed_opt->count()) {
    cfg.seed = o.seed;
    cfg.graph.seed = o.seed;
  }
  if (o.starts_opt && o.starts_opt->count()) cfg.starts = o.starts;
  if (o.passes_opt && o.passes_opt->count()) cfg.max_passes = o.max_passes;
  if (o.threads_opt && o.threads_opt->count()) {
    cfg.threads = o.threads;
    cfg.graph.threads = o.threads;
  }
  if (o.alpha_opt && o.alpha_opt->count()) {
    auto& c = cfg.criterion;
    c.alpha_dp = c.alpha_ap = c.alpha_ip = c.alpha_idp = o.alpha;
  }
  if (o.qw_opt && o.qw_opt->count()) cfg.quadratic_weight = o.quadratic_weight;
  if (o.measure == "surface") cfg.criterion.sphere_measure = SphereMeasure::Surface;
  if (o.measure == "volume") cfg.criterion.sphere_measure = SphereMeasure::Volume;
  if (!o.criterion.empty()) {
    const auto c = parse_criterion(o.criterion);
    if (!c) throw ConfigError("unknown criterion '" + o.criterion + "'");
    cfg.criterion.kappa = CriterionConfig::single(*c).kappa;
  }
  if (o.no_snap) cfg.snap = false;
  if (!o.output.empty()) cfg.design_output = o.output;
}

// Writes to `path`, or to `fallback` when the path is empty.
template <class Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& fn) {
  if (path.empty()) {
    fn(fallback);
    return;
  }
  std::ofstream file(path);
  if (!file) throw ConfigError("cannot write '" + path + "'");
  fn(file);
  if (!file) throw ConfigError("error while writing '" + path + "'");
}

Design load_design(const std::string& path, const RunConfig& cfg) {
  Design d = read_design_file(path);
  if (cfg.region_kind == RegionKind::Sphere && cfg.snap) {
    d = snap_to_sphere(d, cfg.region().rho);
  }
  return d;
}

std::string stem(const std::string& path) { return std::filesystem::path(path).stem().string(); }

std::string fixed(double v, int digits = 6) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

// Counts points of a design by their number of nonzero coordinates.
std::string composition(const Design& d) {
  int center = 0, axial = 0, factorial = 0, other = 0;
  for (const auto& p : d.points()) {
    int nz = 0;
    for (double x : p) nz += std::abs(x) > 1e-9;
    if (nz == 0) ++center;
    else if (nz == 1) ++axial;
    else if (nz == d.factors()) ++factorial;
    else ++other;
  }
  std::ostringstream os;
  os << "centers=" << center << " axial=" << axial << " factorial=" << factorial
     << " other=" << other;
  return os.str();
}

std::pair<int, int> parse_range(const std::string& text) {
  const auto sep = text.find_first_of("-:.");
  try {
    if (sep == std::string::npos) {
      const int v = std::stoi(text);
      return {v, v};
    }
    const auto rest = text.find_first_not_of("-:.", sep);
    const int a = std::stoi(text.substr(0, sep));
    const int b = std::stoi(text.substr(rest));
    if (b < a) throw ConfigError("empty range '" + text + "'");
    return {a, b};
  } catch (const std::logic_error&) {
    throw ConfigError("cannot read range '" + text + "' (use e.g. 16..21)");
  }
}

// ---- optimize -------------------------------------------------------------

int cmd_optimize(const Overrides& o, int runs_flag, const std::string& report_path,
                 bool quiet, std::ostream& out, std::ostream& err) {
  RunConfig cfg = base_config(o);
  apply_common(cfg, o);
  if (runs_flag > 0) cfg.runs = runs_flag;
  if (!report_path.empty()) cfg.report_output = report_path;
  cfg.validate();
  if (cfg.runs < 1) throw ConfigError("runs must be given (config \"runs\" or --runs)");

  const CriterionContext ctx = cfg.context();
  SearchConfig search(ctx, candidate_set(cfg.q, cfg.region()), cfg.runs);
  search.starts = cfg.starts;
  search.max_passes = cfg.max_passes;
  search.seed = cfg.seed;
  search.threads = cfg.threads;
  std::function<void(const StartReport&)> progress;
  if (!quiet) {
    progress = [&err, total = cfg.starts](const StartReport& r) {
      err << "start " << r.start + 1 << "/" << total << ": passes=" << r.passes
          << " value=" << fixed(r.value, 10) << (r.defined ? "" : " (undefined)") << '\n';
    };
  }
  const SearchResult result = exchange_search(search, progress);
  const DfAccounting df = df_accounting(result.best, ctx.model());

  std::ostringstream report;
  report << "region=" << cfg.region().describe() << '\n';
  report << "runs=" << cfg.runs << '\n';
  report << "seed=" << cfg.seed << '\n';
  report << "starts=" << cfg.starts << '\n';
  report << "best_start=" << result.best_start << '\n';
  report << "evaluations=" << result.evaluations << '\n';
  report << "distinct_points=" << df.distinct << '\n';
  report << "pure_error_df=" << df.pure_error << '\n';
  report << "lack_of_fit_df=" << df.lack_of_fit << '\n';
  write_breakdown(report, result.value);
  for (Criterion c : kAllCriteria) {
    report << "single." << criterion_name(c) << "=" << fixed(single_value(result.best, ctx, c), 12)
           << '\n';
  }

  std::vector<std::string> comments;
  std::istringstream lines(report.str());
  for (std::string line; std::getline(lines, line);) comments.push_back(line);
  emit(cfg.design_output, out, [&](std::ostream& os) { write_design_csv(os, result.best, comments); });
  if (!cfg.report_output.empty()) {
    emit(cfg.report_output, out, [&](std::ostream& os) { os << report.str(); });
  }
  return kExitOk;
}

// ---- evaluate -------------------------------------------------------------

int cmd_evaluate(const Overrides& o, const std::vector<std::string>& files, int ccd_runs,
                 const std::string& reference, const std::string& format, std::ostream& out) {
  RunConfig cfg = base_config(o);
  apply_common(cfg, o);
  if (files.empty() && ccd_runs <= 0) throw ConfigError("no designs given");

  std::vector<LabeledDesign> designs;
  int q = cfg.q;
  for (const auto& f : files) {
    Design probe = read_design_file(f);
    if (q == 0) q = probe.factors();
    if (probe.factors() != q) {
      throw ConfigError("design '" + f + "' has " + std::to_string(probe.factors()) +
                        " factors, expected " + std::to_string(q));
    }
    cfg.q = q;
    designs.push_back({stem(f), load_design(f, cfg)});
  }
  if (q == 0) throw ConfigError("q must be given when evaluating only a CCD");
  cfg.q = q;
  cfg.validate();
  if (ccd_runs > 0) {
    try {
      designs.push_back({"CCD", central_composite(q, ccd_runs, cfg.region().max_radius(), q >= 5)});
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }

  std::optional<std::array<double, 8>> ref;
  if (!reference.empty()) {
    std::array<double, 8> r{};
    std::istringstream ss(reference);
    std::string cell;
    std::size_t i = 0;
    while (std::getline(ss, cell, ',')) {
      if (i >= r.size()) throw ConfigError("--reference takes 8 comma-separated values");
      try {
        r[i++] = std::stod(cell);
      } catch (const std::logic_error&) {
        throw ConfigError("--reference: '" + cell + "' is not a number");
      }
    }
    if (i != r.size()) throw ConfigError("--reference takes 8 comma-separated values");
    ref = r;
  }

  const EfficiencyTable table = efficiency_table(designs, cfg.context(), ref);
  emit(cfg.design_output, out, [&](std::ostream& os) {
    if (format == "text") {
      write_efficiency_text(os, table);
    } else {
      os << "# region: " << cfg.region().describe() << '\n';
      os << "# reference: " << (ref ? "supplied" : "best within set") << '\n';
      write_efficiency_csv(os, table);
    }
  });
  return kExitOk;
}

// ---- graph ----------------------------------------------------------------

struct GraphFlags {
  std::string variant, scale, axis, model;
  double interval = 0.0;
  CLI::Option* interval_opt = nullptr;
  int radii = 0, samples = 0, shell_samples = 0;
};

int cmd_graph(const Overrides& o, const GraphFlags& g, const std::string& file, std::ostream& out) {
  RunConfig cfg = base_config(o);
  apply_common(cfg, o);
  if (!g.variant.empty()) {
    const auto v = parse_graph_variant(g.variant);
    if (!v) throw ConfigError("unknown graph variant '" + g.variant + "'");
    cfg.graph.variant = *v;
    if (g.variant == "SEDG" || g.variant == "DSEDG") cfg.graph.scale = GraphScale::StandardError;
  }
  if (g.scale == "variance") cfg.graph.scale = GraphScale::Variance;
  if (g.scale == "se") cfg.graph.scale = GraphScale::StandardError;
  if (g.axis == "distance") cfg.graph.axis = GraphAxis::Distance;
  if (g.axis == "volume") cfg.graph.axis = GraphAxis::VolumeFraction;
  if (g.model == "intercept") cfg.intercept_only = true;
  if (g.model == "quadratic") cfg.intercept_only = false;
  if (g.interval_opt && g.interval_opt->count()) cfg.graph.interval_alpha = g.interval;
  if (g.radii > 0) cfg.graph.radii = g.radii;
  if (g.samples > 0) cfg.graph.samples = g.samples;
  if (g.shell_samples > 0) cfg.graph.shell_samples = g.shell_samples;

  Design probe = read_design_file(file);
  if (cfg.q == 0) cfg.q = probe.factors();
  if (cfg.q != probe.factors()) throw ConfigError("design and config disagree on q");
  cfg.validate();
  const Design design = load_design(file, cfg);
  const Region region = cfg.region();
  const GraphSeries series = graph_series(design, cfg.model(), region, cfg.graph);
  emit(cfg.design_output, out, [&](std::ostream& os) {
    write_graph_csv(os, series,
                    {{"design", stem(file)},
                     {"design_hash", file_hash(file)},
                     {"region", region.describe()},
                     {"model", cfg.intercept_only ? "intercept" : "quadratic"}});
  });
  return kExitOk;
}

// ---- verify-ccd -----------------------------------------------------------

int cmd_verify_ccd(const Overrides& o, int q, const std::string& runs_text,
                   const std::string& centers_text, bool quiet, std::ostream& out,
                   std::ostream& err) {
  RunConfig cfg = base_config(o);
  cfg.q = q;
  cfg.region_kind = RegionKind::Sphere;
  apply_common(cfg, o);
  cfg.region_kind = RegionKind::Sphere;
  cfg.criterion.kappa = CriterionConfig::single(Criterion::ID).kappa;
  if (q < 3 || q > 6) throw ConfigError("verify-ccd supports q in 3..6");
  cfg.validate();

  const bool half = q >= 5;
  const int core = ccd_core_runs(q, half);
  std::pair<int, int> range;
  if (!runs_text.empty() && !centers_text.empty()) {
    throw ConfigError("give either --runs or --centers, not both");
  } else if (!runs_text.empty()) {
    range = parse_range(runs_text);
  } else if (!centers_text.empty()) {
    const auto c = parse_range(centers_text);
    range = {core + c.first, core + c.second};
  } else {
    throw ConfigError("give --runs (e.g. 16..21) or --centers (e.g. 2..7)");
  }
  if (range.first < core) {
    throw ConfigError("a CCD in " + std::to_string(q) + " factors needs at least " +
                      std::to_string(core) + " runs");
  }

  const CriterionContext ctx = cfg.context();
  const CandidateSet candidates = candidate_set(q, cfg.region());
  out << "# verify-ccd region=" << cfg.region().describe()
      << " criterion=I_D starts=" << cfg.starts << " seed=" << cfg.seed
      << (half ? " factorial=half" : " factorial=full") << '\n';
  for (int n = range.first; n <= range.second; ++n) {
    const Design ccd = central_composite(q, n, cfg.region().rho, half);
    SearchConfig search(ctx, candidates, n);
    search.starts = cfg.starts;
    search.max_passes = cfg.max_passes;
    search.seed = cfg.seed;
    search.threads = cfg.threads;
    if (!quiet) err << "verifying q=" << q << " n=" << n << " ...\n";
    const OptimalityReport rep = verify_optimal(ccd, search);
    out << "q=" << q << " n=" << n << " centers=" << n - core
        << " ccd=" << fixed(rep.candidate_value, 10) << " best=" << fixed(rep.best_found, 10)
        << " gap=" << fixed(rep.relative_gap, 4) << ' '
        << (rep.not_improved ? "not improved upon" : "improved upon");
    if (!rep.not_improved) out << " (best: " << composition(rep.search.best) << ")";
    out << '\n';
  }
  return kExitOk;
}

// ---- candidates -----------------------------------------------------------

int cmd_candidates(const Overrides& o, int q, std::ostream& out) {
  RunConfig cfg = base_config(o);
  if (q > 0) cfg.q = q;
  apply_common(cfg, o);
  cfg.validate();
  const CandidateSet set = candidate_set(cfg.q, cfg.region());
  emit(cfg.design_output, out, [&](std::ostream& os) {
    write_design_csv(os, Design(cfg.q, set.points),
                     {"candidates for " + cfg.region().describe(),
                      "count: " + std::to_string(set.size())});
  });
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimum response-surface designs: search, evaluation and prediction graphs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "rsdesign 1.0.0");

  Overrides opt_o, eval_o, graph_o, ccd_o, cand_o;

  auto* optimize = app.add_subcommand("optimize", "Search for an optimum exact design");
  int opt_runs = 0;
  std::string opt_report;
  bool opt_quiet = false;
  add_config(optimize, opt_o);
  add_region(optimize, opt_o);
  add_search(optimize, opt_o);
  add_criterion(optimize, opt_o);
  optimize->add_option("-n,--runs", opt_runs, "Number of runs");
  optimize->add_option("--criterion", opt_o.criterion, "Optimize a single criterion, e.g. I_D");
  optimize->add_option("-o,--output", opt_o.output, "Design CSV (default: stdout)");
  optimize->add_option("--report", opt_report, "Also write the criterion report here");
  optimize->add_flag("-q,--quiet", opt_quiet, "No per-start progress on stderr");

  auto* evaluate = app.add_subcommand("evaluate", "Efficiency table for a set of designs");
  std::vector<std::string> eval_files;
  int eval_ccd = 0;
  std::string eval_reference, eval_format = "csv";
  add_config(evaluate, eval_o);
  add_region(evaluate, eval_o);
  add_criterion(evaluate, eval_o);
  evaluate->add_option("designs", eval_files, "Design CSV files");
  evaluate->add_option("--ccd", eval_ccd, "Also evaluate a CCD with this many runs");
  evaluate->add_option("--reference", eval_reference,
                       "Reference optimum values for the 8 criteria, comma-separated");
  evaluate->add_option("--format", eval_format, "Output format")->check(CLI::IsMember({"csv", "text"}));
  evaluate->add_flag("--no-snap", eval_o.no_snap, "Keep sphere coordinates as read");
  evaluate->add_option("-o,--output", eval_o.output, "Output file (default: stdout)");

  auto* graph = app.add_subcommand("graph", "Prediction variance graph data (CSV)");
  std::string graph_file;
  GraphFlags gf;
  add_config(graph, graph_o);
  add_region(graph, graph_o);
  graph_o.seed_opt = graph->add_option("--seed", graph_o.seed, "Random seed");
  graph_o.threads_opt = graph->add_option("--threads", graph_o.threads, "Worker threads");
  graph->add_option("design", graph_file, "Design CSV file")->required();
  graph->add_option("--variant", gf.variant, "VDG, DVDG, FDS, DFDS (SEDG, DSEDG imply --scale se)");
  graph->add_option("--scale", gf.scale, "Value scale")->check(CLI::IsMember({"variance", "se"}));
  gf.interval_opt = graph->add_option("--interval", gf.interval,
                                      "Interval variant with this alpha (needs replicates)");
  graph->add_option("--axis", gf.axis, "x axis")->check(CLI::IsMember({"distance", "volume"}));
  graph->add_option("--model", gf.model, "Model")->check(CLI::IsMember({"quadratic", "intercept"}));
  graph->add_option("--radii", gf.radii, "Radius grid size");
  graph->add_option("--samples", gf.samples, "Region samples for FDS/DFDS");
  graph->add_option("--shell-samples", gf.shell_samples, "Samples per radius for min/max");
  graph->add_flag("--no-snap", graph_o.no_snap, "Keep sphere coordinates as read");
  graph->add_option("-o,--output", graph_o.output, "Output file (default: stdout)");

  auto* verify = app.add_subcommand("verify-ccd", "Check CCDs for I_D-optimality by search");
  int ccd_q = 0;
  std::string ccd_runs, ccd_centers;
  bool ccd_quiet = false;
  add_config(verify, ccd_o);
  add_search(verify, ccd_o);
  ccd_o.rho_opt = verify->add_option("--rho", ccd_o.rho, "Sphere radius (default sqrt(q))");
  verify->add_option("--q", ccd_q, "Number of factors (3-6)")->required();
  verify->add_option("--runs", ccd_runs, "Run sizes, e.g. 16..21");
  verify->add_option("--centers", ccd_centers, "Center point counts, e.g. 3..6");
  verify->add_option("--measure", ccd_o.measure, "Sphere measure for I_D")
      ->check(CLI::IsMember({"surface", "volume"}));
  verify->add_flag("--quiet", ccd_quiet, "No progress on stderr");

  auto* candidates = app.add_subcommand("candidates", "Dump the candidate set");
  int cand_q = 0;
  add_config(candidates, cand_o);
  add_region(candidates, cand_o);
  candidates->add_option("--q", cand_q, "Number of factors");
  candidates->add_option("-o,--output", cand_o.output, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*optimize) return cmd_optimize(opt_o, opt_runs, opt_report, opt_quiet, out, err);
    if (*evaluate) return cmd_evaluate(eval_o, eval_files, eval_ccd, eval_reference, eval_format, out);
    if (*graph) return cmd_graph(graph_o, gf, graph_file, out);
    if (*verify) return cmd_verify_ccd(ccd_o, ccd_q, ccd_runs, ccd_centers, ccd_quiet, out, err);
    if (*candidates) return cmd_candidates(cand_o, cand_q, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const ContractError& e) {
    err << "cannot comply: " << e.what() << '\n';
    return kExitContract;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
  return kExitConfig;
}

}  // namespace rsdesign
