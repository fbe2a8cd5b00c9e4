#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "ocran/codebook.hpp"
#include "ocran/error.hpp"
#include "ocran/optimize.hpp"
#include "ocran/parallel.hpp"
#include "ocran/random.hpp"
#include "ocran/scenario.hpp"
#include "ocran/sumrate.hpp"
#include "ocran/verify.hpp"
#include "ocran/version.hpp"

using nlohmann::json;
using namespace ocran;

namespace {

struct Globals {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string out;
  int threads = 0;
  std::string format;
};

struct Context {
  Globals g;
  std::string command;
  std::vector<std::string> outputs;
  std::string scenario_hash;
};

std::string fmt(double v) {
  if (std::isnan(v)) throw NumericError("NaN reached an output value");
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

json num(double v) {
  if (std::isnan(v)) throw NumericError("NaN reached an output value");
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  return v;
}

json nums(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(num(x));
  return out;
}

std::vector<int> one_based(const std::vector<int>& v) {
  std::vector<int> out;
  for (int x : v) out.push_back(x + 1);
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw ValidationError(path + ": cannot write file");
  f << text;
}

// Data goes to --out when given, stdout otherwise.
void emit(Context& ctx, const std::string& text) {
  if (ctx.g.out.empty()) {
    std::cout << text;
    std::cout.flush();
  } else {
    write_text(ctx.g.out, text);
    ctx.outputs.push_back(ctx.g.out);
  }
}

std::string format_or(const Context& ctx, const std::string& fallback) {
  const std::string f = ctx.g.format.empty() ? fallback : ctx.g.format;
  if (f != "csv" && f != "json") throw ValidationError("format: must be csv or json");
  return f;
}

Scenario load(Context& ctx) {
  if (ctx.g.scenario.empty()) throw ValidationError("scenario: --scenario is required");
  Scenario sc = load_scenario(ctx.g.scenario);
  ctx.scenario_hash = content_hash(sc);
  return sc;
}

AuxChannels require_aux(const Scenario& sc, const std::string& aux_path) {
  if (!aux_path.empty()) return load_aux(aux_path, sc.discrete());
  if (!sc.aux) throw ValidationError("aux: aux channels required (embed channel.aux or pass --aux)");
  return *sc.aux;
}

QuantizerSetGaussian require_quantizers(const Scenario& sc, const std::string& path) {
  if (path.empty()) throw ValidationError("quantizers: quantizer matrices required (--quantizers)");
  return load_quantizers(path, sc.gaussian());
}

void print_warnings(const RateRegion& region) {
  for (const auto& w : region.warnings) std::cerr << "warning: " << w << '\n';
}

json region_summary(const RateRegion& region) {
  const auto tight = region.tightest_bounds();
  json s;
  s["users"] = region.num_users;
  s["relays"] = region.num_relays;
  s["empty"] = region.empty();
  s["per_user_max_bits"] = nums(region.per_user_max());
  s["sum_rate_bound_bits"] = num(tight.back());
  s["max_sum_rate_bits"] = num(region.max_sum_rate());
  return s;
}

std::string region_csv(const RateRegion& region) {
  std::ostringstream os;
  os << "T_mask,S_mask,bound_bits\n";
  for (const auto& c : region.constraints) os << c.pair.users << ',' << c.pair.relays << ',' << fmt(c.bound_bits) << '\n';
  return os.str();
}

json constraints_json(const RateRegion& region) {
  json arr = json::array();
  for (const auto& c : region.constraints) {
    arr.push_back({{"T_mask", c.pair.users}, {"S_mask", c.pair.relays}, {"bound_bits", num(c.bound_bits)}});
  }
  return arr;
}

json pairs_json(const std::vector<SubsetPair>& pairs) {
  json arr = json::array();
  for (const auto& p : pairs) arr.push_back({{"T_mask", p.users}, {"S_mask", p.relays}});
  return arr;
}

// ---- region ----

struct RegionArgs {
  std::string quantizers;
  std::string aux;
  std::string which = "thm3";
  std::string summary;
};

int cmd_region(Context& ctx, const RegionArgs& a) {
  Scenario sc = load(ctx);
  RateRegion region;
  if (sc.is_gaussian()) {
    region = region_gaussian(sc.gaussian(), require_quantizers(sc, a.quantizers), ctx.g.threads);
  } else {
    if (a.which != "thm1" && a.which != "thm3") throw ValidationError("which: must be thm1 or thm3");
    AuxChannels aux = require_aux(sc, a.aux);
    region = region_discrete(sc.discrete(), aux, a.which == "thm1" ? InnerBound::ci : InnerBound::general,
                             ctx.g.threads);
  }
  print_warnings(region);
  json summary = region_summary(region);
  if (format_or(ctx, "csv") == "json") {
    json doc = summary;
    doc["constraints"] = constraints_json(region);
    emit(ctx, doc.dump(2) + "\n");
  } else {
    emit(ctx, region_csv(region));
  }
  std::string summary_path = a.summary;
  if (summary_path.empty() && !ctx.g.out.empty() && format_or(ctx, "csv") == "csv") {
    summary_path = ctx.g.out + ".summary.json";
  }
  if (!summary_path.empty()) {
    write_text(summary_path, summary.dump(2) + "\n");
    ctx.outputs.push_back(summary_path);
  }
  return 0;
}

// ---- optimize ----

struct OptimizeArgs {
  std::string objective = "sum";
  std::vector<double> weights;
  int restarts = 4;
  int iters = 500;
  std::string method = "gradient";
  std::vector<int> card;
};

OptimizerConfig make_config(const Context& ctx, const OptimizeArgs& a) {
  OptimizerConfig cfg;
  if (a.objective == "sum") {
    cfg.objective = Objective::sum_rate;
  } else if (a.objective == "weighted") {
    cfg.objective = Objective::weighted;
    cfg.weights = a.weights;
  } else {
    throw ValidationError("objective: must be sum or weighted");
  }
  if (a.method == "gradient") {
    cfg.method = Method::projected_gradient;
  } else if (a.method == "coordinate") {
    cfg.method = Method::coordinate_ascent;
  } else if (a.method == "grid") {
    cfg.method = Method::grid;
  } else {
    throw ValidationError("method: must be gradient, coordinate or grid");
  }
  cfg.restarts = a.restarts;
  cfg.max_iters = a.iters;
  cfg.seed = ctx.g.seed;
  cfg.threads = ctx.g.threads;
  return cfg;
}

int cmd_optimize(Context& ctx, const OptimizeArgs& a) {
  Scenario sc = load(ctx);
  OptimizerConfig cfg = make_config(ctx, a);
  json doc;
  doc["objective"] = a.objective;
  if (cfg.objective == Objective::weighted) doc["weights"] = cfg.weights;
  doc["seed"] = ctx.g.seed;
  doc["restarts"] = cfg.restarts;
  if (sc.is_gaussian()) {
    GaussianOptimum opt = optimize_gaussian_quantizers(sc.gaussian(), cfg);
    doc["value_bits"] = num(opt.objective);
    doc["trace"] = nums(opt.trace);
    doc["converged"] = opt.converged;
    doc["best_restart"] = opt.restart;
    doc["iterations"] = opt.iterations;
    doc["quantizers"] = quantizers_to_json(opt.quantizers);
    doc["active"] = pairs_json(opt.active);
    if (!opt.converged) std::cerr << "warning: optimizer stopped at the iteration limit\n";
  } else {
    const auto& d = sc.discrete();
    std::vector<int> card = a.card.empty() ? d.output_sizes : a.card;
    DiscreteOptimum opt = optimize_discrete_aux(d, card, cfg);
    doc["value_bits"] = num(opt.objective);
    doc["trace"] = nums(opt.trace);
    doc["converged"] = opt.converged;
    doc["best_restart"] = opt.restart;
    doc["iterations"] = opt.iterations;
    doc["aux"] = aux_to_json(opt.aux, d);
    doc["active"] = pairs_json(opt.active);
    if (!opt.converged) std::cerr << "warning: optimizer stopped at the iteration limit\n";
  }
  emit(ctx, doc.dump(2) + "\n");
  return 0;
}

// ---- sumrate ----

struct SumrateArgs {
  std::string quantizers;
  std::string aux;
};

int cmd_sumrate(Context& ctx, const SumrateArgs& a) {
  Scenario sc = load(ctx);
  std::vector<std::pair<std::string, double>> rows;
  if (sc.is_gaussian()) {
    const auto& g = sc.gaussian();
    QuantizerSetGaussian q = require_quantizers(sc, a.quantizers);
    rows.emplace_back("sum_rate_bound_bits", sum_rate_bound_gaussian(g, q));
    rows.emplace_back("max_sum_rate_bits", region_gaussian(g, q, ctx.g.threads).max_sum_rate());
  } else {
    AuxChannels aux = require_aux(sc, a.aux);
    SumRateAnalyzer an(sc.discrete(), aux);
    const Mask all = full_mask(sc.num_relays());
    rows.emplace_back("jd_sum_rate_bits", an.jd_sum_rate());
    rows.emplace_back("input_information_bits", an.input_information(all));
    rows.emplace_back("compression_information_bits", an.compression_information(all));
  }
  if (format_or(ctx, "json") == "json") {
    json doc;
    for (const auto& [k, v] : rows) doc[k] = num(v);
    emit(ctx, doc.dump(2) + "\n");
  } else {
    std::ostringstream os;
    os << "quantity,value_bits\n";
    for (const auto& [k, v] : rows) os << k << ',' << fmt(v) << '\n';
    emit(ctx, os.str());
  }
  return 0;
}

// ---- extreme-points ----

struct ExtremeArgs {
  std::string aux;
  double rsum = std::numeric_limits<double>::quiet_NaN();
};

std::string ordering_label(const std::vector<int>& ordering) {
  std::string s;
  for (std::size_t i = 0; i < ordering.size(); ++i) s += (i ? "-" : "") + std::to_string(ordering[i] + 1);
  return s;
}

int cmd_extreme_points(Context& ctx, const ExtremeArgs& a) {
  Scenario sc = load(ctx);
  AuxChannels aux = require_aux(sc, a.aux);
  SumRateAnalyzer an(sc.discrete(), aux);
  const double r_sum = std::isnan(a.rsum) ? an.jd_sum_rate() : a.rsum;
  if (sc.num_relays() > 8) throw CapacityError("relays: at most 8 relays for extreme-points");
  std::vector<OrderingResult> results;
  for (const auto& ord : all_orderings(sc.num_relays())) results.push_back(an.swz_dominating_point(r_sum, ord));
  if (format_or(ctx, "csv") == "csv") {
    std::ostringstream os;
    os << "ordering,k,relay,C_tilde_bits\n";
    for (const auto& r : results) {
      for (std::size_t p = 0; p < r.ordering.size(); ++p) {
        os << ordering_label(r.ordering) << ',' << p + 1 << ',' << r.ordering[p] + 1 << ','
           << fmt(r.extreme_point[r.ordering[p]]) << '\n';
      }
    }
    emit(ctx, os.str());
  } else {
    json doc;
    doc["r_sum_bits"] = num(r_sum);
    doc["orderings"] = json::array();
    for (const auto& r : results) {
      doc["orderings"].push_back({{"ordering", one_based(r.ordering)},
                                  {"g_chain", nums(r.g_chain)},
                                  {"C_tilde_bits", nums(r.extreme_point)},
                                  {"j_star", r.j_star < 0 ? json(nullptr) : json(r.j_star + 1)},
                                  {"alpha", num(r.alpha)},
                                  {"dominating_sum_rate_bits", num(r.dominating_sum_rate)},
                                  {"dominating_fronthaul_bits", nums(r.dominating_fronthaul)},
                                  {"swz_order", one_based(r.swz_order)}});
    }
    emit(ctx, doc.dump(2) + "\n");
  }
  return 0;
}

// ---- swz-check ----

int cmd_swz_check(Context& ctx, const std::string& aux_path) {
  Scenario sc = load(ctx);
  AuxChannels aux = require_aux(sc, aux_path);
  SwzCheck check = swz_equals_jd(sc.discrete(), aux);
  json doc;
  doc["jd_sum_rate"] = num(check.jd_sum_rate);
  doc["best_ordering"] = one_based(check.best_ordering);
  doc["gap"] = num(check.gap);
  doc["swz_sum_rate"] = num(check.swz_sum_rate);
  doc["weights"] = nums(check.weights);
  emit(ctx, doc.dump(2) + "\n");
  return check.gap <= 1e-9 ? 0 : 1;
}

// ---- mc-check ----

struct McArgs {
  std::string quantizers;
  int t_mask = 0;
  int s_mask = 0;
  std::size_t samples = 100'000;
};

int cmd_mc_check(Context& ctx, const McArgs& a) {
  Scenario sc = load(ctx);
  const auto& g = sc.gaussian();
  QuantizerSetGaussian q = require_quantizers(sc, a.quantizers);
  SubsetPair pair{a.t_mask == 0 ? full_mask(g.num_users()) : static_cast<Mask>(a.t_mask), static_cast<Mask>(a.s_mask)};
  if (pair.users > full_mask(g.num_users())) throw ValidationError("T: mask exceeds the number of users");
  if (pair.relays > full_mask(g.num_relays())) throw ValidationError("S: mask exceeds the number of relays");
  const double analytic = information_term_gaussian(g, q, pair);
  McEstimate est = mc_mutual_information(g, q, pair, a.samples, ctx.g.seed);
  const bool ok = std::abs(est.mean_bits - analytic) <= 3.0 * est.std_error_bits + 1e-12;
  json doc;
  doc["T_mask"] = pair.users;
  doc["S_mask"] = pair.relays;
  doc["analytic_bits"] = num(analytic);
  doc["estimate_bits"] = num(est.mean_bits);
  doc["std_error_bits"] = num(est.std_error_bits);
  doc["samples"] = est.samples;
  doc["within_3se"] = ok;
  emit(ctx, doc.dump(2) + "\n");
  return ok ? 0 : 1;
}

// ---- codebook-check ----

struct CodebookArgs {
  double rate = 1.0;
  int n = 4;
  std::size_t trials = 100'000;
  int user = 1;
  std::vector<double> pmf;
  std::vector<int> time_sequence;
};

int cmd_codebook_check(Context& ctx, const CodebookArgs& a) {
  CodebookEnsemble ens;
  ens.rate_bits = a.rate;
  ens.blocklength = a.n;
  ens.seed = ctx.g.seed;
  if (!a.pmf.empty()) {
    ens.input_pmf.push_back(a.pmf);
  } else {
    Scenario sc = load(ctx);
    const auto& d = sc.discrete();
    if (a.user < 1 || a.user > d.num_users()) throw ValidationError("user: out of range");
    const int l = a.user - 1;
    for (int q = 0; q < d.num_q(); ++q) {
      auto first = d.input_pmf[l].begin() + static_cast<std::ptrdiff_t>(q) * d.input_sizes[l];
      ens.input_pmf.emplace_back(first, first + d.input_sizes[l]);
    }
  }
  if (a.time_sequence.empty()) {
    ens.time_sequence.assign(static_cast<std::size_t>(a.n), 0);
  } else {
    ens.time_sequence = a.time_sequence;
  }
  CodebookMarginal m = sample_codebook_marginal(ens, a.trials);
  bool point_mass = true;
  for (const auto& row : ens.input_pmf) {
    for (double p : row) point_mass = point_mass && (p == 0.0 || p == 1.0);
  }
  const bool ok = point_mass ? m.max_tv == 0.0 : m.max_tv <= 0.02;
  json doc;
  doc["codebook_size"] = m.codebook_size;
  doc["trials"] = m.trials;
  doc["max_tv"] = num(m.max_tv);
  doc["tv_per_position"] = nums(m.tv_per_position);
  doc["empirical"] = m.empirical;
  doc["joint_tv"] = m.joint_tv ? num(*m.joint_tv) : json(nullptr);
  doc["within_tolerance"] = ok;
  emit(ctx, doc.dump(2) + "\n");
  return ok ? 0 : 1;
}

// ---- verify ----

struct VerifyArgs {
  std::string suite = "all";
  std::size_t instances = 0;
  double perturb = 0.0;
  std::size_t mc_samples = 100'000;
};

int cmd_verify(Context& ctx, const VerifyArgs& a) {
  VerifyOptions opts;
  opts.seed = ctx.g.seed;
  opts.instances = a.instances;
  opts.gaussian_perturbation = a.perturb;
  opts.mc_samples = a.mc_samples;
  opts.threads = ctx.g.threads;
  std::vector<std::string> names;
  if (a.suite == "all") {
    names = suite_names();
  } else {
    default_instances(a.suite);
    names.push_back(a.suite);
  }
  json doc;
  doc["seed"] = ctx.g.seed;
  doc["suites"] = json::array();
  std::size_t failures = 0;
  std::vector<std::string> failed;
  for (const auto& name : names) {
    SuiteReport r = run_suite(name, opts);
    failures += r.failures;
    if (r.failures > 0) failed.push_back(name);
    doc["suites"].push_back({{"suite", r.suite},
                             {"cases", r.cases},
                             {"failures", r.failures},
                             {"worst_gap", num(r.worst_gap)},
                             {"seconds", r.seconds},
                             {"notes", r.notes}});
  }
  doc["failures"] = failures;
  doc["failed_suites"] = failed;
  emit(ctx, doc.dump(2) + "\n");
  for (const auto& name : failed) std::cerr << "verify: suite " << name << " failed\n";
  return failures == 0 ? 0 : 1;
}

// ---- boundary ----

struct BoundaryArgs {
  std::string quantizers;
  std::string aux;
  int points = 21;
  int restarts = 4;
  int iters = 500;
};

int cmd_boundary(Context& ctx, const BoundaryArgs& a) {
  Scenario sc = load(ctx);
  if (sc.num_users() != 2) throw ValidationError("users: boundary requires exactly 2 users");
  if (a.points < 2) throw ValidationError("points: at least 2 are required");
  std::vector<std::array<double, 4>> rows;
  for (int i = 0; i < a.points; ++i) {
    const double w1 = static_cast<double>(i) / (a.points - 1);
    const double w2 = 1.0 - w1;
    RateRegion region;
    if (sc.is_gaussian()) {
      if (!a.quantizers.empty()) {
        region = region_gaussian(sc.gaussian(), load_quantizers(a.quantizers, sc.gaussian()), ctx.g.threads);
      } else {
        OptimizerConfig cfg;
        cfg.objective = Objective::weighted;
        cfg.weights = {w1, w2};
        cfg.restarts = a.restarts;
        cfg.max_iters = a.iters;
        cfg.seed = split_seed(ctx.g.seed, static_cast<std::uint64_t>(i));
        cfg.threads = ctx.g.threads;
        region = region_gaussian(sc.gaussian(), optimize_gaussian_quantizers(sc.gaussian(), cfg).quantizers);
      }
    } else {
      region = region_discrete(sc.discrete(), require_aux(sc, a.aux), InnerBound::general, ctx.g.threads);
    }
    auto p = two_user_boundary_point(region, w1, w2);
    const double rates[] = {p[0], p[1]};
    if (!point_in_region(region, rates)) throw NumericError("boundary point outside its region");
    if (!rows.empty() && std::abs(rows.back()[2] - p[0]) < 1e-8 && std::abs(rows.back()[3] - p[1]) < 1e-8) continue;
    rows.push_back({w1, w2, p[0], p[1]});
  }
  if (format_or(ctx, "csv") == "csv") {
    std::ostringstream os;
    os << "w1,w2,R1_bits,R2_bits\n";
    for (const auto& r : rows) os << fmt(r[0]) << ',' << fmt(r[1]) << ',' << fmt(r[2]) << ',' << fmt(r[3]) << '\n';
    emit(ctx, os.str());
  } else {
    json arr = json::array();
    for (const auto& r : rows) arr.push_back({{"w1", r[0]}, {"w2", r[1]}, {"R1_bits", r[2]}, {"R2_bits", r[3]}});
    emit(ctx, json{{"points", arr}}.dump(2) + "\n");
  }
  return 0;
}

void write_manifest(const Context& ctx, double seconds, int code) {
  json m;
  m["command"] = ctx.command;
  m["scenario"] = {{"path", ctx.g.scenario}, {"content_hash", ctx.scenario_hash}};
  m["seed"] = ctx.g.seed;
  m["version"] = kVersion;
  m["wall_time_seconds"] = seconds;
  m["outputs"] = ctx.outputs;
  m["exit_code"] = code;
  if (ctx.g.out.empty()) {
    std::cerr << m.dump() << '\n';
  } else {
    std::ofstream f(ctx.g.out + ".manifest.json");
    if (f) f << m.dump(2) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rate regions of cloud radio access networks with oblivious relays"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  Context ctx;
  app.add_option("--scenario", ctx.g.scenario, "Scenario JSON file");
  app.add_option("--seed", ctx.g.seed, "Master seed");
  app.add_option("--out", ctx.g.out, "Output file (default stdout)");
  app.add_option("--threads", ctx.g.threads, "Worker threads (0 = all cores)");
  app.add_option("--format", ctx.g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  RegionArgs region_args;
  auto* region = app.add_subcommand("region", "Evaluate every rate constraint");
  region->add_option("--quantizers", region_args.quantizers, "Gaussian quantizer JSON {\"B\": [...]}");
  region->add_option("--aux", region_args.aux, "Aux channel JSON {\"aux\": [...]}");
  region->add_option("--which", region_args.which, "Discrete inner bound: thm1 or thm3");
  region->add_option("--summary", region_args.summary, "Summary JSON path");

  OptimizeArgs opt_args;
  auto* optimize = app.add_subcommand("optimize", "Optimize quantizers or aux channels");
  optimize->add_option("--objective", opt_args.objective, "sum or weighted");
  optimize->add_option("--weights", opt_args.weights, "Per-user weights")->delimiter(',');
  optimize->add_option("--restarts", opt_args.restarts, "Number of restarts");
  optimize->add_option("--iters", opt_args.iters, "Iteration limit per restart");
  optimize->add_option("--method", opt_args.method, "gradient, coordinate or grid");
  optimize->add_option("--card", opt_args.card, "Aux alphabet sizes (discrete)")->delimiter(',');

  SumrateArgs sum_args;
  auto* sumrate = app.add_subcommand("sumrate", "Sum-rate quantities");
  sumrate->add_option("--quantizers", sum_args.quantizers, "Gaussian quantizer JSON");
  sumrate->add_option("--aux", sum_args.aux, "Aux channel JSON");

  ExtremeArgs ext_args;
  auto* extreme = app.add_subcommand("extreme-points", "Fronthaul extreme points for every relay ordering");
  extreme->add_option("--aux", ext_args.aux, "Aux channel JSON");
  extreme->add_option("--rsum", ext_args.rsum, "Target sum-rate (default: joint-decoding sum-rate)");

  std::string swz_aux;
  auto* swz = app.add_subcommand("swz-check", "Compare successive Wyner-Ziv and joint decoding sum-rates");
  swz->add_option("--aux", swz_aux, "Aux channel JSON");

  McArgs mc_args;
  auto* mc = app.add_subcommand("mc-check", "Monte Carlo check of the Gaussian information term");
  mc->add_option("--quantizers", mc_args.quantizers, "Gaussian quantizer JSON");
  mc->add_option("--T", mc_args.t_mask, "User mask (default all users)");
  mc->add_option("--S", mc_args.s_mask, "Relay mask (default empty)");
  mc->add_option("--samples", mc_args.samples, "Number of samples");

  CodebookArgs cb_args;
  auto* codebook = app.add_subcommand("codebook-check", "Empirical marginal of a random codebook");
  codebook->add_option("--rate", cb_args.rate, "Rate in bits per symbol");
  codebook->add_option("--n", cb_args.n, "Blocklength");
  codebook->add_option("--trials", cb_args.trials, "Number of trials");
  codebook->add_option("--user", cb_args.user, "User whose input law is used (1-based)");
  codebook->add_option("--pmf", cb_args.pmf, "Input pmf instead of a scenario")->delimiter(',');
  codebook->add_option("--time-sequence", cb_args.time_sequence, "q_1..q_n (0-based)")->delimiter(',');

  VerifyArgs ver_args;
  auto* verify = app.add_subcommand("verify", "Run property suites");
  verify->add_option("--suite", ver_args.suite, "Suite name or all");
  verify->add_option("--instances", ver_args.instances, "Cases per suite (0 = suite default)");
  verify->add_option("--perturb-gaussian", ver_args.perturb, "Offset added to analytic Gaussian terms");
  verify->add_option("--mc-samples", ver_args.mc_samples, "Samples per Monte Carlo case");

  BoundaryArgs bd_args;
  auto* boundary = app.add_subcommand("boundary", "Two-user boundary over a weight sweep");
  boundary->add_option("--quantizers", bd_args.quantizers, "Fixed Gaussian quantizers (skip optimization)");
  boundary->add_option("--aux", bd_args.aux, "Aux channel JSON");
  boundary->add_option("--points", bd_args.points, "Number of weights");
  boundary->add_option("--restarts", bd_args.restarts, "Optimizer restarts per weight");
  boundary->add_option("--iters", bd_args.iters, "Optimizer iteration limit per weight");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const auto start = std::chrono::steady_clock::now();
  int code = 0;
  try {
    if (ctx.g.threads < 0) throw ValidationError("threads: must be nonnegative");
    ctx.g.threads = resolve_threads(ctx.g.threads);
    if (region->parsed()) {
      ctx.command = "region";
      code = cmd_region(ctx, region_args);
    } else if (optimize->parsed()) {
      ctx.command = "optimize";
      code = cmd_optimize(ctx, opt_args);
    } else if (sumrate->parsed()) {
      ctx.command = "sumrate";
      code = cmd_sumrate(ctx, sum_args);
    } else if (extreme->parsed()) {
      ctx.command = "extreme-points";
      code = cmd_extreme_points(ctx, ext_args);
    } else if (swz->parsed()) {
      ctx.command = "swz-check";
      code = cmd_swz_check(ctx, swz_aux);
    } else if (mc->parsed()) {
      ctx.command = "mc-check";
      code = cmd_mc_check(ctx, mc_args);
    } else if (codebook->parsed()) {
      ctx.command = "codebook-check";
      code = cmd_codebook_check(ctx, cb_args);
    } else if (verify->parsed()) {
      ctx.command = "verify";
      code = cmd_verify(ctx, ver_args);
    } else if (boundary->parsed()) {
      ctx.command = "boundary";
      code = cmd_boundary(ctx, bd_args);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    code = 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    code = 3;
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    code = 3;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(ctx, seconds, code);
  return code;
}
