#include "diqrng/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "diqrng/behavior.hpp"
#include "diqrng/config.hpp"
#include "diqrng/hypothesis.hpp"
#include "diqrng/rate.hpp"
#include "diqrng/rng.hpp"
#include "diqrng/source.hpp"
#include "diqrng/spacetime.hpp"
#include "diqrng/toeplitz.hpp"
#include "diqrng/trial.hpp"
#include "diqrng/trial_io.hpp"

namespace diqrng {

using nlohmann::json;
namespace fs = std::filesystem;

ExitCode exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Parameter: return ExitCode::Parameter;
    case ErrorKind::Domain: return ExitCode::Domain;
    case ErrorKind::Format: return ExitCode::Format;
    case ErrorKind::Validation: return ExitCode::Validation;
    case ErrorKind::Convergence: return ExitCode::Convergence;
    case ErrorKind::Unsupported: return ExitCode::Unsupported;
    case ErrorKind::Io: return ExitCode::Io;
  }
  return ExitCode::Internal;
}

namespace {

struct Options {
  // shared
  std::string config_path;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string trials_path;
  std::string counts_path;
  bool relabel_rows = false;
  std::optional<std::uint64_t> blocks;
  // simulate
  std::optional<std::uint64_t> n_trials;
  std::string model = "quantum";
  std::optional<double> spot_check_p;
  // certify
  std::optional<std::uint64_t> block_size;
  std::string polytope;
  std::optional<double> alpha;
  // rate
  std::optional<std::uint64_t> rate_n;
  std::optional<double> jbar, omega, q, eps, delta;
  std::optional<std::int64_t> t_e;
  // rate-curve
  std::string n_list;
  // spacetime
  std::optional<double> t_m1;
  // extract
  std::string raw_path;
  std::optional<std::uint64_t> raw_bits;
  std::string seed_file;
  std::optional<std::uint64_t> out_bits;
  std::optional<double> hmin;
};

struct Context {
  PipelineConfig cfg;
  json cfg_json;
  std::string hash;
};

void require_file(const std::string& path, const char* what) {
  if (!fs::is_regular_file(path)) fail(ErrorKind::Io, std::string(what) + " not found: " + path);
}

Context load_context(const Options& o) {
  Context ctx;
  if (!o.preset.empty()) {
    if (o.preset != "paper") fail(ErrorKind::Parameter, "unknown preset '" + o.preset + "' (only 'paper')");
    ctx.cfg = paper_config();
  }
  if (!o.config_path.empty()) {
    require_file(o.config_path, "config file");
    apply_json(read_json_file(o.config_path), ctx.cfg);
  }
  if (o.seed) ctx.cfg.seed = *o.seed;
  if (o.rate_n) {
    ctx.cfg.rate.n = *o.rate_n;
  }
  if (o.jbar && o.omega) fail(ErrorKind::Parameter, "give either --jbar or --omega, not both");
  if (o.jbar) ctx.cfg.rate.omega_win = 0.75 + *o.jbar;
  if (o.omega) ctx.cfg.rate.omega_win = *o.omega;
  if (o.q) ctx.cfg.rate.q = *o.q;
  if (o.eps) ctx.cfg.rate.eps_s = ctx.cfg.rate.eps_ea = *o.eps;
  if (o.delta) ctx.cfg.rate.delta_est = *o.delta;
  if (o.t_e) ctx.cfg.rate.t_e = *o.t_e;
  if (o.t_m1) ctx.cfg.timing.t_m1 = *o.t_m1;
  if (!o.polytope.empty()) ctx.cfg.certify.null = null_polytope_from_string(o.polytope);
  if (o.block_size) ctx.cfg.certify.block_size = *o.block_size;
  ctx.cfg_json = to_json(ctx.cfg);
  ctx.hash = config_hash(ctx.cfg_json);
  return ctx;
}

json meta(const std::string& command, const Context& ctx) {
  return {{"tool", "diqrng"}, {"version", DIQRNG_VERSION}, {"command", command}, {"config_hash", ctx.hash}};
}

void emit(const json& j, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << j.dump(2) << '\n';
  } else {
    write_json_file(path, j);
  }
}

json game_json(const GameValue& gv) {
  return {{"jbar", gv.jbar}, {"win_prob", gv.win_prob}, {"n_trials", gv.n_trials}};
}

json ztest_json(const ZTestResult& z) {
  json j = json::object();
  for (int c = 0; c < 4; ++c) {
    j[std::string(ZTestResult::kLabels[c])] = {{"z", z.z[c]}, {"p_value", z.p_values[c]}, {"degenerate", z.degenerate[c]}};
  }
  return j;
}

json rate_json(const RateParams& p, const RateResult& r) {
  return {{"params", to_json(p)},
          {"p_est", p.p_est()},
          {"rate", r.rate},
          {"p_t_star", r.p_t_star},
          {"hmin_bound", r.hmin_bound},
          {"extractable_bits", r.extractable_bits},
          {"soundness", r.soundness},
          {"completeness_error", completeness_error(p.n, p.delta_est)},
          {"asymptotic_rate", asymptotic_rate(p.omega_win, p.q)}};
}

json plan_json(const ExtractionPlan& plan) {
  return {{"n", plan.n},
          {"m", plan.m},
          {"t_e", plan.t_e},
          {"block_count", plan.block_count},
          {"block_len", plan.block_len},
          {"fft_size", plan.fft_size},
          {"seed_length", plan.seed_length()},
          {"hash_failure", plan.hash_failure}};
}

json separation_json(const SeparationCheck& c) {
  json terms = json::array();
  for (const auto& t : c.rhs_terms) terms.push_back({{"term", t.name}, {"ns", t.ns}});
  return {{"name", c.name}, {"lhs_ns", c.lhs},   {"rhs_terms", terms},     {"rhs_ns", c.rhs},
          {"slack_ns", c.slack}, {"pass", c.pass}, {"marginal", c.marginal}};
}

json spacetime_json(const TimingConfig& t, bool& all_pass) {
  json checks = json::array();
  all_pass = true;
  for (const auto& c : check_measurement_separation(t)) {
    checks.push_back(separation_json(c));
    all_pass = all_pass && c.pass;
  }
  for (const auto& c : check_emission_separation(t)) {
    checks.push_back(separation_json(c));
    all_pass = all_pass && c.pass;
  }
  return {{"t_m1_used", t.t_m1}, {"checks", checks}, {"pass", all_pass}};
}

json certification_json(const CertificationReport& r, const ZTestResult& z) {
  json schedule = json::array();
  for (std::size_t k = 0; k < r.blocks; ++k) {
    schedule.push_back({{"block", k},
                        {"pbr", r.pbr_sources[k] == 0 ? "trivial" : "estimated"},
                        {"source_first_block", r.pbr_first_block[k]},
                        {"source_blocks", r.pbr_sources[k]}});
  }
  json zp = json::array();
  for (double p : z.p_values) zp.push_back(p);
  return {{"polytope", to_string(r.null)},
          {"p_value_log10", r.p.log10()},
          {"blocks", r.blocks},
          {"block_size", r.block_size},
          {"estimator", r.estimator == PbrEstimator::Cumulative ? "cumulative" : "previous_block"},
          {"pbr_schedule", schedule},
          {"convergence_gaps", r.convergence_gaps},
          {"block_log_scores", r.log_scores},
          {"running_log10_p", r.running_log10_p},
          {"ztest_pvalues", zp},
          {"ztest_labels", ZTestResult::kLabels},
          {"ztest", ztest_json(z)}};
}

// Counts from --trials, --counts, or the built-in published table.
CountsTable load_counts(const Options& o, std::optional<TrialStream>& trials) {
  CountsTable counts;
  if (!o.trials_path.empty()) {
    trials = read_dirt1_file(o.trials_path);
    counts = aggregate_trials(*trials);
  } else if (!o.counts_path.empty()) {
    counts = counts_from_json(read_json_file(o.counts_path));
  } else if (o.preset == "paper") {
    counts = published_counts();
  } else {
    fail(ErrorKind::Parameter, "no input: give --trials, --counts or --preset paper");
  }
  if (o.relabel_rows) counts = counts.with_rows_exchanged();
  return counts;
}

std::uint64_t wins_in(const CountsTable& counts) {
  std::uint64_t wins = 0;
  for (int s = 0; s < 4; ++s) {
    for (int o = 0; o < 4; ++o) {
      if (score_trial(s >> 1, s & 1, o >> 1, o & 1)) wins += counts.cells()[s][o];
    }
  }
  return wins;
}

struct AbortInfo {
  std::uint64_t sum_scores = 0;
  std::uint64_t n = 0;
  double threshold = 0.0;
  bool abort = false;
};

AbortInfo abort_info(const CountsTable& counts, const std::optional<TrialStream>& trials, const SpotCheckConfig& sc) {
  AbortInfo info;
  info.sum_scores = trials ? sum_scores(*trials) : wins_in(counts);
  info.n = trials ? trials->size() : counts.total();
  info.threshold = sc.threshold();
  info.abort = info.n == 0 || abort_decision(info.sum_scores, info.n, sc);
  return info;
}

json abort_json(const AbortInfo& a) {
  return {{"sum_scores", a.sum_scores}, {"n", a.n}, {"threshold", a.threshold}, {"abort", a.abort}};
}

// Two raw bits (a, b) per trial.
BitVector outcome_bits(const TrialStream& trials) {
  BitVector bits(2 * trials.size());
  const auto bytes = trials.bytes();
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    bits.set(2 * i, bytes[i] & 1);
    bits.set(2 * i + 1, bytes[i] & 2);
  }
  return bits;
}

std::vector<double> lhv_weights(const PipelineConfig& cfg) {
  BehaviorDist target;
  target.settings = cfg.certify.settings;
  target.cond = outcome_probabilities(cfg.source);
  return project_local_realistic(project_no_signaling(target).behavior).weights;
}

CertifyOptions certify_options(const PipelineConfig& cfg, const Options& o, std::size_t n_trials) {
  CertifyOptions opts = cfg.certify;
  if (o.blocks) {
    if (*o.blocks == 0) fail(ErrorKind::Parameter, "--blocks must be >= 1");
    opts.block_size = std::max<std::uint64_t>(1, (n_trials + *o.blocks - 1) / *o.blocks);
  }
  return opts;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const Context ctx = load_context(o);
  if (!o.n_trials) fail(ErrorKind::Parameter, "simulate needs --n");
  if (o.out.empty()) fail(ErrorKind::Parameter, "simulate needs --out");
  const std::uint64_t seed = ctx.cfg.seed;
  TrialStream trials;
  if (o.model == "quantum") {
    trials = simulate_trials(ctx.cfg.source, *o.n_trials, ctx.cfg.certify.settings, seed);
  } else if (o.model == "lhv") {
    trials = lhv_trials(lhv_weights(ctx.cfg), ctx.cfg.certify.settings, *o.n_trials, seed);
  } else {
    fail(ErrorKind::Parameter, "--model must be 'quantum' or 'lhv'");
  }
  json side = {{"meta", meta("simulate", ctx)}, {"n", *o.n_trials}, {"seed", seed}, {"model", o.model},
               {"predicted", game_json(predicted_game_value(ctx.cfg.source))}};
  if (o.spot_check_p) {
    const std::uint64_t relabel_seed = derive_seed(seed, ~std::uint64_t{0});
    trials = spot_check_relabel(trials, *o.spot_check_p, relabel_seed);
    side["spot_check"] = {{"p", *o.spot_check_p}, {"relabel_seed", relabel_seed},
                          {"test_probability", spot_check_test_probability(*o.spot_check_p)}};
  }
  write_dirt1_file(o.out, trials);
  side["trials_file"] = fs::path(o.out).filename().string();
  write_json_file(o.out + ".json", side);
  out << side.dump(2) << '\n';
  return 0;
}

int cmd_counts(const Options& o, std::ostream& out) {
  if (!o.trials_path.empty()) require_file(o.trials_path, "trial file");
  if (!o.counts_path.empty()) require_file(o.counts_path, "counts file");
  const Context ctx = load_context(o);
  std::optional<TrialStream> trials;
  const CountsTable counts = load_counts(o, trials);
  const GameValue gv = game_value_from_counts(counts);
  const AbortInfo ab = abort_info(counts, trials, ctx.cfg.spot_check);
  json j = {{"meta", meta("counts", ctx)},
            {"counts", counts_to_json(counts)},
            {"rows_exchanged", o.relabel_rows},
            {"game", game_json(gv)},
            {"abort", abort_json(ab)},
            {"ztest", ztest_json(ztest_no_signaling(counts))}};
  emit(j, o.out, out);
  return ab.abort ? 1 : 0;
}

int cmd_certify(const Options& o, std::ostream& out) {
  if (o.trials_path.empty()) fail(ErrorKind::Parameter, "certify needs --trials");
  require_file(o.trials_path, "trial file");
  const Context ctx = load_context(o);
  const TrialStream trials = read_dirt1_file(o.trials_path);
  if (trials.empty()) fail(ErrorKind::Validation, "trial file is empty");
  const CertifyOptions opts = certify_options(ctx.cfg, o, trials.size());
  const CertificationReport report = certify(trials, opts);
  json j = certification_json(report, ztest_no_signaling(aggregate_trials(trials)));
  j["meta"] = meta("certify", ctx);
  bool pass = true;
  if (o.alpha) {
    pass = report.p.log_p <= std::log(*o.alpha);
    j["alpha"] = *o.alpha;
    j["rejects_null"] = pass;
  }
  emit(j, o.out, out);
  return pass ? 0 : 1;
}

int cmd_rate(const Options& o, std::ostream& out) {
  const Context ctx = load_context(o);
  const RateResult r = r_opt(ctx.cfg.rate);
  json j = rate_json(ctx.cfg.rate, r);
  j["meta"] = meta("rate", ctx);
  emit(j, o.out, out);
  return r.extractable_bits >= 1 ? 0 : 1;
}

std::vector<std::uint64_t> parse_n_list(const std::string& s) {
  std::vector<std::uint64_t> ns;
  if (s.empty()) {
    for (int e = 24; e <= 56; ++e) ns.push_back(static_cast<std::uint64_t>(std::llround(std::pow(10.0, e / 4.0))));
    return ns;
  }
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || !(v >= 1.0) || v != std::floor(v) || v > 1.8e19) {
      fail(ErrorKind::Parameter, "bad entry in --n-list: '" + item + "'");
    }
    ns.push_back(static_cast<std::uint64_t>(v));
  }
  return ns;
}

int cmd_rate_curve(const Options& o, std::ostream& out) {
  const Context ctx = load_context(o);
  const auto points = rate_curve(ctx.cfg.rate, parse_n_list(o.n_list));
  std::ostringstream csv;
  csv << "# diqrng " << DIQRNG_VERSION << " rate-curve config_hash=" << ctx.hash << '\n';
  csv << "n,rate,total_bits\n" << std::setprecision(17);
  for (const auto& p : points) csv << p.n << ',' << p.rate << ',' << p.total_bits << '\n';
  if (o.out.empty() || o.out == "-") {
    out << csv.str();
  } else {
    std::ofstream f(o.out);
    if (!(f << csv.str())) fail(ErrorKind::Io, "cannot write " + o.out);
  }
  return 0;
}

int cmd_spacetime(const Options& o, std::ostream& out) {
  const Context ctx = load_context(o);
  bool pass = false;
  json j = spacetime_json(ctx.cfg.timing, pass);
  j["meta"] = meta("spacetime", ctx);
  j["timing"] = to_json(ctx.cfg.timing);
  emit(j, o.out, out);
  return pass ? 0 : 1;
}

int cmd_extract(const Options& o, std::ostream& out) {
  if (o.seed_file.empty()) fail(ErrorKind::Parameter, "extract needs --seed-file (seeds are never generated internally)");
  if (o.out.empty()) fail(ErrorKind::Parameter, "extract needs --out");
  if (o.raw_path.empty() == o.trials_path.empty()) fail(ErrorKind::Parameter, "extract needs exactly one of --raw, --trials");
  if (!o.raw_path.empty()) {
    require_file(o.raw_path, "raw bit file");
    if (!o.raw_bits) fail(ErrorKind::Parameter, "--raw needs --raw-bits");
  } else {
    require_file(o.trials_path, "trial file");
  }
  require_file(o.seed_file, "seed file");
  if (o.out_bits.has_value() == o.hmin.has_value()) fail(ErrorKind::Parameter, "extract needs exactly one of --m, --hmin");
  const Context ctx = load_context(o);

  const BitVector raw =
      o.raw_path.empty() ? outcome_bits(read_dirt1_file(o.trials_path)) : BitVector::read_file(o.raw_path, *o.raw_bits);
  const std::int64_t t_e = ctx.cfg.rate.t_e;
  const double hmin = o.hmin ? *o.hmin : static_cast<double>(*o.out_bits) + static_cast<double>(t_e);
  const ExtractionPlan plan = plan_extraction(hmin, t_e, raw.size(), o.blocks.value_or(0));
  const ToeplitzSeed seed(BitVector::read_file(o.seed_file, plan.seed_length()), plan.n, plan.m);
  const BitVector bits = extract_blocked_fft(raw, seed, plan.block_count);
  bits.write_file(o.out);
  const bool monobit = monobit_ok(bits);
  json j = {{"meta", meta("extract", ctx)},
            {"plan", plan_json(plan)},
            {"soundness_contribution", plan.hash_failure},
            {"ones", bits.popcount()},
            {"monobit_pass", monobit},
            {"output_file", fs::path(o.out).filename().string()}};
  write_json_file(o.out + ".json", j);
  out << j.dump(2) << '\n';
  return monobit ? 0 : 1;
}

int cmd_report(const Options& o, std::ostream& out) {
  if (!o.trials_path.empty()) require_file(o.trials_path, "trial file");
  if (!o.counts_path.empty()) require_file(o.counts_path, "counts file");
  const Context ctx = load_context(o);
  std::optional<TrialStream> trials;
  const CountsTable counts = load_counts(o, trials);
  const GameValue gv = game_value_from_counts(counts);
  const AbortInfo ab = abort_info(counts, trials, ctx.cfg.spot_check);
  const RateResult rate = r_opt(ctx.cfg.rate);
  bool spacetime_pass = false;
  const json st = spacetime_json(ctx.cfg.timing, spacetime_pass);

  json j = {{"meta", meta("report", ctx)},
            {"game", game_json(gv)},
            {"rows_exchanged", o.relabel_rows},
            {"abort", abort_json(ab)},
            {"rate", rate_json(ctx.cfg.rate, rate)},
            {"ztest", ztest_json(ztest_no_signaling(counts))},
            {"spacetime", st}};
  bool extract_ok = false;
  try {
    // Raw input is two outcome bits per trial.
    const ExtractionPlan plan = plan_extraction(rate.hmin_bound, ctx.cfg.rate.t_e, 2 * ctx.cfg.rate.n, o.blocks.value_or(0));
    j["extraction_plan"] = plan_json(plan);
    extract_ok = true;
  } catch (const Error& e) {
    j["extraction_plan"] = {{"error", e.what()}};
  }
  if (trials) {
    json cert = json::object();
    for (NullPolytope null : {NullPolytope::NS, NullPolytope::LR}) {
      CertifyOptions opts = certify_options(ctx.cfg, o, trials->size());
      opts.null = null;
      const CertificationReport r = certify(*trials, opts);
      cert[std::string(to_string(null))] = {{"p_value_log10", r.p.log10()}, {"blocks", r.blocks}};
    }
    j["certification"] = cert;
  }
  const bool pass = !ab.abort && spacetime_pass && extract_ok;
  j["pass"] = pass;
  emit(j, o.out, out);
  return pass ? 0 : 1;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config_path, "JSON config file");
  sub->add_option("--preset", o.preset, "parameter preset (paper)");
  sub->add_option("--seed", o.seed, "master RNG seed");
  sub->add_option("--out", o.out, "output path ('-' or absent: stdout)");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto report_error = [&](ExitCode code, std::string_view kind, const std::string& message) {
    err << json{{"error", {{"kind", kind}, {"exit_code", static_cast<int>(code)}, {"message", message}}}}.dump() << '\n';
    return static_cast<int>(code);
  };

  CLI::App app{"Device-independent QRNG certification and extraction toolkit", "diqrng"};
  app.set_version_flag("--version", std::string(DIQRNG_VERSION));
  app.require_subcommand(1, 1);
  Options o;

  auto* sim = app.add_subcommand("simulate", "simulate trials from the photon-pair source model");
  add_common(sim, o);
  sim->add_option("--n", o.n_trials, "number of trials")->check(CLI::NonNegativeNumber);
  sim->add_option("--model", o.model, "quantum (source model) or lhv (closest local model)");
  sim->add_option("--spot-check-p", o.spot_check_p, "redraw test flags with biased-input parameter p");

  auto* cnt = app.add_subcommand("counts", "aggregate trials into counts, game value and abort decision");
  add_common(cnt, o);
  cnt->add_option("--trials", o.trials_path, "DIRT1 trial file");
  cnt->add_option("--counts", o.counts_path, "counts JSON");
  cnt->add_flag("--relabel-rows", o.relabel_rows, "exchange the (x0,y1) and (x1,y0) rows");

  auto* cer = app.add_subcommand("certify", "PBR p-value against the NS or LR hypothesis");
  add_common(cer, o);
  cer->add_option("--trials", o.trials_path, "DIRT1 trial file");
  cer->add_option("--blocks", o.blocks, "split the trials into this many blocks");
  cer->add_option("--block-size", o.block_size, "trials per block");
  cer->add_option("--polytope", o.polytope, "NS or LR");
  cer->add_option("--alpha", o.alpha, "exit 1 unless p <= alpha");

  auto* rat = app.add_subcommand("rate", "certified randomness rate and extractable bits");
  add_common(rat, o);
  rat->add_option("--n", o.rate_n, "number of trials");
  rat->add_option("--jbar", o.jbar, "game value (win probability - 3/4)");
  rat->add_option("--omega", o.omega, "expected win probability");
  rat->add_option("--q", o.q, "test probability");
  rat->add_option("--eps", o.eps, "eps_s = eps_ea");
  rat->add_option("--delta", o.delta, "delta_est");
  rat->add_option("--t-e", o.t_e, "extractor failure exponent");

  auto* curve = app.add_subcommand("rate-curve", "total certified bits versus number of trials (CSV)");
  add_common(curve, o);
  curve->add_option("--n-list", o.n_list, "comma-separated trial counts");
  curve->add_option("--jbar", o.jbar, "game value");
  curve->add_option("--omega", o.omega, "expected win probability");
  curve->add_option("--q", o.q, "test probability");

  auto* spc = app.add_subcommand("spacetime", "spacelike-separation slacks");
  add_common(spc, o);
  spc->add_option("--tm1", o.t_m1, "override T_M1 in ns (published values: 55, 50)");

  auto* ext = app.add_subcommand("extract", "Toeplitz extraction");
  add_common(ext, o);
  ext->add_option("--raw", o.raw_path, "packed raw bits (MSB first)");
  ext->add_option("--raw-bits", o.raw_bits, "number of raw bits in --raw");
  ext->add_option("--trials", o.trials_path, "DIRT1 trial file; raw bits are a, b of each trial");
  ext->add_option("--seed-file", o.seed_file, "packed Toeplitz seed of n+m-1 bits");
  ext->add_option("--m", o.out_bits, "output bits");
  ext->add_option("--hmin", o.hmin, "min-entropy bound; m = floor(hmin) - t_e");
  ext->add_option("--t-e", o.t_e, "extractor failure exponent");
  ext->add_option("--blocks", o.blocks, "FFT block count (default: automatic)");

  auto* rep = app.add_subcommand("report", "headline summary");
  add_common(rep, o);
  rep->add_option("--trials", o.trials_path, "DIRT1 trial file");
  rep->add_option("--counts", o.counts_path, "counts JSON");
  rep->add_flag("--relabel-rows", o.relabel_rows, "exchange the (x0,y1) and (x1,y0) rows");
  rep->add_option("--blocks", o.blocks, "certification block count / extraction block count");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << DIQRNG_VERSION << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    return report_error(ExitCode::Usage, "usage", e.what());
  }

  try {
    if (sim->parsed()) return cmd_simulate(o, out);
    if (cnt->parsed()) return cmd_counts(o, out);
    if (cer->parsed()) return cmd_certify(o, out);
    if (rat->parsed()) return cmd_rate(o, out);
    if (curve->parsed()) return cmd_rate_curve(o, out);
    if (spc->parsed()) return cmd_spacetime(o, out);
    if (ext->parsed()) return cmd_extract(o, out);
    if (rep->parsed()) return cmd_report(o, out);
    return report_error(ExitCode::Usage, "usage", "no command given");
  } catch (const Error& e) {
    return report_error(exit_code_for(e.kind()), to_string(e.kind()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return report_error(ExitCode::Format, "format", e.what());
  } catch (const std::exception& e) {
    return report_error(ExitCode::Internal, "internal", e.what());
  }
}

}  // namespace diqrng
