#include "diqrng/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <string_view>

#include "diqrng/error.hpp"

namespace diqrng {

using nlohmann::json;

namespace {

void require_object(const json& j, std::string_view section, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) fail(ErrorKind::Format, "config section '" + std::string(section) + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) fail(ErrorKind::Format, "unknown key '" + key + "' in config section '" + std::string(section) + "'");
  }
}

template <typename T>
void take(const json& j, const char* key, T& field) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!it->is_number()) throw std::invalid_argument("number expected");
      field = it->template get<double>();
    } else if constexpr (std::is_integral_v<T>) {
      if (it->is_number_unsigned() || (it->is_number_integer() && std::is_signed_v<T>)) {
        field = it->template get<T>();
        return;
      }
      if (it->is_number_integer()) throw std::invalid_argument("non-negative integer expected");
      // Integers may be written as 6.895e10.
      if (!it->is_number()) throw std::invalid_argument("integer expected");
      const double v = it->template get<double>();
      if (v != std::floor(v)) throw std::invalid_argument("integer expected");
      if (std::is_unsigned_v<T> && v < 0) throw std::invalid_argument("non-negative integer expected");
      field = static_cast<T>(v);
    } else {
      field = it->template get<T>();
    }
  } catch (const std::exception& e) {
    fail(ErrorKind::Format, std::string("config key '") + key + "': " + e.what());
  }
}

json rule_json(const DoubleClickRule& r) { return {{"zero", r.zero}, {"one", r.one}, {"lost", r.lost}}; }

void apply_rule(const json& j, DoubleClickRule& r) {
  require_object(j, "double_click", {"zero", "one", "lost"});
  take(j, "zero", r.zero);
  take(j, "one", r.one);
  take(j, "lost", r.lost);
}

}  // namespace

PipelineConfig paper_config() {
  PipelineConfig cfg;
  cfg.source = paper_source_params();
  cfg.rate.n = 68'952'000'000ULL;
  cfg.rate.q = 1.0;
  cfg.rate.omega_win = 0.75 + 2.757e-4;
  cfg.rate.eps_s = cfg.rate.eps_ea = 3.8e-6;
  cfg.rate.delta_est = std::sqrt(10.0 / static_cast<double>(cfg.rate.n));
  cfg.rate.t_e = 100;
  cfg.spot_check.mode = InputMode::Uniform;
  cfg.spot_check.q = 1.0;
  cfg.spot_check.omega_exp = cfg.rate.omega_win;
  cfg.spot_check.delta_est = cfg.rate.delta_est;
  cfg.timing = paper_timing(55.0);
  return cfg;
}

json to_json(const SourceParams& p) {
  return {{"mu", p.mu},         {"r", p.r},           {"alice_deg", p.alice_deg}, {"bob_deg", p.bob_deg},
          {"eta_a", p.eta_a},   {"eta_b", p.eta_b},   {"p_dark", p.p_dark},       {"p_mis", p.p_mis},
          {"assign_a", rule_json(p.assign_a)}, {"assign_b", rule_json(p.assign_b)}};
}

json to_json(const RateParams& p) {
  return {{"n", p.n},         {"q", p.q},           {"omega_win", p.omega_win}, {"eps_s", p.eps_s},
          {"eps_ea", p.eps_ea}, {"delta_est", p.delta_est}, {"t_e", p.t_e}};
}

json to_json(const SpotCheckConfig& p) {
  return {{"mode", p.mode == InputMode::Biased ? "biased" : "uniform"},
          {"p", p.p},
          {"q", p.q},
          {"omega_exp", p.omega_exp},
          {"delta_est", p.delta_est}};
}

json to_json(const TimingConfig& p) {
  return {{"dist_sa", p.dist_sa}, {"dist_sb", p.dist_sb}, {"len_sa", p.len_sa},     {"len_sb", p.len_sb},
          {"t_e", p.t_e},         {"t_qrng1", p.t_qrng1}, {"t_qrng2", p.t_qrng2},   {"t_delay1", p.t_delay1},
          {"t_delay2", p.t_delay2}, {"t_pc1", p.t_pc1},   {"t_pc2", p.t_pc2},       {"t_m1", p.t_m1},
          {"t_m2", p.t_m2},       {"c", p.c}};
}

json to_json(const CertifyOptions& p) {
  return {{"polytope", to_string(p.null)},
          {"block_size", p.block_size},
          {"estimator", p.estimator == PbrEstimator::Cumulative ? "cumulative" : "previous_block"},
          {"settings", p.settings}};
}

json to_json(const PipelineConfig& p) {
  return {{"source", to_json(p.source)},   {"rate", to_json(p.rate)},       {"spot_check", to_json(p.spot_check)},
          {"timing", to_json(p.timing)},   {"certify", to_json(p.certify)}, {"seed", p.seed}};
}

void apply_json(const json& j, SourceParams& cfg) {
  require_object(j, "source",
                 {"mu", "r", "alice_deg", "bob_deg", "eta_a", "eta_b", "p_dark", "p_mis", "assign_a", "assign_b"});
  take(j, "mu", cfg.mu);
  take(j, "r", cfg.r);
  take(j, "alice_deg", cfg.alice_deg);
  take(j, "bob_deg", cfg.bob_deg);
  take(j, "eta_a", cfg.eta_a);
  take(j, "eta_b", cfg.eta_b);
  take(j, "p_dark", cfg.p_dark);
  take(j, "p_mis", cfg.p_mis);
  if (j.contains("assign_a")) apply_rule(j["assign_a"], cfg.assign_a);
  if (j.contains("assign_b")) apply_rule(j["assign_b"], cfg.assign_b);
}

void apply_json(const json& j, RateParams& cfg) {
  require_object(j, "rate", {"n", "q", "omega_win", "jbar", "eps_s", "eps_ea", "delta_est", "t_e"});
  if (j.contains("omega_win") && j.contains("jbar")) fail(ErrorKind::Format, "give either omega_win or jbar, not both");
  take(j, "n", cfg.n);
  take(j, "q", cfg.q);
  take(j, "omega_win", cfg.omega_win);
  if (j.contains("jbar")) {
    double jbar = 0.0;
    take(j, "jbar", jbar);
    cfg.omega_win = 0.75 + jbar;
  }
  take(j, "eps_s", cfg.eps_s);
  take(j, "eps_ea", cfg.eps_ea);
  take(j, "delta_est", cfg.delta_est);
  take(j, "t_e", cfg.t_e);
}

void apply_json(const json& j, SpotCheckConfig& cfg) {
  require_object(j, "spot_check", {"mode", "p", "q", "omega_exp", "delta_est"});
  if (j.contains("mode")) {
    std::string mode;
    take(j, "mode", mode);
    if (mode == "uniform") cfg.mode = InputMode::Uniform;
    else if (mode == "biased") cfg.mode = InputMode::Biased;
    else fail(ErrorKind::Format, "spot_check.mode must be 'uniform' or 'biased'");
  }
  take(j, "p", cfg.p);
  take(j, "q", cfg.q);
  take(j, "omega_exp", cfg.omega_exp);
  take(j, "delta_est", cfg.delta_est);
}

void apply_json(const json& j, TimingConfig& cfg) {
  require_object(j, "timing",
                 {"dist_sa", "dist_sb", "len_sa", "len_sb", "t_e", "t_qrng1", "t_qrng2", "t_delay1", "t_delay2",
                  "t_pc1", "t_pc2", "t_m1", "t_m2", "c"});
  take(j, "dist_sa", cfg.dist_sa);
  take(j, "dist_sb", cfg.dist_sb);
  take(j, "len_sa", cfg.len_sa);
  take(j, "len_sb", cfg.len_sb);
  take(j, "t_e", cfg.t_e);
  take(j, "t_qrng1", cfg.t_qrng1);
  take(j, "t_qrng2", cfg.t_qrng2);
  take(j, "t_delay1", cfg.t_delay1);
  take(j, "t_delay2", cfg.t_delay2);
  take(j, "t_pc1", cfg.t_pc1);
  take(j, "t_pc2", cfg.t_pc2);
  take(j, "t_m1", cfg.t_m1);
  take(j, "t_m2", cfg.t_m2);
  take(j, "c", cfg.c);
}

void apply_json(const json& j, CertifyOptions& cfg) {
  require_object(j, "certify", {"polytope", "block_size", "estimator", "settings"});
  if (j.contains("polytope")) {
    std::string s;
    take(j, "polytope", s);
    try {
      cfg.null = null_polytope_from_string(s);
    } catch (const Error& e) {
      fail(ErrorKind::Format, e.what());
    }
  }
  take(j, "block_size", cfg.block_size);
  if (j.contains("estimator")) {
    std::string s;
    take(j, "estimator", s);
    if (s == "previous_block") cfg.estimator = PbrEstimator::PreviousBlock;
    else if (s == "cumulative") cfg.estimator = PbrEstimator::Cumulative;
    else fail(ErrorKind::Format, "certify.estimator must be 'previous_block' or 'cumulative'");
  }
  take(j, "settings", cfg.settings);
}

void apply_json(const json& j, PipelineConfig& cfg) {
  require_object(j, "top level", {"source", "rate", "spot_check", "timing", "certify", "seed"});
  if (j.contains("source")) apply_json(j["source"], cfg.source);
  if (j.contains("rate")) apply_json(j["rate"], cfg.rate);
  if (j.contains("spot_check")) apply_json(j["spot_check"], cfg.spot_check);
  if (j.contains("timing")) apply_json(j["timing"], cfg.timing);
  if (j.contains("certify")) apply_json(j["certify"], cfg.certify);
  take(j, "seed", cfg.seed);
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

std::string config_hash(const json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace diqrng
