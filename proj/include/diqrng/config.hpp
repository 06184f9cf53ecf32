#pragma once

// Pipeline configuration as JSON. Every section is optional; absent keys keep
// their defaults, unknown keys are rejected.

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <string>

#include "diqrng/hypothesis.hpp"
#include "diqrng/rate.hpp"
#include "diqrng/source.hpp"
#include "diqrng/spacetime.hpp"
#include "diqrng/trial.hpp"

namespace diqrng {

struct PipelineConfig {
  SourceParams source{};
  RateParams rate{};
  SpotCheckConfig spot_check{};
  TimingConfig timing{};
  CertifyOptions certify{};
  std::uint64_t seed = 0;
};

// Every published parameter: source at mu = 0.07, rate inputs of the full run
// (eps = 3.8e-6, delta_est = sqrt(10/n), q = 1), timing with T_M1 = 55 ns.
PipelineConfig paper_config();

nlohmann::json to_json(const SourceParams& p);
nlohmann::json to_json(const RateParams& p);
nlohmann::json to_json(const SpotCheckConfig& p);
nlohmann::json to_json(const TimingConfig& p);
nlohmann::json to_json(const CertifyOptions& p);
nlohmann::json to_json(const PipelineConfig& p);

// Overlay j onto cfg in place.
void apply_json(const nlohmann::json& j, SourceParams& cfg);
void apply_json(const nlohmann::json& j, RateParams& cfg);
void apply_json(const nlohmann::json& j, SpotCheckConfig& cfg);
void apply_json(const nlohmann::json& j, TimingConfig& cfg);
void apply_json(const nlohmann::json& j, CertifyOptions& cfg);
void apply_json(const nlohmann::json& j, PipelineConfig& cfg);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

// FNV-1a 64 of the canonical (sorted-key, compact) serialization, as 16 hex digits.
std::string config_hash(const nlohmann::json& j);

}  // namespace diqrng
