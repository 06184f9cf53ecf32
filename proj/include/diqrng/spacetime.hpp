#pragma once

// Spacelike-separation budget of a Bell-test layout. Distances in meters,
// durations in ns, c in m/ns. Slack > 0 passes; there is no tolerance band.

#include <array>
#include <string>
#include <vector>

namespace diqrng {

struct TimingConfig {
  double dist_sa = 0.0, dist_sb = 0.0;  // straight line source to station
  double len_sa = 0.0, len_sb = 0.0;    // effective optical paths
  double t_e = 0.0;
  double t_qrng1 = 0.0, t_qrng2 = 0.0;
  double t_delay1 = 0.0, t_delay2 = 0.0;
  double t_pc1 = 0.0, t_pc2 = 0.0;
  double t_m1 = 0.0, t_m2 = 0.0;
  double c = 0.299792458;

  void validate() const;
  friend bool operator==(const TimingConfig&, const TimingConfig&) = default;
};

// Published layout. T_M1 is quoted as 55 ns in one place and 50 ns in another.
TimingConfig paper_timing(double t_m1 = 55.0);

struct SlackTerm {
  std::string name;
  double ns;  // signed contribution to the right-hand side
};

struct SeparationCheck {
  std::string name;
  double lhs = 0.0;  // ns
  std::vector<SlackTerm> rhs_terms;
  double rhs = 0.0;
  double slack = 0.0;  // lhs - rhs
  bool pass = false;
  bool marginal = false;  // |slack| below 1e-9 ns
};

// Measurement event vs. the distant setting choice: [slack1, slack2].
std::array<SeparationCheck, 2> check_measurement_separation(const TimingConfig& cfg);
// Pair emission vs. each setting choice: [slack_A, slack_B].
std::array<SeparationCheck, 2> check_emission_separation(const TimingConfig& cfg);

}  // namespace diqrng
