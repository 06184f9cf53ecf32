#include "diqrng/spacetime.hpp"

#include <cmath>

#include "diqrng/error.hpp"

namespace diqrng {

namespace {

SeparationCheck finish(std::string name, double lhs, std::vector<SlackTerm> terms) {
  SeparationCheck check;
  check.name = std::move(name);
  check.lhs = lhs;
  for (const auto& t : terms) check.rhs += t.ns;
  check.rhs_terms = std::move(terms);
  check.slack = check.lhs - check.rhs;
  check.pass = check.slack > 0.0;
  check.marginal = std::abs(check.slack) < 1e-9;
  return check;
}

}  // namespace

void TimingConfig::validate() const {
  const double fields[] = {dist_sa, dist_sb, len_sa, len_sb, t_e,   t_qrng1, t_qrng2,
                           t_delay1, t_delay2, t_pc1, t_pc2, t_m1, t_m2};
  for (double v : fields) {
    if (!(v >= 0.0) || !std::isfinite(v)) fail(ErrorKind::Parameter, "timing distances and durations must be >= 0");
  }
  if (!(c > 0.0) || !std::isfinite(c)) fail(ErrorKind::Parameter, "light speed must be > 0");
  if (len_sa < dist_sa || len_sb < dist_sb) {
    fail(ErrorKind::Parameter, "optical path shorter than the straight-line distance");
  }
}

TimingConfig paper_timing(double t_m1) {
  TimingConfig cfg;
  cfg.dist_sa = 93.0;
  cfg.dist_sb = 90.0;
  cfg.len_sa = 194.0;
  cfg.len_sb = 175.0;
  cfg.t_e = 10.0;
  cfg.t_qrng1 = cfg.t_qrng2 = 96.0;
  cfg.t_delay1 = 270.0;
  cfg.t_delay2 = 230.0;
  cfg.t_pc1 = 112.0;
  cfg.t_pc2 = 100.0;
  cfg.t_m1 = t_m1;
  cfg.t_m2 = 100.0;
  return cfg;
}

std::array<SeparationCheck, 2> check_measurement_separation(const TimingConfig& cfg) {
  cfg.validate();
  const double lhs = (cfg.dist_sa + cfg.dist_sb) / cfg.c;
  const double path_diff = (cfg.len_sa - cfg.len_sb) / cfg.c;
  return {
      finish("measurement_1", lhs,
             {{"T_E", cfg.t_e},
              {"-(L_SA-L_SB)/c", -path_diff},
              {"T_QRNG1", cfg.t_qrng1},
              {"T_Delay1", cfg.t_delay1},
              {"T_PC1", cfg.t_pc1},
              {"T_M2", cfg.t_m2}}),
      finish("measurement_2", lhs,
             {{"T_E", cfg.t_e},
              {"(L_SA-L_SB)/c", path_diff},
              {"T_QRNG2", cfg.t_qrng2},
              {"T_Delay2", cfg.t_delay2},
              {"T_PC2", cfg.t_pc2},
              {"T_M1", cfg.t_m1}}),
  };
}

std::array<SeparationCheck, 2> check_emission_separation(const TimingConfig& cfg) {
  cfg.validate();
  return {
      finish("emission_A", cfg.dist_sa / cfg.c,
             {{"L_SA/c", cfg.len_sa / cfg.c}, {"-T_Delay1", -cfg.t_delay1}, {"-T_PC1", -cfg.t_pc1}}),
      finish("emission_B", cfg.dist_sb / cfg.c,
             {{"L_SB/c", cfg.len_sb / cfg.c}, {"-T_Delay2", -cfg.t_delay2}, {"-T_PC2", -cfg.t_pc2}}),
  };
}

}  // namespace diqrng
