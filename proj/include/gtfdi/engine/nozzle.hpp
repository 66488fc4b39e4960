#pragma once

#include <cmath>

namespace gtfdi::engine {

/// Convergent-nozzle mass flux per unit effective area [kg/(s m^2)] from
/// total pressure [Pa], total temperature [K], and back pressure [Pa].
/// Continuous across the choking boundary.
inline double nozzle_flux_per_area(double p_total_pa, double t_total_k, double p_back_pa,
                                   double gamma, double gas_constant) {
  const double kappa = (gamma - 1.0) / gamma;
  const double pr_crit = std::pow(0.5 * (gamma + 1.0), 1.0 / kappa);
  const double pr = p_total_pa / p_back_pa;
  const double base = p_total_pa * std::sqrt(gamma / (gas_constant * t_total_k));
  if (pr >= pr_crit) {
    // Choked: sonic throat.
    return base * std::pow(2.0 / (gamma + 1.0), (gamma + 1.0) / (2.0 * (gamma - 1.0)));
  }
  if (pr <= 1.0) return 0.0;  // no forward pressure margin
  const double mach_sq = 2.0 / (gamma - 1.0) * (std::pow(pr, kappa) - 1.0);
  const double mach = std::sqrt(mach_sq);
  return base * mach *
         std::pow(1.0 + 0.5 * (gamma - 1.0) * mach_sq, -(gamma + 1.0) / (2.0 * (gamma - 1.0)));
}

}  // namespace gtfdi::engine
