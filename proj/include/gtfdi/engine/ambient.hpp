#pragma once

#include <cmath>

namespace gtfdi::engine {

/// Constants of the ambient and intake model.
struct AmbientModel {
  double t_sl_k = 288.0;                ///< sea-level standard temperature [K]
  double p_sl_bar = 1.01325;            ///< sea-level standard pressure [bar]
  double lapse_k_per_km = 6.5;          ///< tropospheric lapse rate [K/km]
  double gravity_m_s2 = 9.80665;        ///< standard gravity [m/s^2]
  double molar_mass_kg_mol = 0.0289644; ///< molar mass of dry air [kg/mol]
  double gas_constant_j_mol_k = 8.31447;///< universal gas constant [J/(mol K)]
};

inline double ft_to_m(double feet) { return feet * 0.3048; }

/// Static and intake (ram) conditions at one flight condition.
struct RamConditions {
  double t_amb_k = 0.0;  ///< static ambient temperature
  double p_amb_bar = 0.0;///< static ambient pressure
  double t_d_k = 0.0;    ///< intake total temperature
  double p_d_bar = 0.0;  ///< intake total pressure
  double mach = 0.0;
};

inline double ambient_temperature_k(double altitude_m, const AmbientModel& m) {
  return m.t_sl_k - m.lapse_k_per_km * altitude_m / 1000.0;
}

/// Isothermal-column barometric pressure referenced to the sea-level
/// standard temperature.
inline double ambient_pressure_bar(double altitude_m, const AmbientModel& m) {
  const double exponent =
      -m.gravity_m_s2 * m.molar_mass_kg_mol * altitude_m / (m.t_sl_k * m.gas_constant_j_mol_k);
  return m.p_sl_bar * std::exp(exponent);
}

/// Ambient plus ideal ram-recovery intake totals at (altitude [ft], Mach).
inline RamConditions ram_conditions(double altitude_ft, double mach, const AmbientModel& m,
                                    double gamma) {
  RamConditions r;
  const double alt_m = ft_to_m(altitude_ft);
  r.mach = mach;
  r.t_amb_k = ambient_temperature_k(alt_m, m);
  r.p_amb_bar = ambient_pressure_bar(alt_m, m);
  const double stag = 1.0 + 0.5 * (gamma - 1.0) * mach * mach;
  r.t_d_k = r.t_amb_k * stag;
  r.p_d_bar = r.p_amb_bar * std::pow(stag, gamma / (gamma - 1.0));
  return r;
}

/// Ram conditions from perturbed static values (used when ambient process
/// noise is injected into the true plant).
inline RamConditions ram_from_static(double t_amb_k, double p_amb_bar, double mach, double gamma) {
  RamConditions r;
  r.mach = mach;
  r.t_amb_k = t_amb_k;
  r.p_amb_bar = p_amb_bar;
  const double stag = 1.0 + 0.5 * (gamma - 1.0) * mach * mach;
  r.t_d_k = t_amb_k * stag;
  r.p_d_bar = p_amb_bar * std::pow(stag, gamma / (gamma - 1.0));
  return r;
}

}  // namespace gtfdi::engine
