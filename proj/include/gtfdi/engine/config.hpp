#pragma once

#include <cmath>
#include <string>

#include "gtfdi/engine/ambient.hpp"
#include "gtfdi/engine/nozzle.hpp"
#include "gtfdi/errors.hpp"
#include "gtfdi/io/config_text.hpp"
#include "gtfdi/types.hpp"

namespace gtfdi::engine {

/// Quadratic surface c0 + cu*u + cv*v + cuu*u^2 + cuv*u*v + cvv*v^2 over two
/// normalized deviations from the design point.
struct QuadraticMap {
  double c0 = 0.0, cu = 0.0, cv = 0.0, cuu = 0.0, cuv = 0.0, cvv = 0.0;

  double operator()(double u, double v) const {
    return c0 + cu * u + cv * v + cuu * u * u + cuv * u * v + cvv * v * v;
  }
};

/// Component-map validity box in normalized coordinates.
struct MapEnvelope {
  double n_rel_lo = 0.60, n_rel_hi = 1.40;    ///< corrected spool speed / design
  double pic_rel_lo = 0.45, pic_rel_hi = 1.60;///< compressor pressure ratio / design
  double pit_rel_lo = 0.50, pit_rel_hi = 1.50;///< turbine pressure ratio / design

  bool contains(double n_rel, double pic_rel, double pit_rel) const {
    return n_rel >= n_rel_lo && n_rel <= n_rel_hi && pic_rel >= pic_rel_lo &&
           pic_rel <= pic_rel_hi && pit_rel >= pit_rel_lo && pit_rel <= pit_rel_hi;
  }
};

/// Sensor and ambient noise levels, as percentages of the design-point
/// outputs and of sea-level standard conditions respectively.
struct NoiseLevels {
  Vec5 sd_output_pct = (Vec5() << 0.23, 0.164, 0.051, 0.097, 0.164).finished();
  Vec2 sd_ambient_pct = (Vec2() << 0.01, 0.01).finished();
};

/// All engine constants plus the calibrated design-point quantities. The
/// design point is an exact equilibrium of the model by construction: the
/// map scale factors and the nozzle area are solved from the steady mass,
/// energy, and shaft-power balances at the design flight condition.
struct EngineConfig {
  int format_version = 1;

  // Gas properties (ideal gas, single lumped gas path).
  double cp = 1004.5;   ///< specific heat at constant pressure [J/(kg K)]
  double gamma = 1.4;   ///< ratio of specific heats
  double cv() const { return cp / gamma; }
  double gas_constant() const { return cp - cv(); }

  AmbientModel ambient;

  // Combustion.
  double fuel_heating_j_kg = 43.0e6; ///< lower heating value [J/kg]
  double combustion_efficiency = 0.98;

  // Spool.
  double spool_inertia_kg_m2 = 2.0;
  double mech_efficiency = 0.99;

  // Gas-path volumes.
  double combustor_volume_m3 = 0.30;
  double mixer_volume_m3 = 0.60;
  double combustor_gas_mass_kg = 0.47; ///< lumped resident gas mass

  // Nozzle / bypass.
  double nozzle_cd = 1.0;
  double bypass_ratio = 0.0;
  double nozzle_area_m2 = 0.0; ///< calibrated

  // Design flight condition and cycle targets.
  double design_fuel_flow = 0.25;
  double design_altitude_ft = 16404.2;
  double design_mach = 0.85;
  double design_pressure_ratio = 6.0;   ///< compressor total pressure ratio
  double design_spool_rpm = 30000.0;    ///< corrected design spool speed
  double design_combustor_temp_k = 1200.0;
  double design_eta_c = 0.80;
  double design_eta_t = 0.85;

  // Calibrated design-point results.
  double flow_c_ref = 0.0;          ///< corrected compressor flow at design [kg/s]
  double flow_t_ref = 0.0;          ///< corrected turbine flow at design [kg/s]
  double design_turbine_pressure_ratio = 0.0;
  Vec4 design_state = Vec4::Zero(); ///< equilibrium state at design condition
  Vec5 design_outputs = Vec5::Zero();

  // Component maps, evaluated over normalized deviations:
  //   efficiency maps peak at the design point (zero linear terms);
  //   flow maps carry the speed-line slopes.
  QuadraticMap map_eta_c{0.80, 0.0, 0.0, -0.12, 0.10, -0.08};  // (n_rel-1, pic_rel-1)
  QuadraticMap map_eta_t{0.85, 0.0, 0.0, -0.10, 0.00, -0.05};  // (n_rel-1, pit_rel-1)
  QuadraticMap map_flow_c{1.0, 1.40, -0.30, -0.30, 0.0, -0.10};// relative, (n_rel-1, pic_rel-1)
  QuadraticMap map_flow_t{1.0, 0.0, 0.20, 0.0, 0.0, -0.08};    // relative, (n_rel-1, pit_rel-1)
  MapEnvelope envelope;

  NoiseLevels noise;

  /// Built-in defaults with the calibration applied.
  static EngineConfig builtin() {
    EngineConfig cfg;
    cfg.calibrate();
    return cfg;
  }

  /// Solve the map scale factors, turbine design pressure ratio, nozzle
  /// area, and design equilibrium state from the cycle balances at the
  /// design flight condition (healthy engine, all health factors one).
  void calibrate() {
    map_eta_c.c0 = design_eta_c;
    map_eta_t.c0 = design_eta_t;

    const double kappa = (gamma - 1.0) / gamma;
    const RamConditions ram = ram_conditions(design_altitude_ft, design_mach, ambient, gamma);
    const double p_cc = design_pressure_ratio * ram.p_d_bar;
    const double t_cc = design_combustor_temp_k;
    const double wf = design_fuel_flow;

    // Compressor exit temperature from the design pressure ratio.
    const double t_c =
        ram.t_d_k * (1.0 + (std::pow(design_pressure_ratio, kappa) - 1.0) / design_eta_c);
    if (t_cc <= t_c)
      throw ConfigError("design combustor temperature below compressor exit temperature");

    // Steady energy balance with the steady mass balance substituted in
    // gives the design core flow directly.
    const double wc =
        wf * (combustion_efficiency * fuel_heating_j_kg - cp * t_cc) / (cp * (t_cc - t_c));
    if (wc <= 0.0) throw ConfigError("design energy balance gives non-positive core flow");
    const double wt = wc + wf;

    // Shaft power balance fixes the turbine temperature drop.
    const double t_t = t_cc - wc * (t_c - ram.t_d_k) / (mech_efficiency * wt);
    const double expansion = 1.0 - (1.0 - t_t / t_cc) / design_eta_t;
    if (expansion <= 0.0 || expansion >= 1.0)
      throw ConfigError("design turbine expansion infeasible");
    design_turbine_pressure_ratio = std::pow(expansion, -1.0 / kappa);
    const double p_t = p_cc / design_turbine_pressure_ratio;

    // Corrected-flow scale factors referenced to sea-level standard.
    const double theta_d = ram.t_d_k / ambient.t_sl_k;
    const double delta_d = ram.p_d_bar / ambient.p_sl_bar;
    flow_c_ref = wc / (delta_d / std::sqrt(theta_d));
    flow_t_ref = wt / ((p_cc / ambient.p_sl_bar) / std::sqrt(t_cc / ambient.t_sl_k));

    // design_spool_rpm is a corrected speed; the equilibrium state carries
    // the physical speed at the design intake temperature.
    const double spool_phys = design_spool_rpm * std::sqrt(theta_d);

    // Nozzle area passes the design mixer inflow at the design back pressure.
    const double wn = wt + bypass_ratio / (bypass_ratio + 1.0) * wc;
    const double flux = nozzle_flux_per_area(p_t * 1e5, t_t, ram.p_amb_bar * 1e5, gamma,
                                             gas_constant());
    if (flux <= 0.0) throw ConfigError("design nozzle has no forward pressure margin");
    nozzle_area_m2 = wn / (nozzle_cd * flux);

    design_state << p_cc, spool_phys, t_cc, p_t;
    design_outputs << t_c, p_cc, spool_phys, t_t, p_t;
  }

  static EngineConfig load(const std::string& path) { return from_text(ConfigText::parse_file(path)); }
  void save(const std::string& path) const { to_text().save_file(path); }

  static EngineConfig from_text(const ConfigText& c) {
    EngineConfig e;
    e.format_version = static_cast<int>(c.number_or("meta.format_version", 1));
    e.cp = c.number("gas.cp");
    e.gamma = c.number("gas.gamma");
    e.ambient.t_sl_k = c.number("ambient.t_sl_k");
    e.ambient.p_sl_bar = c.number("ambient.p_sl_bar");
    e.ambient.lapse_k_per_km = c.number("ambient.lapse_k_per_km");
    e.ambient.gravity_m_s2 = c.number("ambient.gravity_m_s2");
    e.ambient.molar_mass_kg_mol = c.number("ambient.molar_mass_kg_mol");
    e.ambient.gas_constant_j_mol_k = c.number("ambient.gas_constant_j_mol_k");
    e.fuel_heating_j_kg = c.number("combustion.fuel_heating_j_kg");
    e.combustion_efficiency = c.number("combustion.efficiency");
    e.spool_inertia_kg_m2 = c.number("spool.inertia_kg_m2");
    e.mech_efficiency = c.number("spool.mech_efficiency");
    e.combustor_volume_m3 = c.number("volumes.combustor_m3");
    e.mixer_volume_m3 = c.number("volumes.mixer_m3");
    e.combustor_gas_mass_kg = c.number("volumes.combustor_gas_kg");
    e.nozzle_cd = c.number("nozzle.cd");
    e.bypass_ratio = c.number("nozzle.bypass_ratio");
    e.design_fuel_flow = c.number("design.fuel_flow");
    e.design_altitude_ft = c.number("design.altitude_ft");
    e.design_mach = c.number("design.mach");
    e.design_pressure_ratio = c.number("design.pressure_ratio");
    e.design_spool_rpm = c.number("design.spool_rpm");
    e.design_combustor_temp_k = c.number("design.combustor_temp_k");
    e.design_eta_c = c.number("design.eta_c");
    e.design_eta_t = c.number("design.eta_t");
    e.map_eta_c = read_map(c, "maps.eta_c");
    e.map_eta_t = read_map(c, "maps.eta_t");
    e.map_flow_c = read_map(c, "maps.flow_c");
    e.map_flow_t = read_map(c, "maps.flow_t");
    e.envelope.n_rel_lo = c.array("maps.envelope.n_rel")[0];
    e.envelope.n_rel_hi = c.array("maps.envelope.n_rel")[1];
    e.envelope.pic_rel_lo = c.array("maps.envelope.pic_rel")[0];
    e.envelope.pic_rel_hi = c.array("maps.envelope.pic_rel")[1];
    e.envelope.pit_rel_lo = c.array("maps.envelope.pit_rel")[0];
    e.envelope.pit_rel_hi = c.array("maps.envelope.pit_rel")[1];
    for (int i = 0; i < kOutputDim; ++i) e.noise.sd_output_pct[i] = c.array("noise.sd_output_pct")[i];
    for (int i = 0; i < 2; ++i) e.noise.sd_ambient_pct[i] = c.array("noise.sd_ambient_pct")[i];

    if (c.has("calibration.nozzle_area_m2")) {
      e.nozzle_area_m2 = c.number("calibration.nozzle_area_m2");
      e.flow_c_ref = c.number("calibration.flow_c_ref");
      e.flow_t_ref = c.number("calibration.flow_t_ref");
      e.design_turbine_pressure_ratio = c.number("calibration.turbine_pressure_ratio");
      const auto& xs = c.array("calibration.design_state");
      const auto& ys = c.array("calibration.design_outputs");
      for (int i = 0; i < kStateDim; ++i) e.design_state[i] = xs.at(i);
      for (int i = 0; i < kOutputDim; ++i) e.design_outputs[i] = ys.at(i);
    } else {
      e.calibrate();
    }
    return e;
  }

  ConfigText to_text() const {
    ConfigText c;
    c.set_number("meta.format_version", format_version);
    c.set_number("gas.cp", cp);
    c.set_number("gas.gamma", gamma);
    c.set_number("ambient.t_sl_k", ambient.t_sl_k);
    c.set_number("ambient.p_sl_bar", ambient.p_sl_bar);
    c.set_number("ambient.lapse_k_per_km", ambient.lapse_k_per_km);
    c.set_number("ambient.gravity_m_s2", ambient.gravity_m_s2);
    c.set_number("ambient.molar_mass_kg_mol", ambient.molar_mass_kg_mol);
    c.set_number("ambient.gas_constant_j_mol_k", ambient.gas_constant_j_mol_k);
    c.set_number("combustion.fuel_heating_j_kg", fuel_heating_j_kg);
    c.set_number("combustion.efficiency", combustion_efficiency);
    c.set_number("spool.inertia_kg_m2", spool_inertia_kg_m2);
    c.set_number("spool.mech_efficiency", mech_efficiency);
    c.set_number("volumes.combustor_m3", combustor_volume_m3);
    c.set_number("volumes.mixer_m3", mixer_volume_m3);
    c.set_number("volumes.combustor_gas_kg", combustor_gas_mass_kg);
    c.set_number("nozzle.cd", nozzle_cd);
    c.set_number("nozzle.bypass_ratio", bypass_ratio);
    c.set_number("design.fuel_flow", design_fuel_flow);
    c.set_number("design.altitude_ft", design_altitude_ft);
    c.set_number("design.mach", design_mach);
    c.set_number("design.pressure_ratio", design_pressure_ratio);
    c.set_number("design.spool_rpm", design_spool_rpm);
    c.set_number("design.combustor_temp_k", design_combustor_temp_k);
    c.set_number("design.eta_c", design_eta_c);
    c.set_number("design.eta_t", design_eta_t);
    write_map(c, "maps.eta_c", map_eta_c);
    write_map(c, "maps.eta_t", map_eta_t);
    write_map(c, "maps.flow_c", map_flow_c);
    write_map(c, "maps.flow_t", map_flow_t);
    c.set_array("maps.envelope.n_rel", {envelope.n_rel_lo, envelope.n_rel_hi});
    c.set_array("maps.envelope.pic_rel", {envelope.pic_rel_lo, envelope.pic_rel_hi});
    c.set_array("maps.envelope.pit_rel", {envelope.pit_rel_lo, envelope.pit_rel_hi});
    c.set_array("noise.sd_output_pct", {noise.sd_output_pct[0], noise.sd_output_pct[1],
                                        noise.sd_output_pct[2], noise.sd_output_pct[3],
                                        noise.sd_output_pct[4]});
    c.set_array("noise.sd_ambient_pct", {noise.sd_ambient_pct[0], noise.sd_ambient_pct[1]});
    c.set_number("calibration.nozzle_area_m2", nozzle_area_m2);
    c.set_number("calibration.flow_c_ref", flow_c_ref);
    c.set_number("calibration.flow_t_ref", flow_t_ref);
    c.set_number("calibration.turbine_pressure_ratio", design_turbine_pressure_ratio);
    c.set_array("calibration.design_state",
                {design_state[0], design_state[1], design_state[2], design_state[3]});
    c.set_array("calibration.design_outputs",
                {design_outputs[0], design_outputs[1], design_outputs[2], design_outputs[3],
                 design_outputs[4]});
    return c;
  }

 private:
  static QuadraticMap read_map(const ConfigText& c, const std::string& prefix) {
    const auto& a = c.array(prefix);
    if (a.size() != 6) throw ConfigError("map " + prefix + " needs 6 coefficients");
    return QuadraticMap{a[0], a[1], a[2], a[3], a[4], a[5]};
  }
  static void write_map(ConfigText& c, const std::string& prefix, const QuadraticMap& m) {
    c.set_array(prefix, {m.c0, m.cu, m.cv, m.cuu, m.cuv, m.cvv});
  }
};

}  // namespace gtfdi::engine
