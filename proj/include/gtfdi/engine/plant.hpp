#pragma once

#include <cmath>
#include <string>

#include "gtfdi/engine/ambient.hpp"
#include "gtfdi/engine/config.hpp"
#include "gtfdi/engine/nozzle.hpp"
#include "gtfdi/errors.hpp"
#include "gtfdi/types.hpp"

namespace gtfdi::engine {

/// Multiplicative component health factors, each in (0, 1].
struct HealthFactors {
  double eta_c = 1.0;  ///< compressor efficiency factor
  double eta_t = 1.0;  ///< turbine efficiency factor
  double flow_c = 1.0; ///< compressor flow capacity factor
  double flow_t = 1.0; ///< turbine flow capacity factor

  Vec4 to_vector() const { return Vec4{eta_c, eta_t, flow_c, flow_t}; }
};

/// Fuel flow plus intake conditions at one instant.
struct PlantInputs {
  double fuel = 0.0;
  RamConditions ram;
};

/// Diagnostics accumulated while evaluating the gas-path model.
struct EvalFlags {
  bool outside_envelope = false;
};

/// Raw component-map outputs at one gas-path condition (flows corrected to
/// sea-level standard at their reference stations).
struct MapOutputs {
  double eta_c = 0.0;
  double eta_t = 0.0;
  double flow_c_corr = 0.0;
  double flow_t_corr = 0.0;
  bool in_envelope = true;
};

/// Single-spool gas-path model with combustor and mixer storage volumes.
///
/// State x = [combustor pressure (bar), spool speed (rpm),
///            combustor temperature (K), turbine exit pressure (bar)].
/// Outputs y = [compressor exit temperature (K), compressor exit pressure
///             (bar), spool speed (rpm), turbine exit temperature (K),
///             turbine exit pressure (bar)].
class EngineModel {
 public:
  explicit EngineModel(EngineConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.nozzle_area_m2 <= 0.0) cfg_.calibrate();
    kappa_ = (cfg_.gamma - 1.0) / cfg_.gamma;
  }

  const EngineConfig& config() const { return cfg_; }

  /// Normalized map coordinates for a state at given intake conditions.
  void map_coordinates(const Vec4& x, const RamConditions& ram, double* n_rel, double* pic_rel,
                       double* pit_rel) const {
    const double theta_d = ram.t_d_k / cfg_.ambient.t_sl_k;
    *n_rel = (x[1] / std::sqrt(theta_d)) / cfg_.design_spool_rpm;
    *pic_rel = (x[0] / ram.p_d_bar) / cfg_.design_pressure_ratio;
    *pit_rel = (x[0] / x[3]) / cfg_.design_turbine_pressure_ratio;
  }

  /// Component maps at normalized coordinates. Flows are corrected values;
  /// physical flows are recovered with the station correction factors.
  MapOutputs performance_maps(double n_rel, double pic_rel, double pit_rel) const {
    MapOutputs m;
    const double u = n_rel - 1.0;
    const double v = pic_rel - 1.0;
    const double w = pit_rel - 1.0;
    m.eta_c = cfg_.map_eta_c(u, v);
    m.eta_t = cfg_.map_eta_t(u, w);
    m.flow_c_corr = cfg_.flow_c_ref * cfg_.map_flow_c(u, v);
    m.flow_t_corr = cfg_.flow_t_ref * cfg_.map_flow_t(u, w);
    m.in_envelope = cfg_.envelope.contains(n_rel, pic_rel, pit_rel);
    return m;
  }

  /// Gas-path state derivatives [bar/s, rpm/s, K/s, bar/s].
  Vec4 derivatives(const Vec4& x, double fuel, const RamConditions& ram,
                   const HealthFactors& lam, EvalFlags* flags = nullptr) const {
    const double p_cc = x[0], spool = x[1], t_cc = x[2], p_t = x[3];
    check_positive(p_cc, "combustor pressure");
    check_positive(spool, "spool speed");
    check_positive(t_cc, "combustor temperature");
    check_positive(p_t, "turbine exit pressure");
    check_positive(ram.p_d_bar, "intake total pressure");
    check_positive(ram.t_d_k, "intake total temperature");

    double n_rel, pic_rel, pit_rel;
    map_coordinates(x, ram, &n_rel, &pic_rel, &pit_rel);
    const MapOutputs maps = performance_maps(n_rel, pic_rel, pit_rel);
    if (flags && !maps.in_envelope) flags->outside_envelope = true;
    if (maps.eta_c <= 0.0) throw NumericalError("compressor efficiency map non-positive");
    if (maps.eta_t <= 0.0) throw NumericalError("turbine efficiency map non-positive");

    const double pic = p_cc / ram.p_d_bar;
    const double pit = p_cc / p_t;
    if (pit <= 0.0) throw NumericalError("turbine pressure ratio non-positive");

    // Station corrections: compressor flow referenced to intake totals,
    // turbine flow to combustor conditions.
    const double theta_d = ram.t_d_k / cfg_.ambient.t_sl_k;
    const double delta_d = ram.p_d_bar / cfg_.ambient.p_sl_bar;
    const double wc = maps.flow_c_corr * delta_d / std::sqrt(theta_d);
    const double wt =
        maps.flow_t_corr * (p_cc / cfg_.ambient.p_sl_bar) / std::sqrt(t_cc / cfg_.ambient.t_sl_k);

    const double eta_c_eff = lam.eta_c * maps.eta_c;
    const double eta_t_eff = lam.eta_t * maps.eta_t;
    const double wc_eff = lam.flow_c * wc;
    const double wt_eff = lam.flow_t * wt;

    const double t_c = ram.t_d_k * (1.0 + (std::pow(pic, kappa_) - 1.0) / eta_c_eff);
    const double t_t = t_cc * (1.0 - eta_t_eff * (1.0 - std::pow(pit, -kappa_)));

    const double cp = cfg_.cp, cv = cfg_.cv(), r_gas = cfg_.gas_constant();
    const double mass_net = wc_eff + fuel - wt_eff;  // kg/s into combustor
    const double energy_net = (cp * t_c * wc_eff +
                               cfg_.combustion_efficiency * cfg_.fuel_heating_j_kg * fuel -
                               cp * t_cc * wt_eff) -
                              cv * t_cc * mass_net;  // W into resident gas

    // Combustor storage: temperature from the energy balance, pressure from
    // the ideal-gas differential plus the charging term.
    const double dt_cc = energy_net / (cv * cfg_.combustor_gas_mass_kg);
    const double dp_cc = p_cc / t_cc * dt_cc +
                         cfg_.gamma * r_gas * t_cc / cfg_.combustor_volume_m3 * mass_net / 1e5;

    // Shaft: turbine delivery against compressor absorption.
    const double power_t = cfg_.mech_efficiency * wt_eff * cp * (t_cc - t_t);
    const double power_c = wc_eff * cp * (t_c - ram.t_d_k);
    const double omega_factor = (M_PI / 30.0) * (M_PI / 30.0);
    const double dn = (power_t - power_c) / (cfg_.spool_inertia_kg_m2 * spool * omega_factor);

    // Mixer storage: turbine discharge plus bypass in, nozzle out.
    const double beta = cfg_.bypass_ratio;
    const double wn = cfg_.nozzle_cd * cfg_.nozzle_area_m2 *
                      nozzle_flux_per_area(p_t * 1e5, t_t, ram.p_amb_bar * 1e5, cfg_.gamma, r_gas);
    const double dp_t = r_gas * t_t / cfg_.mixer_volume_m3 *
                        (wt_eff + beta / (beta + 1.0) * wc_eff - wn) / 1e5;

    Vec4 dx{dp_cc, dn, dt_cc, dp_t};
    if (!dx.allFinite()) throw NumericalError("non-finite gas-path derivative");
    return dx;
  }

  /// Sensed outputs (noise-free): [T_c, P_c, N, T_t, P_t].
  Vec5 outputs(const Vec4& x, const RamConditions& ram, const HealthFactors& lam) const {
    const double p_cc = x[0], spool = x[1], t_cc = x[2], p_t = x[3];
    check_positive(p_cc, "combustor pressure");
    check_positive(t_cc, "combustor temperature");
    check_positive(p_t, "turbine exit pressure");

    double n_rel, pic_rel, pit_rel;
    map_coordinates(x, ram, &n_rel, &pic_rel, &pit_rel);
    const MapOutputs maps = performance_maps(n_rel, pic_rel, pit_rel);
    const double eta_c_eff = lam.eta_c * maps.eta_c;
    const double eta_t_eff = lam.eta_t * maps.eta_t;
    const double pic = p_cc / ram.p_d_bar;
    const double pit = p_cc / p_t;
    const double t_c = ram.t_d_k * (1.0 + (std::pow(pic, kappa_) - 1.0) / eta_c_eff);
    const double t_t = t_cc * (1.0 - eta_t_eff * (1.0 - std::pow(pit, -kappa_)));
    Vec5 y{t_c, p_cc, spool, t_t, p_t};
    if (!y.allFinite()) throw NumericalError("non-finite output");
    return y;
  }

  /// One RK4 step with inputs sampled from `at(t)` at the substage times.
  template <class InputsAt>
  Vec4 step(const Vec4& x, double t, double dt, InputsAt&& at, const HealthFactors& lam,
            EvalFlags* flags = nullptr) const {
    const PlantInputs i0 = at(t);
    const PlantInputs ih = at(t + 0.5 * dt);
    const PlantInputs i1 = at(t + dt);
    const Vec4 k1 = derivatives(x, i0.fuel, i0.ram, lam, flags);
    const Vec4 k2 = derivatives(x + 0.5 * dt * k1, ih.fuel, ih.ram, lam, flags);
    const Vec4 k3 = derivatives(x + 0.5 * dt * k2, ih.fuel, ih.ram, lam, flags);
    const Vec4 k4 = derivatives(x + dt * k3, i1.fuel, i1.ram, lam, flags);
    return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  /// RK4 step with inputs held constant over the step.
  Vec4 step_const(const Vec4& x, double dt, const PlantInputs& in, const HealthFactors& lam,
                  EvalFlags* flags = nullptr) const {
    return step(
        x, 0.0, dt, [&](double) { return in; }, lam, flags);
  }

 private:
  static void check_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw NumericalError(std::string("non-physical value for ") + name);
  }

  EngineConfig cfg_;
  double kappa_;
};

}  // namespace gtfdi::engine
