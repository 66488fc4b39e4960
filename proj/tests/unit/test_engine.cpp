#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "gtfdi/engine/ambient.hpp"
#include "gtfdi/engine/config.hpp"
#include "gtfdi/engine/nozzle.hpp"
#include "gtfdi/engine/plant.hpp"
#include "gtfdi/engine/profile.hpp"
#include "gtfdi/engine/sensors.hpp"
#include "gtfdi/engine/trim.hpp"
#include "gtfdi/errors.hpp"
#include "gtfdi/util/rng.hpp"

using namespace gtfdi;
using namespace gtfdi::engine;
using doctest::Approx;

namespace {
const EngineConfig& cfg() {
  static EngineConfig c = EngineConfig::builtin();
  return c;
}
const EngineModel& model() {
  static EngineModel m(cfg());
  return m;
}
RamConditions cruise_ram() {
  return ram_conditions(cfg().design_altitude_ft, cfg().design_mach, cfg().ambient, cfg().gamma);
}
}  // namespace

TEST_CASE("ambient at sea level and rest is standard") {
  const AmbientModel m;
  CHECK(ambient_temperature_k(0.0, m) == 288.0);
  CHECK(ambient_pressure_bar(0.0, m) == 1.01325);
}

TEST_CASE("ambient at 16404.2 ft matches the lapse and barometric formulas") {
  // 16404.2 ft = 5000.00016 m; frozen from an independent evaluation.
  const AmbientModel m;
  const double alt_m = ft_to_m(16404.2);
  CHECK(alt_m == Approx(5000.0001600000005).epsilon(1e-12));
  CHECK(ambient_temperature_k(alt_m, m) == Approx(255.49999896).epsilon(1e-10));
  CHECK(ambient_pressure_bar(alt_m, m) == Approx(0.5599334441987734).epsilon(1e-12));
}

TEST_CASE("ram recovery factors") {
  const AmbientModel m;
  SUBCASE("static: no recovery") {
    const RamConditions r = ram_conditions(10000.0, 0.0, m, 1.4);
    CHECK(r.t_d_k == r.t_amb_k);
    CHECK(r.p_d_bar == r.p_amb_bar);
  }
  SUBCASE("sonic, gamma 1.4: T factor is exactly 1.2") {
    const RamConditions r = ram_conditions(0.0, 1.0, m, 1.4);
    CHECK(r.t_d_k == Approx(1.2 * 288.0).epsilon(1e-14));
  }
  SUBCASE("mach 0.85 recovery, frozen values") {
    const RamConditions r = ram_conditions(16404.2, 0.85, m, 1.4);
    CHECK(r.t_d_k / r.t_amb_k == Approx(1.1445).epsilon(1e-14));
    CHECK(r.t_d_k == Approx(292.41974880972003).epsilon(1e-12));
    CHECK(r.p_d_bar == Approx(0.8980317629613342).epsilon(1e-12));
  }
}

TEST_CASE("nozzle flux agrees with an independent pressure-ratio form") {
  // Oracle values computed from m_dot/A = P_t sqrt(2 g /(R T (g-1)) (pr^(2/g) - pr^((g+1)/g)))
  // and the choked sonic-throat expression, gamma = 1.4, R = 287.
  CHECK(nozzle_flux_per_area(2.0e5, 288.0, 1.0e5, 1.4, 287.0) ==
        Approx(476.33564653240245).epsilon(1e-12));
  CHECK(nozzle_flux_per_area(1.2e5, 288.0, 1.0e5, 1.4, 287.0) ==
        Approx(218.41817646472398).epsilon(1e-12));
  SUBCASE("zero below unit pressure ratio") {
    CHECK(nozzle_flux_per_area(1.0e5, 288.0, 1.0e5, 1.4, 287.0) == 0.0);
    CHECK(nozzle_flux_per_area(0.9e5, 288.0, 1.0e5, 1.4, 287.0) == 0.0);
  }
  SUBCASE("continuous across the choking boundary") {
    const double crit = std::pow(1.2, 3.5);  // ((g+1)/2)^(g/(g-1))
    const double lo = nozzle_flux_per_area(crit * 1.0e5 * (1 - 1e-9), 288.0, 1.0e5, 1.4, 287.0);
    const double hi = nozzle_flux_per_area(crit * 1.0e5 * (1 + 1e-9), 288.0, 1.0e5, 1.4, 287.0);
    CHECK(lo == Approx(hi).epsilon(1e-7));
  }
}

TEST_CASE("performance maps interpolate their calibration anchor") {
  const MapOutputs m = model().performance_maps(1.0, 1.0, 1.0);
  CHECK(m.eta_c == cfg().design_eta_c);
  CHECK(m.eta_t == cfg().design_eta_t);
  CHECK(m.flow_c_corr == cfg().flow_c_ref);
  CHECK(m.flow_t_corr == cfg().flow_t_ref);
}

TEST_CASE("quadratic map gradient matches central differences") {
  const QuadraticMap& q = cfg().map_flow_c;
  const double u = 0.13, v = -0.07, h = 1e-6;
  const double du_fd = (q(u + h, v) - q(u - h, v)) / (2 * h);
  const double dv_fd = (q(u, v + h) - q(u, v - h)) / (2 * h);
  CHECK(du_fd == Approx(q.cu + 2 * q.cuu * u + q.cuv * v).epsilon(1e-6));
  CHECK(dv_fd == Approx(q.cv + 2 * q.cvv * v + q.cuv * u).epsilon(1e-6));
}

TEST_CASE("design point is a stored equilibrium") {
  const Vec4 xdot = model().derivatives(cfg().design_state, cfg().design_fuel_flow,
                                        cruise_ram(), HealthFactors{});
  // componentwise against state scale
  for (int i = 0; i < kStateDim; ++i)
    CHECK(std::abs(xdot[i]) / std::max(1.0, std::abs(cfg().design_state[i])) < 1e-9);
}

TEST_CASE("derivatives react to degradation at fixed state") {
  HealthFactors lam;
  lam.flow_c = 0.97;
  const Vec4 xdot =
      model().derivatives(cfg().design_state, cfg().design_fuel_flow, cruise_ram(), lam);
  CHECK(xdot.norm() > 1e-3);
}

TEST_CASE("derivatives are smooth in the health factors") {
  // central difference at two step sizes: second-order convergence
  auto eval = [&](double eta_c) {
    HealthFactors lam;
    lam.eta_c = eta_c;
    return model().derivatives(cfg().design_state, cfg().design_fuel_flow, cruise_ram(), lam);
  };
  const double h1 = 1e-3, h2 = 5e-4;
  const Vec4 g1 = (eval(1.0 - 1e-3 + h1) - eval(1.0 - 1e-3 - h1)) / (2 * h1);
  const Vec4 g2 = (eval(1.0 - 1e-3 + h2) - eval(1.0 - 1e-3 - h2)) / (2 * h2);
  // both approximate the same derivative; difference shrinks ~4x
  CHECK((g1 - g2).norm() / std::max(1.0, g2.norm()) < 1e-4);
}

TEST_CASE("rk4 step holds the trim fixed point") {
  const Vec4 next = model().step_const(cfg().design_state, 0.01,
                                       PlantInputs{cfg().design_fuel_flow, cruise_ram()},
                                       HealthFactors{});
  for (int i = 0; i < kStateDim; ++i)
    CHECK(std::abs(next[i] - cfg().design_state[i]) /
              std::max(1.0, std::abs(cfg().design_state[i])) <
          1e-8);
}

TEST_CASE("rk4 convergence order on a fuel transient") {
  // 1 s of +10% fuel from trim, integrated at dt, dt/2, dt/4: global error
  // should drop ~16x per halving.
  const PlantInputs in{cfg().design_fuel_flow * 1.10, cruise_ram()};
  auto integrate = [&](double dt) {
    Vec4 x = cfg().design_state;
    const int n = static_cast<int>(std::lround(1.0 / dt));
    for (int i = 0; i < n; ++i) x = model().step_const(x, dt, in, HealthFactors{});
    return x;
  };
  const Vec4 ref = integrate(0.0025);
  const double e1 = (integrate(0.01) - ref).norm();
  const double e2 = (integrate(0.005) - ref).norm();
  CHECK(e1 / e2 > 8.0);
  CHECK(e1 / e2 < 40.0);
}

TEST_CASE("five scheduling points trim inside the envelope") {
  const struct {
    double fuel, alt, mach;
  } pts[] = {{0.38, 4070.538, 0.2109},
             {0.38, 12708.33, 0.6585},
             {0.25, 16404.2, 0.85},
             {0.30, 10424.87, 0.5402},
             {0.30, 2322.835, 0.1203}};
  for (const auto& p : pts) {
    const RamConditions ram = ram_conditions(p.alt, p.mach, cfg().ambient, cfg().gamma);
    const TrimResult res = trim(model(), p.fuel, ram, HealthFactors{}, cfg().design_state);
    CHECK(res.residual_norm <= 1e-9);
    const Vec4 xdot = model().derivatives(res.state, p.fuel, ram, HealthFactors{});
    for (int i = 0; i < kStateDim; ++i)
      CHECK(std::abs(xdot[i]) / std::max(1.0, std::abs(res.state[i])) < 1e-8);
    EvalFlags flags;
    (void)model().derivatives(res.state, p.fuel, ram, HealthFactors{}, &flags);
    CHECK_FALSE(flags.outside_envelope);
  }
}

TEST_CASE("trim is locally unique under perturbed starts") {
  const RamConditions ram = cruise_ram();
  const Vec4 nominal =
      trim(model(), cfg().design_fuel_flow, ram, HealthFactors{}, cfg().design_state).state;
  Rng rng(17);
  for (int trial = 0; trial < 8; ++trial) {
    Vec4 guess = cfg().design_state;
    for (int i = 0; i < kStateDim; ++i) guess[i] *= 1.0 + 0.05 * (2.0 * rng.uniform() - 1.0);
    const Vec4 solved = trim(model(), cfg().design_fuel_flow, ram, HealthFactors{}, guess).state;
    for (int i = 0; i < kStateDim; ++i)
      CHECK(std::abs(solved[i] - nominal[i]) / std::abs(nominal[i]) < 1e-6);
  }
}

TEST_CASE("compressor efficiency degradation raises steady compressor temperature") {
  // Frozen direction regression: a worse compressor must work the gas harder.
  const RamConditions ram = cruise_ram();
  HealthFactors degraded;
  degraded.eta_c = 0.97;
  const Vec5 y_healthy = model().outputs(
      trim(model(), cfg().design_fuel_flow, ram, HealthFactors{}, cfg().design_state).state, ram,
      HealthFactors{});
  const Vec5 y_degraded = model().outputs(
      trim(model(), cfg().design_fuel_flow, ram, degraded, cfg().design_state).state, ram,
      degraded);
  CHECK(y_degraded[kCompressorTemp] > y_healthy[kCompressorTemp]);
}

TEST_CASE("sensor suite: clean read equals the output map") {
  SensorSuite suite(model());
  const Vec5 y = suite.measure(cfg().design_state, cruise_ram(), HealthFactors{}, {}, 0, nullptr);
  const Vec5 g = model().outputs(cfg().design_state, cruise_ram(), HealthFactors{});
  CHECK((y - g).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sensor suite: bias fault shifts exactly one channel from its onset") {
  SensorSuite suite(model());
  const double bias = 0.03 * cfg().design_outputs[kCompressorTemp];
  const FaultEvent fault{kCompressorTemp, bias, 100};
  const Vec5 before =
      suite.measure(cfg().design_state, cruise_ram(), HealthFactors{}, {{fault}}, 99, nullptr);
  const Vec5 after =
      suite.measure(cfg().design_state, cruise_ram(), HealthFactors{}, {{fault}}, 100, nullptr);
  const Vec5 clean = suite.measure(cfg().design_state, cruise_ram(), HealthFactors{}, {}, 100, nullptr);
  CHECK((before - clean).cwiseAbs().maxCoeff() == 0.0);
  CHECK(after[kCompressorTemp] - clean[kCompressorTemp] == Approx(bias).epsilon(1e-14));
  for (int c = 1; c < kOutputDim; ++c) CHECK(after[c] == clean[c]);
}

TEST_CASE("sensor suite: fault additivity under a shared noise realization") {
  SensorSuite suite(model());
  const double bias = 0.05 * cfg().design_outputs[kSpoolSpeed];
  const FaultEvent fault{kSpoolSpeed, bias, 0};
  Rng r1(555), r2(555);
  for (int k = 0; k < 50; ++k) {
    const Vec5 healthy =
        suite.measure(cfg().design_state, cruise_ram(), HealthFactors{}, {}, k, &r1);
    const Vec5 faulty =
        suite.measure(cfg().design_state, cruise_ram(), HealthFactors{}, {{fault}}, k, &r2);
    Vec5 expect = Vec5::Zero();
    expect[kSpoolSpeed] = bias;
    CHECK(((faulty - healthy) - expect).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("sensor noise standard deviations track the configured percentages") {
  SensorSuite suite(model());
  Rng rng(31);
  const int n = 100000;
  Vec5 sum = Vec5::Zero(), sum_sq = Vec5::Zero();
  const Vec5 clean = model().outputs(cfg().design_state, cruise_ram(), HealthFactors{});
  for (int k = 0; k < n; ++k) {
    const Vec5 y = suite.measure(cfg().design_state, cruise_ram(), HealthFactors{}, {}, k, &rng);
    const Vec5 d = y - clean;
    sum += d;
    sum_sq += d.cwiseProduct(d);
  }
  for (int c = 0; c < kOutputDim; ++c) {
    const double mean = sum[c] / n;
    const double sd = std::sqrt(sum_sq[c] / n - mean * mean);
    CHECK(sd == Approx(suite.noise_sd()[c]).epsilon(0.02));
  }
}

TEST_CASE("ambient noise perturbs static conditions, not the recovery algebra") {
  AmbientNoise noise(cfg());
  const RamConditions clean = cruise_ram();
  CHECK(noise.perturb(clean, nullptr).t_d_k == clean.t_d_k);
  Rng rng(8);
  double max_t = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const RamConditions p = noise.perturb(clean, &rng);
    max_t = std::max(max_t, std::abs(p.t_amb_k - clean.t_amb_k));
    CHECK(p.t_d_k / p.t_amb_k == Approx(clean.t_d_k / clean.t_amb_k).epsilon(1e-12));
  }
  // 0.01% of 288 K = 0.0288 K SD; 1000 draws stay within ~5 sigma
  CHECK(max_t < 5.0 * 0.0288);
  CHECK(max_t > 0.0);
}

TEST_CASE("flight profile: waypoints are exact and interpolation is linear") {
  const FlightProfile p = FlightProfile::reference_mission();
  const ProfileRow at50 = p.sample(50.0);
  CHECK(at50.fuel == 0.38);
  CHECK(at50.altitude_ft == 4070.538);
  CHECK(at50.mach == 0.2109);
  const ProfileRow mid = p.sample(80.0);  // halfway between 50 s and 110 s rows
  CHECK(mid.altitude_ft == Approx(0.5 * (4070.538 + 12708.33)).epsilon(1e-12));
  CHECK(mid.mach == Approx(0.5 * (0.2109 + 0.6585)).epsilon(1e-12));
  // clamped outside the domain
  CHECK(p.sample(-5.0).fuel == p.sample(0.0).fuel);
  CHECK(p.sample(1e6).mach == p.sample(520.0).mach);
}

TEST_CASE("flight profile csv round-trip preserves rows") {
  namespace fs = std::filesystem;
  const auto path = (fs::temp_directory_path() / "gtfdi_profile_rt.csv").string();
  const FlightProfile p = FlightProfile::reference_mission();
  p.save_csv(path);
  const FlightProfile back = FlightProfile::load_csv(path);
  REQUIRE(back.rows().size() == p.rows().size());
  for (size_t i = 0; i < p.rows().size(); ++i) {
    CHECK(back.rows()[i].t == p.rows()[i].t);
    CHECK(back.rows()[i].fuel == p.rows()[i].fuel);
    CHECK(back.rows()[i].altitude_ft == p.rows()[i].altitude_ft);
    CHECK(back.rows()[i].mach == p.rows()[i].mach);
  }
  fs::remove(path);
}

TEST_CASE("flight profile rejects bad files") {
  namespace fs = std::filesystem;
  const auto path = (fs::temp_directory_path() / "gtfdi_profile_bad.csv").string();
  {
    std::ofstream out(path);
    out << "time,fuel,altitude,mach\n0,0.3,1000,0.2\n";
  }
  CHECK_THROWS_AS(FlightProfile::load_csv(path), ConfigError);
  {
    std::ofstream out(path);
    out << "t,mdot_f,alt_ft,mach\n10,0.3,1000,0.2\n5,0.3,1000,0.2\n";
  }
  CHECK_THROWS_AS(FlightProfile::load_csv(path), ConfigError);
  fs::remove(path);
}

TEST_CASE("healthy reference mission stays physical at full rate") {
  const FlightProfile profile = FlightProfile::reference_mission();
  const double dt = 0.01;
  Vec4 x = trim(model(), profile.sample(0.0).fuel,
                ram_conditions(profile.sample(0.0).altitude_ft, profile.sample(0.0).mach,
                               cfg().ambient, cfg().gamma),
                HealthFactors{}, cfg().design_state)
               .state;
  EvalFlags flags;
  auto inputs_at = [&](double t) {
    const ProfileRow r = profile.sample(t);
    return PlantInputs{r.fuel,
                       ram_conditions(r.altitude_ft, r.mach, cfg().ambient, cfg().gamma)};
  };
  bool positive = true, eta_ok = true;
  for (int k = 0; k < 52000; ++k) {
    x = model().step(x, k * dt, dt, inputs_at, HealthFactors{}, &flags);
    if (!(x.minCoeff() > 0.0)) positive = false;
    if ((k % 500) == 0) {
      double n_rel, pic_rel, pit_rel;
      const RamConditions ram = inputs_at(k * dt).ram;
      model().map_coordinates(x, ram, &n_rel, &pic_rel, &pit_rel);
      const MapOutputs m = model().performance_maps(n_rel, pic_rel, pit_rel);
      if (!(m.eta_c > 0.0 && m.eta_c <= 1.0 && m.eta_t > 0.0 && m.eta_t <= 1.0)) eta_ok = false;
    }
  }
  CHECK(positive);
  CHECK(eta_ok);
  CHECK_FALSE(flags.outside_envelope);
}

TEST_CASE("engine config round-trips through its text form") {
  namespace fs = std::filesystem;
  const auto path = (fs::temp_directory_path() / "gtfdi_engine_rt.cfg").string();
  const EngineConfig a = cfg();
  a.save(path);
  const EngineConfig b = EngineConfig::load(path);
  CHECK(b.gamma == a.gamma);
  CHECK((b.design_state - a.design_state).cwiseAbs().maxCoeff() == 0.0);
  CHECK((b.design_outputs - a.design_outputs).cwiseAbs().maxCoeff() == 0.0);
  CHECK(b.flow_c_ref == a.flow_c_ref);
  CHECK(b.flow_t_ref == a.flow_t_ref);
  CHECK(b.nozzle_area_m2 == a.nozzle_area_m2);
  CHECK(b.map_eta_c.cuu == a.map_eta_c.cuu);
  CHECK((b.noise.sd_output_pct - a.noise.sd_output_pct).cwiseAbs().maxCoeff() == 0.0);
  fs::remove(path);
}
