#include "gtfdi/linearize/model_bank.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gtfdi/engine/trim.hpp"
#include "gtfdi/errors.hpp"
#include "gtfdi/io/crc32.hpp"
#include "gtfdi/linearize/discretize.hpp"
#include "gtfdi/linearize/linear_model.hpp"
#include "gtfdi/num/dare.hpp"

namespace gtfdi::linearize {
namespace {

using nlohmann::json;

template <class M>
json to_flat(const M& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) a.push_back(m(r, c));
  return a;
}

template <class M>
void from_flat(const json& a, M& m, const char* what) {
  if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != m.rows() * m.cols())
    throw ConfigError(std::string("model bank: bad element count for ") + what);
  Eigen::Index i = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = a[i++].get<double>();
}

json payload_json(const ModelBank& bank) {
  json j;
  j["format_version"] = bank.format_version;
  j["sample_period"] = bank.sample_period;
  j["scales"] = {{"x", to_flat(bank.x_scale)},
                 {"y", to_flat(bank.y_scale)},
                 {"u", bank.u_scale}};
  j["noise"] = {{"q", to_flat(bank.Q)}, {"r", to_flat(bank.R)}};
  json models = json::array();
  for (const ScaledDiscreteModel& m : bank.models) {
    json jm;
    jm["id"] = m.id;
    jm["a"] = to_flat(m.A);
    jm["b"] = to_flat(m.B);
    jm["c"] = to_flat(m.C);
    jm["k"] = to_flat(m.K);
    jm["s_stat"] = to_flat(m.S_stat);
    jm["x_ss"] = to_flat(m.x_ss);
    jm["u_ss"] = m.u_ss;
    jm["y_ss"] = to_flat(m.y_ss);
    models.push_back(std::move(jm));
  }
  j["models"] = std::move(models);
  return j;
}

double spectral_radius(const Mat4& m) {
  return m.eigenvalues().cwiseAbs().maxCoeff();
}

std::uint32_t payload_crc(const json& j) {
  const std::string s = j.dump();
  return crc32(s.data(), s.size());
}

}  // namespace

ModelBank build_bank(const engine::EngineModel& model, std::span<const OperatingPoint> points,
                     const Mat4& Q, const Mat5& R, double sample_period) {
  if (points.empty()) throw ValidationError("model bank needs at least one operating point");
  const engine::EngineConfig& cfg = model.config();

  ModelBank bank;
  bank.sample_period = sample_period;
  bank.x_scale = cfg.design_state.cwiseAbs();
  bank.y_scale = cfg.design_outputs.cwiseAbs();
  bank.u_scale = cfg.design_fuel_flow;
  bank.Q = Q;
  bank.R = R;

  const Mat4 dx = bank.x_scale.asDiagonal();
  const Mat4 dx_inv = bank.x_scale.cwiseInverse().asDiagonal();
  const Mat5 dy_inv = bank.y_scale.cwiseInverse().asDiagonal();
  const engine::HealthFactors healthy;

  int id = 0;
  for (const OperatingPoint& op : points) {
    try {
      const engine::RamConditions ram =
          engine::ram_conditions(op.altitude_ft, op.mach, cfg.ambient, cfg.gamma);
      const engine::TrimResult trim =
          engine::trim(model, op.fuel, ram, healthy, cfg.design_state);
      const ContinuousLinearModel lin =
          jacobians(model, trim.state, op.fuel, ram, healthy);

      auto [a_d, b_d] = discretize(lin.A_c, lin.B_c, sample_period);

      ScaledDiscreteModel m;
      m.id = id;
      m.A = dx_inv * a_d * dx;
      m.B = dx_inv * b_d * bank.u_scale;
      m.C = dy_inv * lin.C_c * dx;
      const num::DareResult ric = num::dare_stationary_gain(m.A, m.C, Q, R);
      m.K = ric.K;
      m.S_stat = ric.S;
      m.x_ss = trim.state;
      m.u_ss = op.fuel;
      m.y_ss = lin.y_ss;

      const double rho = spectral_radius(m.A * (Mat4::Identity() - m.K * m.C));
      if (!(rho < 1.0))
        throw NumericalError("estimator closed loop not contractive (rho = " +
                             std::to_string(rho) + ")");
      bank.models.push_back(std::move(m));
      ++id;
    } catch (const std::exception& e) {
      throw NumericalError("operating point '" + op.name + "': " + e.what());
    }
  }
  return bank;
}

ModelBank build_bank(const engine::EngineModel& model, std::span<const OperatingPoint> points,
                     double sample_period) {
  return build_bank(model, points, Mat4::Identity() * 0.1, Mat5::Identity() * 0.01,
                    sample_period);
}

void save_bank(const ModelBank& bank, const std::string& path) {
  json j = payload_json(bank);
  j["crc32"] = payload_crc(j);
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write model bank: " + path);
  out << j.dump(1) << "\n";
}

ModelBank load_bank(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model bank: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("model bank parse failure: " + std::string(e.what()));
  }
  if (!j.contains("crc32")) throw ConfigError("model bank missing checksum");
  const auto stored_crc = j["crc32"].get<std::uint32_t>();
  j.erase("crc32");
  if (payload_crc(j) != stored_crc)
    throw ConfigError("model bank checksum mismatch (file corrupted or hand-edited)");

  ModelBank bank;
  bank.format_version = j.at("format_version").get<int>();
  if (bank.format_version != 1)
    throw ConfigError("unsupported model bank format version " +
                      std::to_string(bank.format_version));
  bank.sample_period = j.at("sample_period").get<double>();
  from_flat(j.at("scales").at("x"), bank.x_scale, "x scale");
  from_flat(j.at("scales").at("y"), bank.y_scale, "y scale");
  bank.u_scale = j.at("scales").at("u").get<double>();
  from_flat(j.at("noise").at("q"), bank.Q, "Q");
  from_flat(j.at("noise").at("r"), bank.R, "R");
  for (const json& jm : j.at("models")) {
    ScaledDiscreteModel m;
    m.id = jm.at("id").get<int>();
    from_flat(jm.at("a"), m.A, "A");
    from_flat(jm.at("b"), m.B, "B");
    from_flat(jm.at("c"), m.C, "C");
    from_flat(jm.at("k"), m.K, "K");
    from_flat(jm.at("s_stat"), m.S_stat, "S");
    from_flat(jm.at("x_ss"), m.x_ss, "x_ss");
    m.u_ss = jm.at("u_ss").get<double>();
    from_flat(jm.at("y_ss"), m.y_ss, "y_ss");
    bank.models.push_back(std::move(m));
  }
  if (bank.models.empty()) throw ConfigError("model bank holds no models");
  return bank;
}

std::vector<OperatingPoint> load_operating_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open operating points: " + path);
  std::vector<OperatingPoint> points;
  std::string line;
  bool first = true;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (first) {
      first = false;
      continue;
    }
    std::istringstream ss(line);
    OperatingPoint op;
    char comma;
    if (!std::getline(ss, op.name, ',') ||
        !(ss >> op.fuel >> comma >> op.altitude_ft >> comma >> op.mach))
      throw ConfigError(path + ":" + std::to_string(lineno) + ": malformed operating point");
    points.push_back(std::move(op));
  }
  if (points.empty()) throw ConfigError(path + ": no operating points");
  return points;
}

std::vector<OperatingPoint> reference_operating_points() {
  return {
      {"climb-a", 0.38, 4070.538, 0.2109},
      {"climb-b", 0.38, 12708.33, 0.6585},
      {"cruise", 0.25, 16404.2, 0.85},
      {"descent-a", 0.30, 10424.87, 0.5402},
      {"descent-b", 0.30, 2322.835, 0.1203},
  };
}

void save_operating_points(std::span<const OperatingPoint> points, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write operating points: " + path);
  out.precision(17);
  out << "name,mdot_f,alt_ft,mach\n";
  for (const OperatingPoint& op : points)
    out << op.name << "," << op.fuel << "," << op.altitude_ft << "," << op.mach << "\n";
}

}  // namespace gtfdi::linearize
