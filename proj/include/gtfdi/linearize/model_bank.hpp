#pragma once

#include <span>
#include <string>
#include <vector>

#include "gtfdi/engine/plant.hpp"
#include "gtfdi/types.hpp"

namespace gtfdi::linearize {

/// One scheduling point of the piecewise-linear family.
struct OperatingPoint {
  std::string name;
  double fuel = 0.0;
  double altitude_ft = 0.0;
  double mach = 0.0;
};

/// Discrete-time linear model at one operating point, stored in the scaled
/// deviation space (states over |design state|, outputs over |design output|,
/// fuel over design fuel).  Anchors are kept in physical units.
struct ScaledDiscreteModel {
  int id = 0;
  Mat4 A = Mat4::Zero();
  Vec4 B = Vec4::Zero();
  Mat54 C = Mat54::Zero();
  Mat45 K = Mat45::Zero();   ///< stationary correction gain, applied before propagation
  Mat5 S_stat = Mat5::Zero();  ///< stationary innovation covariance
  Vec4 x_ss = Vec4::Zero();
  double u_ss = 0.0;
  Vec5 y_ss = Vec5::Zero();
};

/// The persisted lookup table: L models sharing one scaling convention and
/// one (Q, R) pair.  Gains and covariances are identical across sensor-fault
/// hypotheses by construction — only the hypothesis bias differs online.
struct ModelBank {
  int format_version = 1;
  double sample_period = 0.01;
  Vec4 x_scale = Vec4::Ones();
  Vec5 y_scale = Vec5::Ones();
  double u_scale = 1.0;
  Mat4 Q = Mat4::Identity() * 0.1;
  Mat5 R = Mat5::Identity() * 0.01;
  std::vector<ScaledDiscreteModel> models;

  int size() const { return static_cast<int>(models.size()); }
};

/// Trim, linearize, discretize, and solve the stationary gain at every
/// operating point.  Throws with the point's name on any stage failure.
ModelBank build_bank(const engine::EngineModel& model, std::span<const OperatingPoint> points,
                     const Mat4& Q, const Mat5& R, double sample_period);

/// Convenience overload with the global defaults Q = 0.1·I, R = 0.01·I.
ModelBank build_bank(const engine::EngineModel& model, std::span<const OperatingPoint> points,
                     double sample_period = 0.01);

/// Versioned JSON container, matrices flattened row-major, with an embedded
/// CRC-32 over the canonical payload.  load_bank verifies version and
/// checksum; save → load round-trips every coefficient exactly.
void save_bank(const ModelBank& bank, const std::string& path);
ModelBank load_bank(const std::string& path);

/// Operating-point table: CSV with header `name,mdot_f,alt_ft,mach`.
std::vector<OperatingPoint> load_operating_points(const std::string& path);
void save_operating_points(std::span<const OperatingPoint> points, const std::string& path);

/// The five scheduling points of the reference mission: two on the climb leg,
/// the cruise condition, and two on the descent.
std::vector<OperatingPoint> reference_operating_points();

}  // namespace gtfdi::linearize
