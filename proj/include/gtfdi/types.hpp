#pragma once

#include <Eigen/Dense>

namespace gtfdi {

/// State vector: combustor pressure [bar], spool speed [rpm],
/// combustor temperature [K], turbine exit pressure [bar].
inline constexpr int kStateDim = 4;

/// Sensed outputs: compressor exit temperature [K], compressor exit
/// pressure [bar], spool speed [rpm], turbine exit temperature [K],
/// turbine exit pressure [bar].
inline constexpr int kOutputDim = 5;

/// Decision modes: healthy plus one bias hypothesis per sensor.
inline constexpr int kModeCount = kOutputDim + 1;

template <int Rows, int Cols>
using Mat = Eigen::Matrix<double, Rows, Cols>;

template <int Rows>
using Vec = Eigen::Matrix<double, Rows, 1>;

using Vec2 = Vec<2>;
using Vec4 = Vec<kStateDim>;
using Vec5 = Vec<kOutputDim>;
using Vec6 = Vec<kModeCount>;
using Mat4 = Mat<kStateDim, kStateDim>;
using Mat5 = Mat<kOutputDim, kOutputDim>;
using Mat54 = Mat<kOutputDim, kStateDim>;
using Mat45 = Mat<kStateDim, kOutputDim>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// Sensor channel indices, in output-vector order.
enum Sensor : int {
  kCompressorTemp = 0,
  kCompressorPressure = 1,
  kSpoolSpeed = 2,
  kTurbineTemp = 3,
  kTurbinePressure = 4,
};

inline const char* sensor_name(int s) {
  switch (s) {
    case kCompressorTemp: return "T_compressor";
    case kCompressorPressure: return "P_compressor";
    case kSpoolSpeed: return "N_spool";
    case kTurbineTemp: return "T_turbine";
    case kTurbinePressure: return "P_turbine";
    default: return "unknown";
  }
}

}  // namespace gtfdi
