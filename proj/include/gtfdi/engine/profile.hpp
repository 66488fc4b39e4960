#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gtfdi/errors.hpp"

namespace gtfdi::engine {

struct ProfileRow {
  double t = 0.0;           ///< mission time [s]
  double fuel = 0.0;        ///< fuel flow
  double altitude_ft = 0.0; ///< pressure altitude [ft]
  double mach = 0.0;
};

/// Piecewise-linear flight profile (fuel flow, altitude, Mach over time).
class FlightProfile {
 public:
  FlightProfile() = default;
  explicit FlightProfile(std::vector<ProfileRow> rows) : rows_(std::move(rows)) { validate(); }

  /// CSV with header `t,mdot_f,alt_ft,mach`; rows sorted by time.
  static FlightProfile load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open profile: " + path);
    std::vector<ProfileRow> rows;
    std::string line;
    bool first = true;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      if (first) {  // header row
        first = false;
        std::string header = line;
        header.erase(std::remove_if(header.begin(), header.end(),
                                    [](unsigned char c) { return std::isspace(c); }),
                     header.end());
        if (header != "t,mdot_f,alt_ft,mach")
          throw ConfigError(path + ": expected header t,mdot_f,alt_ft,mach");
        continue;
      }
      std::istringstream ss(line);
      ProfileRow row;
      char comma;
      if (!(ss >> row.t >> comma >> row.fuel >> comma >> row.altitude_ft >> comma >> row.mach))
        throw ConfigError(path + ":" + std::to_string(lineno) + ": malformed profile row");
      rows.push_back(row);
    }
    return FlightProfile(std::move(rows));
  }

  void save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write profile: " + path);
    out.precision(17);
    out << "t,mdot_f,alt_ft,mach\n";
    for (const auto& r : rows_)
      out << r.t << "," << r.fuel << "," << r.altitude_ft << "," << r.mach << "\n";
  }

  /// Reference mission: climb with two fixed waypoints, cruise hold, and a
  /// descent with two fixed waypoints, 520 s total.
  static FlightProfile reference_mission() {
    return FlightProfile({
        {0.0, 0.38, 800.0, 0.12},
        {50.0, 0.38, 4070.538, 0.2109},
        {110.0, 0.38, 12708.33, 0.6585},
        {150.0, 0.38, 16404.2, 0.85},
        {160.0, 0.25, 16404.2, 0.85},
        {350.0, 0.25, 16404.2, 0.85},
        {360.0, 0.30, 15500.0, 0.82},
        {430.0, 0.30, 10424.87, 0.5402},
        {495.0, 0.30, 2322.835, 0.1203},
        {520.0, 0.30, 1200.0, 0.10},
    });
  }

  /// Linear interpolation; clamped outside [t_first, t_last].
  ProfileRow sample(double t) const {
    if (t <= rows_.front().t) {
      ProfileRow r = rows_.front();
      r.t = t;
      return r;
    }
    if (t >= rows_.back().t) {
      ProfileRow r = rows_.back();
      r.t = t;
      return r;
    }
    const auto hi = std::upper_bound(rows_.begin(), rows_.end(), t,
                                     [](double v, const ProfileRow& r) { return v < r.t; });
    const auto lo = hi - 1;
    const double a = (t - lo->t) / (hi->t - lo->t);
    ProfileRow r;
    r.t = t;
    r.fuel = lo->fuel + a * (hi->fuel - lo->fuel);
    r.altitude_ft = lo->altitude_ft + a * (hi->altitude_ft - lo->altitude_ft);
    r.mach = lo->mach + a * (hi->mach - lo->mach);
    return r;
  }

  double start_time() const { return rows_.front().t; }
  double duration() const { return rows_.back().t - rows_.front().t; }
  const std::vector<ProfileRow>& rows() const { return rows_; }

 private:
  void validate() const {
    if (rows_.size() < 2) throw ConfigError("profile needs at least 2 rows");
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const auto& r = rows_[i];
      if (!std::isfinite(r.t) || !std::isfinite(r.fuel) || !std::isfinite(r.altitude_ft) ||
          !std::isfinite(r.mach))
        throw ConfigError("profile row " + std::to_string(i) + " has non-finite values");
      if (r.fuel <= 0.0) throw ConfigError("profile fuel flow must be positive");
      if (r.mach < 0.0) throw ConfigError("profile Mach must be non-negative");
      if (i > 0 && rows_[i].t <= rows_[i - 1].t)
        throw ConfigError("profile times must be strictly increasing");
    }
  }

  std::vector<ProfileRow> rows_;
};

}  // namespace gtfdi::engine
