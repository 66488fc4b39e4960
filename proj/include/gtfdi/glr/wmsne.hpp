#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "gtfdi/errors.hpp"
#include "gtfdi/filter/covariance.hpp"
#include "gtfdi/filter/likelihood.hpp"
#include "gtfdi/fusion/fusion.hpp"
#include "gtfdi/linearize/model_bank.hpp"
#include "gtfdi/types.hpp"

namespace gtfdi::glr {

/// One diagnosed fault to be replayed: the isolated sensor, the detection
/// sample, and the estimated severity in scaled units.
struct ReplayFault {
  int sensor = 0;
  long k_ds = 0;
  double bias_scaled = 0.0;
};

struct WmsneOptions {
  filter::CovarianceOptions covariance;  ///< per-point covariance handling
  fusion::WeightOptions weights;         ///< interpolation-weight recursion
  double output_floor = 1e-9;            ///< channels with |Y| below this
                                         ///< fraction of their scale are skipped
};

struct WmsneResult {
  std::vector<double> per_fault_pct;  ///< one entry per replayed fault, in order
  double mean_pct = 0.0;
  long excluded = 0;  ///< channel-samples skipped by the output floor
};

/// Weighted mean-squared normalized error of the diagnosed reconstruction.
///
/// Replays the recorded measurement and reference-output streams through one
/// matched filter per stored model: the measurement offset switches to the
/// estimated severity at each detection sample, so the tracks stay clean of
/// the isolated faults and the reconstruction
///   Yhat_i(k) = Y_ref(k) + y_scale .* (C_i d_i(k) + offset(k))
/// should follow the measurements up to noise. For each fault the metric
/// averages, over the stored models, the interpolation-weighted mean of
/// ||(Y - Yhat_i) ./ Y||^2 across that fault's window — from its detection
/// sample to the next detection (or the end of the record) — reported in
/// percent. Small values mean the isolated sensors and severities explain
/// the record; a wrong sensor or a biased severity inflates the error.
inline WmsneResult wmsne(const linearize::ModelBank& bank, std::span<const Vec5> y_meas,
                         std::span<const Vec5> y_obem, std::span<const ReplayFault> faults,
                         const WmsneOptions& opt = {}) {
  const long K = static_cast<long>(y_meas.size());
  const int L = bank.size();
  const int F = static_cast<int>(faults.size());
  if (y_obem.size() != y_meas.size())
    throw ValidationError("measurement and reference records must be the same length");
  if (L == 0) throw ValidationError("reconstruction replay requires a loaded model bank");
  if (F == 0) throw ValidationError("reconstruction replay requires at least one fault");
  for (int s = 0; s < F; ++s) {
    const auto& f = faults[static_cast<size_t>(s)];
    if (f.sensor < 0 || f.sensor >= kOutputDim)
      throw ValidationError("replay fault sensor index out of range");
    if (f.k_ds < 0 || f.k_ds >= K)
      throw ValidationError("replay fault detection sample outside the record");
    if (s > 0 && f.k_ds <= faults[static_cast<size_t>(s - 1)].k_ds)
      throw ValidationError("replay faults must be ordered by detection sample");
  }

  std::vector<Vec4> d(static_cast<size_t>(L), Vec4::Zero());
  std::vector<filter::InnovationCovariance> covs;
  covs.reserve(static_cast<size_t>(L));
  for (const auto& m : bank.models) covs.emplace_back(m.S_stat, opt.covariance);
  VecX w = VecX::Constant(L, 1.0 / L);

  std::vector<double> num(static_cast<size_t>(F * L), 0.0);
  std::vector<double> den(static_cast<size_t>(F * L), 0.0);
  long excluded = 0;

  Vec5 offset = Vec5::Zero();
  int next_fault = 0;   // first fault not yet folded into the offset
  int active = -1;      // window owner: last fault whose k_ds has passed
  VecX lik(L);
  std::vector<Vec5> gammas(static_cast<size_t>(L));
  std::vector<double> sqerr(static_cast<size_t>(L));
  for (long k = 0; k < K; ++k) {
    while (next_fault < F && k >= faults[static_cast<size_t>(next_fault)].k_ds) {
      const auto& f = faults[static_cast<size_t>(next_fault)];
      offset[f.sensor] += f.bias_scaled;
      active = next_fault++;
    }
    const Vec5 y_dev =
        (y_meas[static_cast<size_t>(k)] - y_obem[static_cast<size_t>(k)])
            .cwiseQuotient(bank.y_scale);

    // Innovations, densities, and reconstructions against the pre-update
    // states, so every quantity at index k reflects sample k.
    for (int i = 0; i < L; ++i) {
      const auto& m = bank.models[static_cast<size_t>(i)];
      const Vec5 gamma = y_dev - m.C * d[static_cast<size_t>(i)] - offset;
      gammas[static_cast<size_t>(i)] = gamma;
      lik[i] = filter::gaussian_likelihood<kOutputDim>(
          gamma, covs[static_cast<size_t>(i)].value());
      if (active >= 0) {
        const Vec5 yhat = y_obem[static_cast<size_t>(k)] +
                          bank.y_scale.cwiseProduct(m.C * d[static_cast<size_t>(i)] + offset);
        double sq = 0.0;
        for (int c = 0; c < kOutputDim; ++c) {
          const double y = y_meas[static_cast<size_t>(k)][c];
          if (std::abs(y) < opt.output_floor * bank.y_scale[c]) {
            if (i == 0) ++excluded;
            continue;
          }
          const double rel = (y - yhat[c]) / y;
          sq += rel * rel;
        }
        sqerr[static_cast<size_t>(i)] = sq;
      }
    }

    // Weights consume sample k before weighting its error.
    w = fusion::update_weights(w, lik, opt.weights).value;
    if (active >= 0)
      for (int i = 0; i < L; ++i) {
        num[static_cast<size_t>(active * L + i)] += w[i] * sqerr[static_cast<size_t>(i)];
        den[static_cast<size_t>(active * L + i)] += w[i];
      }

    for (int i = 0; i < L; ++i) {
      const auto& m = bank.models[static_cast<size_t>(i)];
      d[static_cast<size_t>(i)] =
          m.A * (d[static_cast<size_t>(i)] + m.K * gammas[static_cast<size_t>(i)]);
      covs[static_cast<size_t>(i)].update(gammas[static_cast<size_t>(i)]);
    }
  }

  WmsneResult out;
  out.excluded = excluded;
  out.per_fault_pct.reserve(static_cast<size_t>(F));
  for (int s = 0; s < F; ++s) {
    double acc = 0.0;
    for (int i = 0; i < L; ++i) {
      const double dn = den[static_cast<size_t>(s * L + i)];
      if (dn <= 0.0)
        throw NumericalError("reconstruction window carried no weight mass");
      acc += num[static_cast<size_t>(s * L + i)] / dn;
    }
    out.per_fault_pct.push_back(100.0 * acc / L);
    out.mean_pct += out.per_fault_pct.back();
  }
  out.mean_pct /= F;
  return out;
}

}  // namespace gtfdi::glr
