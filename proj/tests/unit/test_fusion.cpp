#include <doctest.h>

#include <cmath>
#include <vector>

#include "gtfdi/fdi/mode_probs.hpp"
#include "gtfdi/fusion/fusion.hpp"
#include "gtfdi/util/rng.hpp"

using namespace gtfdi;
using doctest::Approx;

namespace {
VecX uniform(int n) { return VecX::Constant(n, 1.0 / n); }
}  // namespace

TEST_CASE("equal likelihoods leave weights unchanged") {
  const fusion::WeightOptions opt;
  const VecX w0 = (VecX(3) << 0.2, 0.3, 0.5).finished();
  const auto r = fusion::update_weights(w0, VecX::Constant(3, 0.7), opt);
  CHECK_FALSE(r.degenerate);
  CHECK((r.value - w0).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("two-model Bayes update, hand oracle") {
  // 0.5*0.9 / (0.5*0.9 + 0.5*0.1) = 0.9
  const fusion::WeightOptions opt;
  const auto r =
      fusion::update_weights(uniform(2), (VecX(2) << 0.9, 0.1).finished(), opt);
  CHECK(r.value[0] == Approx(0.9).epsilon(1e-14));
  CHECK(r.value[1] == Approx(0.1).epsilon(1e-14));
}

TEST_CASE("collapsing weight is pinned at the floor and can recover") {
  fusion::WeightOptions opt;
  opt.floor = 1e-3;
  VecX w = uniform(2);
  const VecX crush = (VecX(2) << 1e-30, 1.0).finished();
  for (int k = 0; k < 50; ++k) {
    const auto r = fusion::update_weights(w, crush, opt);
    w = r.value;
    CHECK(w.minCoeff() >= opt.floor - 1e-15);
    CHECK(w.sum() == Approx(1.0).epsilon(1e-12));
  }
  CHECK(w[0] == Approx(opt.floor).epsilon(1e-9));
  // evidence reverses: the floored entry must climb back within finite steps
  const VecX favor = (VecX(2) << 1.0, 1e-6).finished();
  int steps = 0;
  while (w[0] < 0.9 && steps < 20) {
    w = fusion::update_weights(w, favor, opt).value;
    ++steps;
  }
  CHECK(w[0] >= 0.9);
  CHECK(steps <= 3);  // floor keeps the odds ratio within ~rho of parity
}

TEST_CASE("floor-only variant skips renormalization") {
  fusion::WeightOptions opt;
  opt.floor = 0.05;
  opt.renormalize = false;
  const auto r =
      fusion::update_weights(uniform(2), (VecX(2) << 1e-12, 1.0).finished(), opt);
  CHECK(r.value[0] == Approx(0.05).epsilon(1e-12));  // clamped, not redistributed
  CHECK(r.value.sum() > 1.0);
}

TEST_CASE("all-zero likelihoods hold weights and flag degeneracy") {
  const fusion::WeightOptions opt;
  const VecX w0 = (VecX(3) << 0.2, 0.3, 0.5).finished();
  const auto r = fusion::update_weights(w0, VecX::Zero(3), opt);
  CHECK(r.degenerate);
  CHECK((r.value - w0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dead entries receive zero weight and no floor") {
  const fusion::WeightOptions opt;
  const std::vector<char> alive = {1, 0, 1};
  const auto r = fusion::update_weights(uniform(3), VecX::Constant(3, 0.5), opt, &alive);
  CHECK(r.value[1] == 0.0);
  CHECK(r.value[0] == Approx(0.5).epsilon(1e-14));
  CHECK(r.value[2] == Approx(0.5).epsilon(1e-14));
}

TEST_CASE("waterfill pins several entries while the sum stays exactly one") {
  fusion::WeightOptions opt;
  opt.floor = 0.1;
  const auto r =
      fusion::update_weights(uniform(4), (VecX(4) << 1e-9, 1e-9, 1e-9, 1.0).finished(), opt);
  CHECK(r.value[0] == Approx(0.1).epsilon(1e-14));
  CHECK(r.value[1] == Approx(0.1).epsilon(1e-14));
  CHECK(r.value[2] == Approx(0.1).epsilon(1e-14));
  CHECK(r.value[3] == Approx(0.7).epsilon(1e-14));
  CHECK(r.value.sum() == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("randomized likelihood streams keep the simplex and floor invariants") {
  fusion::WeightOptions opt;
  opt.floor = 1e-3;
  Rng rng(20260819);
  VecX w = uniform(5);
  for (int k = 0; k < 10000; ++k) {
    VecX f(5);
    for (int i = 0; i < 5; ++i) {
      // spiky evidence spanning many decades, occasionally zero
      const double u = rng.uniform();
      f[i] = (u < 0.01) ? 0.0 : std::exp(40.0 * (rng.uniform() - 0.5));
    }
    const auto r = fusion::update_weights(w, f, opt);
    w = r.value;
    REQUIRE(std::abs(w.sum() - 1.0) <= 1e-12);
    if (!r.degenerate) REQUIRE(w.minCoeff() >= opt.floor - 1e-15);
  }
}

namespace {
linearize::ScaledDiscreteModel synth_model(int seed) {
  Rng rng(static_cast<std::uint64_t>(seed));
  linearize::ScaledDiscreteModel m;
  auto fill = [&](auto& mat) {
    for (int r = 0; r < mat.rows(); ++r)
      for (int c = 0; c < mat.cols(); ++c) mat(r, c) = rng.gaussian();
  };
  fill(m.A);
  fill(m.B);
  fill(m.C);
  fill(m.K);
  Mat5 root;
  fill(root);
  m.S_stat = root * root.transpose() + Mat5::Identity();
  fill(m.x_ss);
  fill(m.y_ss);
  m.u_ss = rng.gaussian();
  return m;
}
}  // namespace

TEST_CASE("combine: single model passes through") {
  const auto m = synth_model(1);
  const Vec5 g = Vec5::Constant(0.3);
  const std::vector<linearize::ScaledDiscreteModel> models{m};
  const std::vector<Vec5> gammas{g};
  const std::vector<Mat5> covs{m.S_stat};
  const auto f = fusion::combine(VecX::Ones(1), models, gammas, covs);
  CHECK((f.A_c - m.A).cwiseAbs().maxCoeff() == 0.0);
  CHECK((f.C_c - m.C).cwiseAbs().maxCoeff() == 0.0);
  CHECK((f.gamma_c - g).cwiseAbs().maxCoeff() == 0.0);
  CHECK((f.S_c - m.S_stat).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("combine: identical filters at half weight halve the covariance") {
  const auto m = synth_model(2);
  const Vec5 g = Vec5::LinSpaced(5, -1.0, 1.0);
  const std::vector<linearize::ScaledDiscreteModel> models{m, m};
  const std::vector<Vec5> gammas{g, g};
  const std::vector<Mat5> covs{m.S_stat, m.S_stat};
  const auto f = fusion::combine(VecX::Constant(2, 0.5), models, gammas, covs);
  CHECK((f.gamma_c - g).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((f.S_c - 0.5 * m.S_stat).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("combine matches a brute-force summation oracle") {
  std::vector<linearize::ScaledDiscreteModel> models;
  std::vector<Vec5> gammas;
  std::vector<Mat5> covs;
  Rng rng(77);
  VecX w(4);
  for (int i = 0; i < 4; ++i) {
    models.push_back(synth_model(10 + i));
    Vec5 g;
    for (int r = 0; r < 5; ++r) g[r] = rng.gaussian();
    gammas.push_back(g);
    covs.push_back(models.back().S_stat);
    w[i] = rng.uniform() + 0.1;
  }
  w /= w.sum();
  const auto f = fusion::combine(w, models, gammas, covs);

  Mat4 a = Mat4::Zero();
  Mat54 c = Mat54::Zero();
  Vec5 g = Vec5::Zero();
  Mat5 s = Mat5::Zero();
  for (int i = 3; i >= 0; --i) {  // reversed order: independent accumulation
    a += w[i] * models[static_cast<size_t>(i)].A;
    c += w[i] * models[static_cast<size_t>(i)].C;
    g += w[i] * gammas[static_cast<size_t>(i)];
    s += w[i] * w[i] * covs[static_cast<size_t>(i)];
  }
  CHECK((f.A_c - a).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((f.C_c - c).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((f.gamma_c - g).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((f.S_c - s).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("combine residual fusion is weight-affine in the residual scale") {
  std::vector<linearize::ScaledDiscreteModel> models{synth_model(20), synth_model(21)};
  std::vector<Vec5> gammas{Vec5::Constant(0.2), Vec5::LinSpaced(5, 0.0, 1.0)};
  std::vector<Mat5> covs{models[0].S_stat, models[1].S_stat};
  const VecX w = (VecX(2) << 0.3, 0.7).finished();
  const auto base = fusion::combine(w, models, gammas, covs);
  for (auto& g : gammas) g *= 3.0;
  const auto scaled = fusion::combine(w, models, gammas, covs);
  CHECK((scaled.gamma_c - 3.0 * base.gamma_c).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("combine validates input sizes") {
  std::vector<linearize::ScaledDiscreteModel> models{synth_model(30)};
  std::vector<Vec5> gammas{Vec5::Zero(), Vec5::Zero()};
  std::vector<Mat5> covs{Mat5::Identity()};
  CHECK_THROWS_AS(fusion::combine(VecX::Ones(1), models, gammas, covs), ValidationError);
}

TEST_CASE("impossible floor falls back to uniform") {
  fusion::WeightOptions opt;
  opt.floor = 0.4;  // 3 * 0.4 > 1
  const auto r =
      fusion::update_weights(uniform(3), (VecX(3) << 1e-12, 1e-12, 1.0).finished(), opt);
  CHECK(r.value[0] == Approx(1.0 / 3).epsilon(1e-14));
  CHECK(r.value.sum() == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("mode probabilities: equal densities are a fixed point") {
  const fdi::ModeProbOptions opt;
  const VecX p0 = (VecX(6) << 0.5, 0.1, 0.1, 0.1, 0.1, 0.1).finished();
  const auto r = fdi::update_mode_probs(p0, VecX::Constant(6, 0.25), opt);
  CHECK((r.value - p0).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("mode probabilities: sustained 10x density ratio converges geometrically") {
  const fdi::ModeProbOptions opt;
  VecX p = VecX::Constant(2, 0.5);
  const VecX dens = (VecX(2) << 1.0, 10.0).finished();
  p = fdi::update_mode_probs(p, dens, opt).value;
  CHECK(p[1] == Approx(10.0 / 11.0).epsilon(1e-14));  // odds 10:1
  p = fdi::update_mode_probs(p, dens, opt).value;
  CHECK(p[1] == Approx(100.0 / 101.0).epsilon(1e-13));  // odds 100:1
  CHECK(p[1] > 0.99);                                   // within ceil(log10(99)) = 2 steps
}

TEST_CASE("mode probabilities: permutation equivariance") {
  const fdi::ModeProbOptions opt;
  const VecX p0 = (VecX(3) << 0.2, 0.3, 0.5).finished();
  const VecX dens = (VecX(3) << 0.9, 0.05, 0.05).finished();
  const auto r = fdi::update_mode_probs(p0, dens, opt).value;

  const VecX p0p = (VecX(3) << 0.5, 0.2, 0.3).finished();   // rotate right
  const VecX densp = (VecX(3) << 0.05, 0.9, 0.05).finished();
  const auto rp = fdi::update_mode_probs(p0p, densp, opt).value;
  CHECK(rp[1] == Approx(r[0]).epsilon(1e-14));
  CHECK(rp[2] == Approx(r[1]).epsilon(1e-14));
  CHECK(rp[0] == Approx(r[2]).epsilon(1e-14));
}

TEST_CASE("densities from log space preserve ratios under extreme shifts") {
  const VecX ll = (VecX(3) << -1000.0, -1001.0,
                   -std::numeric_limits<double>::infinity()).finished();
  const VecX f = fdi::densities_from_loglikes(ll);
  CHECK(f[0] == 1.0);
  CHECK(f[1] == Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(f[2] == 0.0);
}

TEST_CASE("all-dead densities hold the probabilities") {
  const VecX ll = VecX::Constant(4, -std::numeric_limits<double>::infinity());
  const VecX f = fdi::densities_from_loglikes(ll);
  CHECK(f.maxCoeff() == 0.0);
  const fdi::ModeProbOptions opt;
  const VecX p0 = (VecX(4) << 0.4, 0.3, 0.2, 0.1).finished();
  const auto r = fdi::update_mode_probs(p0, f, opt);
  CHECK(r.degenerate);
  CHECK((r.value - p0).cwiseAbs().maxCoeff() == 0.0);
}
