#include "nvholo/dynamics.hpp"
#include "nvholo/tomography.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace nvholo;

namespace {

using Channel = std::function<Mat2(const Mat2&)>;

std::vector<TomographyRecord> records_of(const Channel& ch) {
  std::vector<TomographyRecord> out;
  for (TomoInput in : kTomoInputs) {
    const Eigen::Vector3d b = oracle::bloch(ch(input_density(in)));
    out.push_back({in, BlochVector::from(b), std::nullopt, 0});
  }
  return out;
}

Channel conjugation(const Mat2& u) {
  return [u](const Mat2& r) { return Mat2(u * r * u.adjoint()); };
}

OptimizerConfig mle_config(std::uint64_t seed = 42) {
  OptimizerConfig c;
  c.seed = seed;
  c.max_generations = 400;
  return c;
}

// Pauli-basis coefficients of U written out by hand from U = sum_m e_m P_m.
Eigen::Vector4cd pauli_coefficients(const Mat2& u) {
  return {0.5 * (u(0, 0) + u(1, 1)), 0.5 * (u(0, 1) + u(1, 0)), 0.5 * kI * (u(0, 1) - u(1, 0)),
          0.5 * (u(0, 0) - u(1, 1))};
}

}  // namespace

TEST(StateTomography, Anchors) {
  const StateTomography plus = state_tomography({1.0, 0.5, 0.5});
  EXPECT_LT((plus.bloch.vec() - Eigen::Vector3d(1, 0, 0)).norm(), 1e-15);
  EXPECT_LT((plus.rho - Mat2::Constant(0.5)).norm(), 1e-15);
  EXPECT_FALSE(plus.clipped);
  const StateTomography mixed = state_tomography({0.5, 0.5, 0.5});
  EXPECT_LT((mixed.rho - Mat2::Identity() / 2.0).norm(), 1e-15);
}

TEST(StateTomography, ClipsOutsideUnitBall) {
  const StateTomography t = state_tomography({1.0, 1.0, 0.5});
  EXPECT_TRUE(t.clipped);
  EXPECT_NEAR(t.bloch.norm(), 1.0, 1e-15);
  EXPECT_NEAR(t.bloch.x, t.bloch.y, 1e-15);
  EXPECT_THROW(state_tomography({1.2, 0.5, 0.5}), std::invalid_argument);
}

TEST(StateTomography, ReadoutRoundTripOfRandomPureStates) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 50; ++i) {
    const Eigen::Vector3d r = oracle::random_unit(rng);
    const Mat2 rho = density_from_bloch(BlochVector::from(r));
    std::array<double, 3> p{};
    for (int a = 0; a < 3; ++a) {
      const auto [t, ph] = readout_angles(a);
      p[a] = readout(rho, t, ph);
    }
    EXPECT_LT((state_tomography(p).bloch.vec() - r).norm(), 1e-9);
  }
}

TEST(StateTomography, ReadoutAxesPointAlongPlusXYZ) {
  for (int a = 0; a < 3; ++a) {
    const auto [t, ph] = readout_angles(a);
    EXPECT_LT((bright_axis(t, ph) - Eigen::Vector3d::Unit(a)).norm(), 1e-12) << a;
  }
  EXPECT_THROW(readout_angles(3), std::out_of_range);
}

TEST(TomoInputs, LabelsAndStates) {
  EXPECT_EQ(to_string(TomoInput::PlusI), "plus_i");
  EXPECT_EQ(tomo_input_from_string("ket_minus1"), TomoInput::KetMinus1);
  EXPECT_THROW(tomo_input_from_string("minus"), std::invalid_argument);
  EXPECT_NEAR(std::real(input_density(TomoInput::KetPlus1)(kQubitPlus1, kQubitPlus1)), 1.0, 1e-15);
  EXPECT_NEAR(std::real(input_density(TomoInput::KetMinus1)(kQubitMinus1, kQubitMinus1)), 1.0, 1e-15);
}

TEST(LinearQpt, IdentityAndX) {
  const ChiMatrix id = qpt_linear([](const Mat2& r) { return r; });
  Mat4 want = Mat4::Zero();
  want(0, 0) = 1.0;
  EXPECT_LT((id.matrix() - want).norm(), 1e-12);

  const ChiMatrix x = qpt_linear(conjugation(pauli(1)));
  want.setZero();
  want(1, 1) = 1.0;
  EXPECT_LT((x.matrix() - want).norm(), 1e-12);
  EXPECT_EQ(dominant_element(x), 1);
}

TEST(LinearQpt, ChiReproducesChannelOnRandomStates) {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const PulsePlan plan = synthesize(HolonomicGateSpec::named("H"), kTwoPi / 1.7);
  const RelaxationParams r;
  const Mat4 s = noisy_drive_channel(plan.drive, r);
  const ChiMatrix chi = qpt_linear([&](const Mat2& rho) { return apply_channel(s, rho); });
  for (int i = 0; i < 20; ++i) {
    const Mat2 rho = density_from_bloch(BlochVector::from(u(rng) * oracle::random_unit(rng)));
    EXPECT_LT((chi.apply(rho) - apply_channel(s, rho)).norm(), 1e-12);
  }
  EXPECT_LT((chi_from_superop(s).matrix() - chi.matrix()).norm(), 1e-12);
}

TEST(LinearQpt, NoisyXPlanIsHermitianWithTraceNearOne) {
  const PulsePlan plan = synthesize(HolonomicGateSpec::named("X"), kTwoPi / 1.7);
  const RelaxationParams r;
  const ChiMatrix chi = qpt_linear([&](const Mat2& rho) { return apply_drive_noisy(rho, plan.drive, r); });
  EXPECT_LT(chi.hermiticity_defect(), 1e-9);
  const double tr = std::real(chi.matrix().trace());
  EXPECT_GE(tr, 0.9);
  EXPECT_LE(tr, 1.0 + 1e-9);
  EXPECT_EQ(dominant_element(chi), 1);
}

TEST(LinearQpt, RandomUnitariesHaveUnitFidelity) {
  std::mt19937_64 rng(33);
  for (int i = 0; i < 100; ++i) {
    const Mat2 u = oracle::random_unitary(rng);
    EXPECT_NEAR(process_fidelity(qpt_linear(conjugation(u)), u), 1.0, 1e-9);
  }
}

TEST(LinearQpt, RecordsNeedAllInputs) {
  auto recs = records_of(conjugation(pauli(1)));
  recs.pop_back();
  EXPECT_THROW(qpt_linear(recs), std::invalid_argument);
}

TEST(ChiOfUnitary, IdentityHadamardAndTrace) {
  const ChiMatrix id = chi_of_unitary(Mat2::Identity());
  EXPECT_NEAR(std::real(id.matrix()(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(id.matrix().norm(), 1.0, 1e-15);

  Mat2 h;
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  const Mat4 c = chi_of_unitary(h).matrix();
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) {
      const bool xz = (m == 1 || m == 3) && (n == 1 || n == 3);
      EXPECT_NEAR(std::abs(c(m, n)), xz ? 0.5 : 0.0, 1e-15) << m << n;
    }

  std::mt19937_64 rng(34);
  for (int i = 0; i < 20; ++i) {
    const Mat2 u = oracle::random_unitary(rng);
    const Eigen::Vector4cd e = pauli_coefficients(u);
    const ChiMatrix chi = chi_of_unitary(u);
    EXPECT_NEAR(std::real(chi.matrix().trace()), 1.0, 1e-12);
    EXPECT_LT((chi.matrix() - e * e.adjoint()).norm(), 1e-12);
    EXPECT_TRUE(chi.satisfies_physical());
  }
  EXPECT_THROW(chi_of_unitary(2.0 * Mat2::Identity()), std::invalid_argument);
}

TEST(ProcessFidelity, AnchorsAndPhaseInvariance) {
  const ChiMatrix x = chi_of_unitary(pauli(1));
  EXPECT_NEAR(process_fidelity(x, pauli(1)), 1.0, 1e-15);
  EXPECT_NEAR(process_fidelity(x, pauli(3)), 0.0, 1e-15);
  std::mt19937_64 rng(35);
  const PulsePlan plan = synthesize(HolonomicGateSpec::named("T"), 2.0);
  const ChiMatrix chi = chi_from_superop(noisy_drive_channel(plan.drive, RelaxationParams{}));
  const Mat2 t = gate_matrix(HolonomicGateSpec::named("T"));
  for (int i = 0; i < 10; ++i) {
    const double a = std::uniform_real_distribution<double>(0.0, kTwoPi)(rng);
    EXPECT_NEAR(process_fidelity(chi, std::polar(1.0, a) * t), process_fidelity(chi, t), 1e-12);
  }
  // The chi-based fidelity equals the superoperator entanglement fidelity.
  EXPECT_NEAR(process_fidelity(chi, t), process_fidelity(noisy_drive_channel(plan.drive, RelaxationParams{}), t),
              1e-12);
}

TEST(PhysicalChecks, ResidualsOfKnownMatrices) {
  EXPECT_NEAR(chi_of_unitary(pauli(2)).tp_residual(), 0.0, 1e-15);
  Mat4 half = Mat4::Zero();
  half(0, 0) = 0.5;
  // sum chi P P = 0.5 * 1, off by 0.5 on both diagonal entries.
  EXPECT_NEAR(ChiMatrix(half).tp_residual(), std::sqrt(0.5), 1e-15);
  Mat4 neg = Mat4::Zero();
  neg(0, 0) = 1.2;
  neg(1, 1) = -0.2;
  EXPECT_NEAR(ChiMatrix(neg).min_eigenvalue(), -0.2, 1e-15);
  EXPECT_FALSE(ChiMatrix(neg).satisfies_physical());
}

TEST(Mle, NoiselessXRecords) {
  const MleResult r = mle_chi(records_of(conjugation(pauli(1))), mle_config());
  EXPECT_GE(std::real(r.chi.matrix()(1, 1)), 0.999);
  EXPECT_TRUE(r.chi.physical());
  EXPECT_TRUE(r.chi.satisfies_physical(1e-4));
  EXPECT_LT(r.residual, 1e-6);
}

TEST(Mle, GaussianBlochNoiseMovesFidelityLittle) {
  const auto clean = records_of(conjugation(pauli(1)));
  const double f0 = process_fidelity(mle_chi(clean, mle_config()).chi, pauli(1));
  std::mt19937_64 rng(36);
  std::normal_distribution<double> g(0.0, 0.05);
  auto noisy = clean;
  for (auto& rec : noisy) rec.bloch = {rec.bloch.x + g(rng), rec.bloch.y + g(rng), rec.bloch.z + g(rng)};
  const MleResult r = mle_chi(noisy, mle_config());
  EXPECT_NEAR(process_fidelity(r.chi, pauli(1)), f0, 0.02);
  EXPECT_GE(r.chi.min_eigenvalue(), -1e-9);
  EXPECT_LE(r.chi.tp_residual(), 1e-4);
}

TEST(Mle, UnphysicalInputStillYieldsPhysicalChi) {
  auto recs = records_of(conjugation(pauli(2)));
  for (auto& rec : recs) rec.bloch = BlochVector::from(1.3 * rec.bloch.vec() + Eigen::Vector3d(0.2, -0.1, 0.1));
  const ChiMatrix raw = qpt_linear(recs);
  EXPECT_GT(raw.tp_residual() + std::max(0.0, -raw.min_eigenvalue()), 1e-3);
  const MleResult r = mle_chi(recs, mle_config(7));
  EXPECT_GE(r.chi.min_eigenvalue(), -1e-9);
  EXPECT_LE(r.chi.tp_residual(), 1e-4);
  EXPECT_LT(r.chi.hermiticity_defect(), 1e-9);
}

TEST(Mle, NoisyGateReconstructionMatchesChannelFidelity) {
  const PulsePlan plan = synthesize(HolonomicGateSpec::named("X"), kTwoPi / 1.7);
  const Mat4 s = noisy_drive_channel(plan.drive, RelaxationParams{});
  const MleResult r = mle_chi(records_of([&](const Mat2& rho) { return apply_channel(s, rho); }), mle_config());
  EXPECT_NEAR(process_fidelity(r.chi, pauli(1)), process_fidelity(s, pauli(1)), 5e-3);
}

TEST(Mle, RejectsIncompleteRecords) {
  auto recs = records_of(conjugation(pauli(1)));
  recs.erase(recs.begin());
  EXPECT_THROW(mle_chi(recs, mle_config()), std::invalid_argument);
  OptimizerConfig bad = mle_config();
  bad.bounds.assign(3, {-1.0, 1.0});
  EXPECT_THROW(mle_chi(records_of(conjugation(pauli(1))), bad), std::invalid_argument);
}

TEST(ChiJson, RoundTrip) {
  const ChiMatrix c = chi_of_unitary(gate_matrix(HolonomicGateSpec::named("S")));
  nlohmann::json j = c;
  EXPECT_EQ(j.at("basis"), "IXYZ");
  EXPECT_EQ(j.at("re").size(), 4u);
  EXPECT_EQ(j.at("im").at(0).size(), 4u);
  const ChiMatrix back = chi_from_json(j);
  EXPECT_EQ(back.matrix(), c.matrix());
  EXPECT_TRUE(back.physical());
  j["basis"] = "PQRS";
  EXPECT_THROW(chi_from_json(j), std::invalid_argument);
}
