#include "nvholo/holonomy.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace nvholo;

namespace {

LambdaDrive drive(double theta, double phi, double omega, double delta, double duration = 0.0) {
  LambdaDrive d;
  d.theta = theta;
  d.phi = phi;
  d.omega = omega;
  d.delta = delta;
  d.duration = duration;
  return d;
}

LambdaDrive random_drive(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> th(0.0, kPi), ph(0.0, kTwoPi), om(0.5, 3.0), de(-4.0, 4.0);
  return drive(th(rng), ph(rng), om(rng), de(rng));
}

Mat2 textbook(const char* name) {
  const double s = 1.0 / std::sqrt(2.0);
  Mat2 m;
  if (std::string(name) == "X") m << 0, 1, 1, 0;
  if (std::string(name) == "Y") m << 0, -kI, kI, 0;
  if (std::string(name) == "Z") m << 1, 0, 0, -1;
  if (std::string(name) == "H") m << s, s, s, -s;
  if (std::string(name) == "S") m << 1, 0, 0, kI;
  if (std::string(name) == "T") m << 1, 0, 0, std::polar(1.0, kPi / 4);
  return m;
}

}  // namespace

TEST(BrightDark, Anchors) {
  const auto p0 = bright_dark(0.0, 1.3);
  EXPECT_NEAR(std::abs(p0.bright(kQubitMinus1)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(p0.dark(kQubitPlus1)), 1.0, 1e-15);
  const auto px = bright_dark(kPi / 2, 0.0);
  EXPECT_LT((px.bright - Vec2(1.0, 1.0) / std::sqrt(2.0)).norm(), 1e-15);
}

TEST(BrightDark, MatchesDefinitionAndIsOrthonormal) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> th(0.0, kPi), ph(0.0, kTwoPi);
  for (int i = 0; i < 100; ++i) {
    const double t = th(rng), p = ph(rng);
    const auto bd = bright_dark(t, p);
    // bright = sin(t/2)|+1> + e^{ip} cos(t/2)|-1>, dark = cos(t/2)|+1> - e^{ip} sin(t/2)|-1>.
    EXPECT_NEAR(std::abs(bd.bright(kQubitPlus1) - std::sin(t / 2)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(bd.bright(kQubitMinus1) - std::polar(std::cos(t / 2), p)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(bd.dark(kQubitPlus1) - std::cos(t / 2)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(bd.dark(kQubitMinus1) + std::polar(std::sin(t / 2), p)), 0.0, 1e-15);
    EXPECT_LT(std::abs(bd.bright.dot(bd.dark)), 1e-12);
    EXPECT_NEAR(bd.bright.norm(), 1.0, 1e-12);
  }
}

TEST(BrightDark, AxisAnglesRoundTrip) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    const Eigen::Vector3d n = oracle::random_unit(rng);
    const PolarizationAngles a = angles_from_axis(n);
    EXPECT_LT((bright_axis(a.theta, a.phi) - n).norm(), 1e-12);
    const Vec2 b = bright_dark(a.theta, a.phi).bright;
    EXPECT_LT((oracle::bloch(b * b.adjoint()) - n).norm(), 1e-12);
    const PolarizationAngles back = angles_from_bright(std::polar(1.0, 0.4) * b);
    EXPECT_NEAR(back.theta, a.theta, 1e-9);
    EXPECT_NEAR(std::remainder(back.phi - a.phi, kTwoPi), 0.0, 1e-9);
  }
}

TEST(GeometricPhase, SpotChecks) {
  const double om = 1.9;
  EXPECT_NEAR(geometric_phase(om, 0.0), kPi, 1e-12);
  EXPECT_NEAR(geometric_phase(om, om / std::sqrt(3.0)), kPi / 2, 1e-12);
  EXPECT_NEAR(geometric_phase(om, 3 * om / std::sqrt(7.0)), kPi / 4, 1e-12);
  EXPECT_LT(geometric_phase(om, 1e6 * om), 1e-5);
  EXPECT_GT(geometric_phase(om, -1e6 * om), kTwoPi - 1e-5);
  EXPECT_THROW(geometric_phase(0.0, 1.0), std::invalid_argument);
}

TEST(GeometricPhase, HalfSolidAngle) {
  // The pseudo-spin axis (Omega, 0, -Delta)/Omega_eff precesses the bright state around a cone whose
  // solid angle is 2 pi (1 - cos a) with cos a = Delta/Omega_eff.
  for (double de : {-2.0, -0.3, 0.0, 0.8, 5.0}) {
    const double om = 1.1, c = de / std::hypot(om, de);
    EXPECT_NEAR(geometric_phase(om, de), 0.5 * kTwoPi * (1 - c), 1e-12);
  }
}

TEST(Evolution, IdentityAtZeroTime) {
  EXPECT_LT((evolution_operator(drive(0.4, 1.0, 1.0, 0.3), 0.0) - Mat3::Identity()).norm(), 1e-15);
}

TEST(Evolution, MatchesMatrixExponential) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> tt(0.0, 10.0);
  for (int i = 0; i < 50; ++i) {
    const LambdaDrive d = random_drive(rng);
    const double t = tt(rng);
    const Eigen::MatrixXcd want = oracle::propagator(h_lambda(d), t);
    EXPECT_LT((evolution_operator(d, t) - want).norm(), 1e-12);
  }
}

TEST(Evolution, RoundTripClosedForm) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 50; ++i) {
    const LambdaDrive d = random_drive(rng);
    const Mat3 u = evolution_operator(d, d.cycle_time());
    const double g = geometric_phase(d.omega, d.delta);
    const auto bd = bright_dark(d.theta, d.phi);
    const Mat2 want = std::polar(1.0, -g) * bd.bright * bd.bright.adjoint() + bd.dark * bd.dark.adjoint();
    EXPECT_LT((qubit_block(u) - want).norm(), 1e-12);
    EXPECT_NEAR(std::abs(u(kLambdaA2, kLambdaA2)), 1.0, 1e-12);
  }
}

TEST(Evolution, ResonantHalfRabiTransfersBright) {
  const double om = 1.3;
  const LambdaDrive d = drive(0.9, 2.0, om, 0.0);
  const Vec3 b = embed_qubit_ket_in_lambda(bright_dark(d.theta, d.phi).bright);
  const Vec3 out = evolution_operator(d, kPi / om) * b;
  EXPECT_NEAR(std::norm(out(kLambdaA2)), 1.0, 1e-12);
}

TEST(Holonomy, NamedParameterSets) {
  EXPECT_TRUE(phase_unitary_equal(holonomy_unitary(drive(kPi / 2, 0.0, 1.0, 0.0)), textbook("X")).equal);
  EXPECT_TRUE(phase_unitary_equal(holonomy_unitary(drive(kPi / 4, 0.0, 1.0, 0.0)), textbook("H")).equal);
  EXPECT_TRUE(phase_unitary_equal(holonomy_unitary(drive(0.0, 0.0, 1.0, 1.0 / std::sqrt(3.0))), textbook("S")).equal);
  EXPECT_TRUE(phase_unitary_equal(holonomy_unitary(drive(0.0, 0.0, 1.0, 3.0 / std::sqrt(7.0))), textbook("T")).equal);
}

TEST(Holonomy, UnitaryAndDarkInert) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const LambdaDrive d = random_drive(rng);
    const Mat2 u = holonomy_unitary(d);
    EXPECT_LT((u.adjoint() * u - Mat2::Identity()).norm(), 1e-12);
    const Vec2 dark = bright_dark(d.theta, d.phi).dark;
    EXPECT_NEAR(std::norm(dark.dot(u * dark)), 1.0, 1e-12);
  }
}

TEST(Holonomy, ConsistentWithCyclicEvolution) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 200; ++i) {
    const LambdaDrive d = random_drive(rng);
    const Mat2 block = qubit_block(evolution_operator(d, d.cycle_time()));
    EXPECT_LT(oracle::phase_distance(block, holonomy_unitary(d)), 1e-9);
  }
}

TEST(Holonomy, NonAbelian) {
  const double om = 1.0;
  const Mat2 ux = holonomy_unitary(synthesize(HolonomicGateSpec::named("X"), om).drive);
  const Mat2 uz = holonomy_unitary(synthesize(HolonomicGateSpec::named("Z"), om).drive);
  EXPECT_GT((ux * uz - uz * ux).norm(), 0.1);
}

TEST(Synthesis, SAndXParameters) {
  const double om = 2.2;
  const PulsePlan s = synthesize(HolonomicGateSpec::explicit_rotation({0, 0, 1}, kPi / 2), om);
  EXPECT_NEAR(s.drive.delta, om / std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(s.drive.duration, std::sqrt(3.0) * kPi / om, 1e-12);
  EXPECT_NEAR(s.drive.theta, 0.0, 1e-12);

  const PulsePlan x = synthesize(HolonomicGateSpec::named("X"), om);
  EXPECT_NEAR(x.drive.theta, kPi / 2, 1e-12);
  EXPECT_NEAR(x.drive.phi, 0.0, 1e-12);
  EXPECT_NEAR(x.drive.delta, 0.0, 1e-12);
  EXPECT_NEAR(x.drive.duration, kTwoPi / om, 1e-12);
}

TEST(Synthesis, RkIsZRotationByTwoPiOverPowerOfTwo) {
  for (int k = 1; k <= 5; ++k) {
    const auto spec = HolonomicGateSpec::named("R_k", k);
    EXPECT_LT((spec.axis() - Eigen::Vector3d(0, 0, 1)).norm(), 1e-15);
    EXPECT_NEAR(spec.angle(), kTwoPi / std::pow(2.0, k), 1e-15);
    Mat2 rk = Mat2::Identity();
    rk(1, 1) = std::polar(1.0, kTwoPi / std::pow(2.0, k));
    EXPECT_LT((gate_matrix(spec) - rk).norm(), 1e-15);
    EXPECT_TRUE(phase_unitary_equal(holonomy_unitary(synthesize(spec, 1.0).drive), rk).equal) << k;
  }
  EXPECT_EQ(HolonomicGateSpec::named("R3").k(), 3);
  EXPECT_THROW(HolonomicGateSpec::named("R_k"), std::invalid_argument);
}

TEST(Synthesis, NamedGatesMatchTextbook) {
  for (const char* n : {"X", "Y", "Z", "H", "S", "T"}) {
    const auto spec = HolonomicGateSpec::named(n);
    EXPECT_LT((gate_matrix(spec) - textbook(n)).norm(), 1e-15) << n;
    const PulsePlan plan = synthesize(spec, 1.4);
    EXPECT_LT(oracle::phase_distance(holonomy_unitary(plan.drive), textbook(n)), 1e-9) << n;
  }
}

TEST(Synthesis, PlanInvariants) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ang(0.01, kTwoPi - 0.01);
  for (int i = 0; i < 200; ++i) {
    const auto spec = HolonomicGateSpec::explicit_rotation(oracle::random_unit(rng), ang(rng));
    const double om = 0.7;
    const PulsePlan plan = synthesize(spec, om);
    EXPECT_NEAR(plan.omega_eff * plan.omega_eff, om * om + plan.drive.delta * plan.drive.delta, 1e-9);
    EXPECT_NEAR(plan.drive.duration * plan.omega_eff, kTwoPi, 1e-9);
    EXPECT_NEAR(geometric_phase(om, plan.drive.delta), spec.angle(), 1e-9);
    const Mat2 want = oracle::axis_rotation(spec.axis(), spec.angle());
    const auto cmp = phase_unitary_equal(holonomy_unitary(plan.drive), gate_matrix(spec));
    EXPECT_TRUE(cmp.equal) << cmp.distance;
    EXPECT_LT(oracle::phase_distance(holonomy_unitary(plan.drive), want), 1e-9);
  }
}

TEST(Synthesis, DetuningShortensCycle) {
  double last = std::numeric_limits<double>::infinity();
  for (double g = kPi; g > 0.05; g -= 0.1) {
    const PulsePlan plan = synthesize(HolonomicGateSpec::explicit_rotation({0, 0, 1}, g), 1.0);
    EXPECT_LT(plan.drive.duration, last);
    last = plan.drive.duration;
  }
  last = std::numeric_limits<double>::infinity();
  for (double g = kPi; g < kTwoPi - 0.05; g += 0.1) {
    const PulsePlan plan = synthesize(HolonomicGateSpec::explicit_rotation({0, 0, 1}, g), 1.0);
    EXPECT_LE(plan.drive.duration, last + 1e-15);
    last = plan.drive.duration;
  }
}

TEST(Synthesis, RejectsDegenerateSpecs) {
  EXPECT_THROW(HolonomicGateSpec::explicit_rotation({0, 0, 1}, 0.0), std::invalid_argument);
  EXPECT_THROW(HolonomicGateSpec::explicit_rotation({0, 0, 1}, kTwoPi), std::invalid_argument);
  EXPECT_THROW(HolonomicGateSpec::explicit_rotation({0, 0, 2}, 1.0), std::invalid_argument);
  EXPECT_THROW(synthesize(HolonomicGateSpec::named("X"), 0.0), std::invalid_argument);
}

TEST(Synthesis, NegativeAngleIsSameRotation) {
  const Eigen::Vector3d n = Eigen::Vector3d(1, 2, -1).normalized();
  const auto spec = HolonomicGateSpec::explicit_rotation(n, -1.0);
  EXPECT_GT(spec.angle(), 0.0);
  EXPECT_LT(spec.angle(), kTwoPi);
  EXPECT_LT(oracle::phase_distance(gate_matrix(spec), oracle::axis_rotation(n, -1.0)), 1e-12);
  EXPECT_LT(oracle::phase_distance(holonomy_unitary(synthesize(spec, 1.0).drive), oracle::axis_rotation(n, -1.0)),
            1e-9);
}

TEST(Synthesis, MultiTurnPlans) {
  const auto spec = HolonomicGateSpec::named("T");
  const PulsePlan one = synthesize(spec, 1.0);
  const PulsePlan three = synthesize(spec, 1.0, 3);
  EXPECT_NEAR(three.drive.duration, 3 * one.drive.duration, 1e-12);
  EXPECT_NEAR(three.gamma, std::fmod(3 * one.gamma, kTwoPi), 1e-12);
  const Mat3 u = evolution_operator(three.drive, three.drive.duration);
  EXPECT_LT(oracle::phase_distance(qubit_block(u), oracle::axis_rotation({0, 0, 1}, 3 * kPi / 4)), 1e-9);
}

TEST(GateMatrix, ExplicitZPi) {
  Mat2 z;
  z << 1, 0, 0, -1;
  EXPECT_TRUE(phase_unitary_equal(gate_matrix(HolonomicGateSpec::explicit_rotation({0, 0, 1}, kPi)), z).equal);
}

TEST(PhaseEqual, Basics) {
  std::mt19937_64 rng(8);
  const Mat2 u = oracle::random_unitary(rng);
  const auto same = phase_unitary_equal(u, std::polar(1.0, kPi / 7) * u);
  EXPECT_TRUE(same.equal);
  EXPECT_LT(same.distance, 1e-12);
  const auto diff = phase_unitary_equal(textbook("X"), textbook("Z"));
  EXPECT_FALSE(diff.equal);
  EXPECT_NEAR(diff.distance, 2.0, 1e-12);
  Mat2 bad = Mat2::Identity();
  bad(0, 0) = 1.1;
  EXPECT_THROW(phase_unitary_equal(bad, u), std::invalid_argument);
}

TEST(PulsePlanJson, RoundTripAndKeys) {
  const PulsePlan p = synthesize(HolonomicGateSpec::named("S"), mhz_to_angular(250.0));
  nlohmann::json j = p;
  for (const char* key : {"theta_rad", "phi_rad", "delta_mhz", "omega_mhz", "duration_ns", "gamma_rad"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_NEAR(j.at("delta_mhz").get<double>(), 250.0 / std::sqrt(3.0), 1e-9);
  const PulsePlan back = j.get<PulsePlan>();
  EXPECT_NEAR(back.drive.delta, p.drive.delta, 1e-12);
  EXPECT_NEAR(back.drive.duration, p.drive.duration, 1e-12);
  EXPECT_NEAR(back.gamma, p.gamma, 1e-12);
}
