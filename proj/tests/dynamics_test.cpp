// Copyright 2026 The gravcomp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gravcomp/dynamics.hpp"

#include <gtest/gtest.h>

#include "gravcomp/errors.hpp"
#include "gravcomp/kinematics.hpp"
#include "test_support.hpp"

namespace gravcomp {
namespace {

using testing::kPi;

// Five-point first derivative of f along a scalar parameter.
template <typename F>
auto five_point(F&& f, double h) {
  using Result = std::decay_t<decltype(f(0.0))>;
  return Result((f(-2 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2 * h)) / (12.0 * h));
}

// Kinetic energy from positions and orientations only: link velocities come
// from differentiating forward kinematics along qd.
double lagrangian_kinetic(const RobotModel& model, const Eigen::VectorXd& q,
                          const Eigen::VectorXd& qd) {
  constexpr double h = 1e-3;
  const std::size_t n = model.dof();
  double energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& dyn = model.link(i).dynamics;
    const auto pose = [&](double s) {
      return forward_kinematics(model, q + s * qd).transforms[i];
    };
    const auto com = [&](double s) -> Eigen::Vector3d {
      const Eigen::Matrix4d t = pose(s);
      return t.topLeftCorner<3, 3>() * dyn.com + t.topRightCorner<3, 1>();
    };
    const auto rot = [&](double s) -> Eigen::Matrix3d {
      return pose(s).topLeftCorner<3, 3>();
    };
    const Eigen::Vector3d v = five_point(com, h);
    const Eigen::Matrix3d rdot = five_point(rot, h);
    const Eigen::Matrix3d r = rot(0.0);
    const Eigen::Matrix3d skew = rdot * r.transpose();
    const Eigen::Vector3d w(skew(2, 1), skew(0, 2), skew(1, 0));
    energy += 0.5 * dyn.mass * v.squaredNorm() +
              0.5 * w.dot(r * dyn.inertia * r.transpose() * w);
    const double rate = qd[static_cast<Eigen::Index>(i)];
    energy += 0.5 * dyn.gear_ratio * dyn.gear_ratio * dyn.motor_inertia * rate * rate;
  }
  return energy;
}

// Lagrangian inertia by polarisation of the (exactly quadratic) kinetic energy.
Eigen::MatrixXd lagrangian_mass(const RobotModel& model, const Eigen::VectorXd& q) {
  const auto n = static_cast<Eigen::Index>(model.dof());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::VectorXd ei = Eigen::VectorXd::Unit(n, i);
      const Eigen::VectorXd ej = Eigen::VectorXd::Unit(n, j);
      m(i, j) = lagrangian_kinetic(model, q, ei + ej) -
                lagrangian_kinetic(model, q, ei) - lagrangian_kinetic(model, q, ej);
    }
  }
  return m;
}

// tau = M qdd + (dM/dt) qd - dT/dq + dV/dq.
Eigen::VectorXd lagrangian_torque(const RobotModel& model, const JointState& s) {
  constexpr double h = 1e-3;
  const auto n = static_cast<Eigen::Index>(model.dof());
  const auto mass_along = [&](double t) -> Eigen::MatrixXd {
    return lagrangian_mass(model, s.q + t * s.qd);
  };
  const Eigen::MatrixXd mdot = five_point(mass_along, h);
  Eigen::VectorXd tau = lagrangian_mass(model, s.q) * s.qdd + mdot * s.qd;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::VectorXd ek = Eigen::VectorXd::Unit(n, k);
    const auto t_along = [&](double t) {
      const Eigen::MatrixXd m = lagrangian_mass(model, s.q + t * ek);
      return 0.5 * s.qd.dot(m * s.qd);
    };
    const auto v_along = [&](double t) {
      return potential_energy(model, s.q + t * ek);
    };
    tau[k] += -five_point(t_along, h) + five_point(v_along, h);
  }
  return tau;
}

// Preset with a spread of COM offsets so off-axis terms are exercised.
RobotModel offset_preset() {
  auto links = exoskeleton_default().links();
  links[0].dynamics.com = {0.01, 0.02, -0.01};
  links[1].dynamics.com = {-0.06, 0.01, 0.0};
  links[2].dynamics.com = {-0.1, 0.0, 0.02};
  links[3].dynamics.com = {-0.12, -0.01, 0.0};
  links[1].dynamics.inertia(0, 0) = 1e-4;
  links[1].dynamics.inertia(0, 1) = links[1].dynamics.inertia(1, 0) = 2e-5;
  return RobotModel(links, {0.0, 0.0, -9.8});
}

JointState random_state(std::mt19937_64& rng, Eigen::Index n) {
  return {testing::random_q(rng, n), testing::random_q(rng, n, 2.0),
          testing::random_q(rng, n, 5.0)};
}

TEST(DynamicsTest, MasslessChainNeedsNoTorque) {
  auto links = exoskeleton_default().links();
  for (auto& link : links) {
    link.dynamics.mass = 0.0;
    link.dynamics.inertia.setZero();
    link.dynamics.motor_inertia = 0.0;
  }
  const RobotModel model(links, {0, 0, -9.8});
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto tau = rne(model, random_state(rng, 4), model.gravity());
    EXPECT_EQ(tau, Eigen::VectorXd::Zero(4));
  }
}

TEST(DynamicsTest, HorizontalPendulumTorque) {
  const auto model = testing::pendulum(2.0, 0.3);
  const auto tau = rne(model, JointState::at_rest(Eigen::VectorXd::Zero(1)),
                       model.gravity());
  EXPECT_NEAR(tau[0], 2.0 * 9.8 * 0.3, 1e-12);
}

TEST(DynamicsTest, MatchesLagrangianOracle) {
  const auto model = offset_preset();
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto state = random_state(rng, 4);
    const auto expected = lagrangian_torque(model, state);
    const auto actual = rne(model, state, model.gravity());
    EXPECT_LT((expected - actual).cwiseAbs().maxCoeff(), 1e-7)
        << "expected " << expected.transpose() << "\nactual " << actual.transpose();
  }
}

TEST(DynamicsTest, ZeroGravityLoadsNothing) {
  std::mt19937_64 rng(3);
  const auto tau = grav_load(exoskeleton_default(), testing::random_q(rng, 4),
                             Eigen::Vector3d::Zero());
  EXPECT_EQ(tau, Eigen::VectorXd::Zero(4));
}

TEST(DynamicsTest, OuterJointsUnloadedWithArmHorizontalAndStraight) {
  // Equation pose (free, -pi/2, 0, 0): the calibrated convention negates the
  // motor angles, so joint 2 sits at +pi/2 and joints 3, 4 turn about the
  // vertical.
  const auto model = exoskeleton_default();
  for (double q1 : {0.0, 0.7, -2.0}) {
    const auto tau = grav_load(model, Eigen::Vector4d(q1, kPi / 2, 0.0, 0.0));
    EXPECT_NEAR(tau[2], 0.0, 1e-12);
    EXPECT_NEAR(tau[3], 0.0, 1e-12);
    EXPECT_GT(std::abs(tau[1]), 1.0);
  }
}

TEST(DynamicsTest, GravityLoadIsEnergyGradient) {
  for (const auto& model : {exoskeleton_default(), offset_preset()}) {
    std::mt19937_64 rng(4);
    constexpr double h = 1e-6;
    for (int trial = 0; trial < 100; ++trial) {
      const auto q = testing::random_q(rng, 4);
      const auto tau = grav_load(model, q);
      for (Eigen::Index k = 0; k < 4; ++k) {
        const Eigen::VectorXd ek = Eigen::VectorXd::Unit(4, k);
        const double dv =
            (potential_energy(model, q + h * ek) - potential_energy(model, q - h * ek)) /
            (2 * h);
        ASSERT_LT(std::abs(tau[k] - dv), 1e-6);
      }
    }
  }
}

TEST(DynamicsTest, GravityLoadLinearInGravity) {
  const auto model = offset_preset();
  std::mt19937_64 rng(5);
  const Eigen::Vector3d g(1.0, -2.0, -9.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto q = testing::random_q(rng, 4);
    const auto base = grav_load(model, q, g);
    for (double a : {-1.0, 0.5, 3.0}) {
      EXPECT_LT((grav_load(model, q, a * g) - a * base).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(DynamicsTest, PendulumInertia) {
  const auto model = testing::pendulum(2.0, 0.3, 1e-4, 6.0);
  std::mt19937_64 rng(6);
  const auto mass = mass_matrix(model, testing::random_q(rng, 1));
  EXPECT_NEAR(mass(0, 0), 2.0 * 0.09 + 2.0 / 12.0 + 36.0 * 1e-4, 1e-14);
}

TEST(DynamicsTest, MassMatrixSymmetricPositiveDefinite) {
  const auto model = offset_preset();
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto mass = mass_matrix(model, testing::random_q(rng, 4));
    ASSERT_LT((mass - mass.transpose()).cwiseAbs().maxCoeff(), 1e-10);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(mass);
    ASSERT_GT(eig.eigenvalues().minCoeff(), 0.0);
  }
}

TEST(DynamicsTest, MassMatrixMatchesKineticEnergyPolarisation) {
  const auto model = offset_preset();
  std::mt19937_64 rng(8);
  const auto q = testing::random_q(rng, 4);
  EXPECT_LT((mass_matrix(model, q) - lagrangian_mass(model, q)).cwiseAbs().maxCoeff(),
            1e-9);
}

TEST(DynamicsTest, VelocityTermsVanishAtRest) {
  std::mt19937_64 rng(9);
  const auto tau = velocity_terms(offset_preset(), testing::random_q(rng, 4),
                                  Eigen::VectorXd::Zero(4));
  EXPECT_EQ(tau, Eigen::VectorXd::Zero(4));
}

TEST(DynamicsTest, VelocityTermsQuadratic) {
  const auto model = offset_preset();
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const auto q = testing::random_q(rng, 4);
    const auto qd = testing::random_q(rng, 4, 3.0);
    const auto once = velocity_terms(model, q, qd);
    const auto twice = velocity_terms(model, q, 2.0 * qd);
    ASSERT_LT((twice - 4.0 * once).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(DynamicsTest, DecompositionCloses) {
  const auto model = offset_preset();
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = random_state(rng, 4);
    const Eigen::VectorXd rebuilt = mass_matrix(model, s.q) * s.qdd +
                                    velocity_terms(model, s.q, s.qd) +
                                    grav_load(model, s.q);
    ASSERT_LT((rne(model, s, model.gravity()) - rebuilt).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(DynamicsTest, FrictionValues) {
  Link link;
  link.dh.a = 1.0;
  link.dynamics.mass = 1.0;
  link.dynamics.viscous = 0.1;
  link.dynamics.coulomb = 0.05;
  const RobotModel model({link, link}, {0, 0, -9.8});
  EXPECT_EQ(friction_torque(model, Eigen::VectorXd::Zero(2)), Eigen::VectorXd::Zero(2));
  const auto tau = friction_torque(model, Eigen::Vector2d(1.0, 0.0));
  EXPECT_NEAR(tau[0], 0.15, 1e-15);
  EXPECT_EQ(tau[1], 0.0);
  // Inside the smoothing band the Coulomb part ramps through zero.
  EXPECT_NEAR(friction_torque(model, Eigen::Vector2d(1e-3, 0.0))[0],
              1e-4 + 0.05 * std::tanh(1.0), 1e-15);
}

TEST(DynamicsTest, FrictionIsOdd) {
  const auto model = exoskeleton_default();
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto qd = testing::random_q(rng, 4, trial % 2 ? 1e-2 : 5.0);
    ASSERT_EQ(friction_torque(model, -qd), -friction_torque(model, qd));
  }
}

TEST(DynamicsTest, ExactCompensationHolds) {
  const auto model = exoskeleton_default();
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto q = testing::random_q(rng, 4);
    const auto qdd =
        forward_dynamics(model, q, Eigen::VectorXd::Zero(4), grav_load(model, q));
    ASSERT_LT(qdd.cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(DynamicsTest, PendulumFallsAtClosedFormRate) {
  const double m = 2.0, lc = 0.3, jm = 1e-4, gear = 6.0;
  const auto model = testing::pendulum(m, lc, jm, gear);
  const auto qdd = forward_dynamics(model, Eigen::VectorXd::Zero(1),
                                    Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1));
  EXPECT_NEAR(qdd[0], -m * 9.8 * lc / (m * lc * lc + m / 12.0 + gear * gear * jm),
              1e-12);
}

TEST(DynamicsTest, ForwardInverseRoundTrip) {
  const auto model = offset_preset();
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const auto q = testing::random_q(rng, 4);
    const auto qd = testing::random_q(rng, 4, 2.0);
    const auto tau = testing::random_q(rng, 4, 5.0);
    const auto qdd = forward_dynamics(model, q, qd, tau);
    const Eigen::VectorXd back =
        rne(model, {q, qd, qdd}, model.gravity()) + friction_torque(model, qd);
    ASSERT_LT((back - tau).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(DynamicsTest, SingularInertiaIsReported) {
  Link link;
  link.dh.a = 1.0;
  const RobotModel model({link}, {0, -9.8, 0});
  EXPECT_THROW(forward_dynamics(model, Eigen::VectorXd::Zero(1),
                                Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)),
               SingularMatrixError);
}

TEST(DynamicsTest, TipWrenchMapsThroughJacobianTranspose) {
  const auto model = offset_preset();
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_state(rng, 4);
    Wrench w;
    w.force = Eigen::Vector3d::Random() * 10.0;
    w.moment = Eigen::Vector3d::Random();
    Eigen::Matrix<double, 6, 1> stacked;
    stacked << w.force, w.moment;
    const Eigen::VectorXd expected =
        geometric_jacobian(model, s.q).transpose() * stacked;
    const Eigen::VectorXd actual =
        rne(model, s, model.gravity(), w) - rne(model, s, model.gravity());
    ASSERT_LT((expected - actual).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(DynamicsTest, DimensionMismatchIsReported) {
  const auto model = exoskeleton_default();
  const Eigen::VectorXd ok = Eigen::VectorXd::Zero(4);
  const Eigen::VectorXd bad = Eigen::VectorXd::Zero(3);
  EXPECT_THROW(rne(model, {ok, bad, ok}, model.gravity()), DimensionError);
  EXPECT_THROW(grav_load(model, bad), DimensionError);
  EXPECT_THROW(mass_matrix(model, bad), DimensionError);
  EXPECT_THROW(velocity_terms(model, ok, bad), DimensionError);
  EXPECT_THROW(friction_torque(model, bad), DimensionError);
  EXPECT_THROW(forward_dynamics(model, ok, ok, bad), DimensionError);
}

TEST(DynamicsTest, UprightBodyKeepsStandardGravity) {
  EXPECT_EQ(rotated_gravity(0.0, 0.0), Eigen::Vector3d(0.0, 0.0, -9.8));
}

TEST(DynamicsTest, QuarterBowPutsGravityAlongX) {
  const auto g = rotated_gravity(kPi / 2, 0.0);
  EXPECT_NEAR(std::abs(g.x()), 9.8, 1e-14);
  EXPECT_NEAR(g.y(), 0.0, 1e-14);
  EXPECT_NEAR(g.z(), 0.0, 1e-14);
  const auto tilt = rotated_gravity(0.0, kPi / 2);
  EXPECT_NEAR(std::abs(tilt.y()), 9.8, 1e-14);
  EXPECT_NEAR(tilt.x(), 0.0, 1e-14);
}

TEST(DynamicsTest, RotatedGravityKeepsMagnitude) {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 100; ++trial) {
    const auto angles = testing::random_q(rng, 2);
    const auto g = rotated_gravity(angles[0], angles[1]);
    ASSERT_NEAR(g.norm(), 9.8, 1e-13);
    ASSERT_EQ(g, rotate_gravity({0.0, 0.0, -9.8}, angles[0], angles[1]));
  }
}

TEST(DynamicsTest, PassiveSwingConservesEnergy) {
  const auto model = exoskeleton_default().without_friction();
  Eigen::VectorXd q(4), qd(4);
  q << 0.3, 2.0, 0.5, 1.0;
  qd << 0.5, -0.5, 1.0, 0.0;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(4);
  const auto energy = [&] {
    return kinetic_energy(model, q, qd) + potential_energy(model, q);
  };
  const auto accel = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& v) {
    return forward_dynamics(model, x, v, zero);
  };
  const double e0 = energy();
  constexpr double dt = 1e-3;
  double worst = 0.0;
  for (int step = 0; step < 10000; ++step) {
    const Eigen::VectorXd k1v = accel(q, qd), k1x = qd;
    const Eigen::VectorXd k2v = accel(q + dt / 2 * k1x, qd + dt / 2 * k1v);
    const Eigen::VectorXd k2x = qd + dt / 2 * k1v;
    const Eigen::VectorXd k3v = accel(q + dt / 2 * k2x, qd + dt / 2 * k2v);
    const Eigen::VectorXd k3x = qd + dt / 2 * k2v;
    const Eigen::VectorXd k4v = accel(q + dt * k3x, qd + dt * k3v);
    const Eigen::VectorXd k4x = qd + dt * k3v;
    q += dt / 6 * (k1x + 2 * k2x + 2 * k3x + k4x);
    qd += dt / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
    worst = std::max(worst, std::abs(energy() - e0));
  }
  EXPECT_LT(worst, 1e-4);
}

}  // namespace
}  // namespace gravcomp
