#include "oracles.hpp"
#include "rotorsim/actuators.hpp"
#include "rotorsim/controller.hpp"
#include "rotorsim/dynamics.hpp"

#include <doctest.h>

using namespace rotorsim;

TEST_CASE("hover on target gives weight thrust and no moment") {
  for (const VehicleParams& p : {default_quadrotor(), crazyflie_like()}) {
    Se3Controller c(p, default_gains(p.name));
    HoverSpec h;
    const VehicleState s = VehicleState::hover(p, h.position);
    const ControlOutput out = c.compute(s, evaluate(h, 0.0));
    CHECK(out.thrust == doctest::Approx(p.mass * p.gravity).epsilon(1e-12));
    CHECK(out.moment.norm() < 1e-12);
    CHECK_FALSE(out.degenerate);
  }
}

TEST_CASE("error signs") {
  const VehicleParams p = default_quadrotor();
  Se3Controller c(p, GainSet{});
  HoverSpec h;
  VehicleState s = VehicleState::hover(p, h.position - Vec3(0, 0, 0.2));
  CHECK(c.compute(s, evaluate(h, 0)).thrust > p.mass * p.gravity);

  // target ahead in +x: tilt the thrust axis toward +x, a positive pitch moment
  s = VehicleState::hover(p, h.position - Vec3(0.5, 0, 0));
  CHECK(c.compute(s, evaluate(h, 0)).moment.y() > 0);
  // target to the left in +y: negative roll moment
  s = VehicleState::hover(p, h.position - Vec3(0, 0.5, 0));
  CHECK(c.compute(s, evaluate(h, 0)).moment.x() < 0);
}

TEST_CASE("vanishing desired force holds the last attitude") {
  const VehicleParams p = default_quadrotor();
  Se3Controller c(p, GainSet{});
  FlatOutput f;
  f.position = Vec3(0, 0, 1);
  const VehicleState s = VehicleState::hover(p, f.position);
  c.compute(s, f);
  f.acceleration = Vec3(0, 0, -p.gravity);
  const ControlOutput out = c.compute(s, f);
  CHECK(out.degenerate);
  CHECK(out.attitude_des.angularDistance(Quat::Identity()) < 1e-12);
  CHECK(std::isfinite(out.thrust));
}

TEST_CASE("non-positive gains rejected") {
  GainSet g;
  g.k_R.x() = 0.0;
  CHECK_THROWS(Se3Controller(default_quadrotor(), g));
}

TEST_CASE("closed loop recovers hover from an offset") {
  const VehicleParams p = default_quadrotor();
  Se3Controller c(p, GainSet{});
  const Mixer mixer(p);
  HoverSpec h;
  VehicleState s = VehicleState::hover(p, h.position + Vec3(0.3, -0.2, 0.1));
  const double dt = 0.002;
  for (int k = 0; k < 5000; ++k) {
    const auto out = c.compute(s, evaluate(h, s.time));
    s = integrate(s, mixer.mix(out.thrust, out.moment).eta_c, Vec3(0, 0, 0), p, dt);
  }
  CHECK((s.position - h.position).norm() < 1e-3);
  CHECK(s.velocity.norm() < 1e-3);
}
