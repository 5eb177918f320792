#include "oracles.hpp"
#include "rotorsim/aero.hpp"

#include <doctest.h>

using namespace rotorsim;

namespace {

VehicleParams draggy() {
  VehicleParams p = default_quadrotor();
  p.k_flap = 2e-5;
  return p;
}

}  // namespace

TEST_CASE("each drag term opposes its own airspeed") {
  std::mt19937_64 rng(20);
  const VehicleParams p = draggy();
  for (int i = 0; i < 1000; ++i) {
    const Vec3 va = oracle::random_vec(rng, 10.0);
    CHECK(aero::parasitic_drag(va, p.parasitic_drag).dot(va) <= 0.0);
    CHECK(aero::rotor_drag(va, 600.0, p.rotor_drag_diag()).dot(va) <= 0.0);
  }
}

TEST_CASE("parasitic drag is quadratic in airspeed") {
  const Vec3 c(1e-3, 2e-3, 3e-3);
  const Vec3 va(1.0, -2.0, 0.5);
  CHECK((aero::parasitic_drag(2.0 * va, c) - 4.0 * aero::parasitic_drag(va, c)).norm() < 1e-15);
  CHECK((aero::parasitic_drag(va, c) + c.cwiseProduct(va) * va.norm()).norm() < 1e-16);
}

TEST_CASE("rotor airspeed adds the rigid-body rotation") {
  const Vec3 va(1, 2, 3), w(0.1, -0.2, 0.3), r(0.2, -0.1, 0.05);
  const Vec3 expected = va + oracle::vec(oracle::cross(oracle::arr(w), oracle::arr(r)));
  CHECK((aero::rotor_airspeed(va, w, r) - expected).norm() < 1e-15);
}

TEST_CASE("body airspeed rotates the relative wind into the body frame") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 100; ++i) {
    const Quat q = oracle::random_attitude(rng);
    const Vec3 v = oracle::random_vec(rng, 5.0), w = oracle::random_vec(rng, 5.0);
    const auto R = oracle::rotation(q);
    const Vec3 expected = oracle::vec(oracle::mul_transpose(R, oracle::arr(v - w)));
    CHECK((aero::body_airspeed(v, w, q) - expected).norm() < 1e-13);
  }
}

TEST_CASE("forward airspeed gives a pitch-back flapping moment") {
  // Moving along +x the disc tilts back: the moment about +y is negative,
  // which pitches the nose (+x) up in a z-up body frame.
  const Vec3 m = aero::flapping_moment(Vec3(3.0, 0.0, 0.0), 500.0, 1e-5);
  CHECK(m.y() < 0.0);
  CHECK(m.x() == 0.0);
  CHECK(m.z() == 0.0);
  const Vec3 side = aero::flapping_moment(Vec3(0.0, 3.0, 0.0), 500.0, 1e-5);
  CHECK(side.x() > 0.0);
}

TEST_CASE("total wrench decomposes into its terms") {
  std::mt19937_64 rng(22);
  const VehicleParams p = draggy();
  VehicleState s = VehicleState::hover(p);
  s.velocity = Vec3(2, -1, 0.5);
  s.body_rate = Vec3(0.3, 0.2, -0.4);
  s.attitude = oracle::random_attitude(rng);
  s.rotor_speed << 500, 520, 540, 560;
  const aero::AeroWrench w = aero::total_aero_wrench(s, Vec3(1, 0, 0), p);
  Vec3 f = w.parasitic, m = Vec3::Zero();
  for (std::size_t i = 0; i < 4; ++i) {
    f += w.rotor_drag[i];
    m += w.flapping[i] + p.rotor_positions[i].cross(w.rotor_drag[i]);
  }
  CHECK((f - w.force).norm() < 1e-15);
  CHECK((m - w.moment).norm() < 1e-15);
}
