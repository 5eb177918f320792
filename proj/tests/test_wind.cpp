#include "rotorsim/wind.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace rotorsim;

TEST_CASE("constant, step and sinusoid profiles") {
  WindModel c(ConstantWind{Vec3(1, 2, 3)});
  CHECK(c.sample(7.0, Vec3::Zero()) == Vec3(1, 2, 3));

  WindModel s(StepWind{Vec3(1, 0, 0), Vec3(0, 4, 0), 2.0});
  CHECK(s.sample(1.999, Vec3::Zero()) == Vec3(1, 0, 0));
  CHECK(s.sample(2.0, Vec3::Zero()) == Vec3(0, 4, 0));

  SinusoidWind sw;
  sw.mean = Vec3(1, 0, 0);
  sw.amplitude = Vec3(2, 1, 0);
  sw.frequency_hz = Vec3(0.5, 0.25, 1.0);
  sw.phase = Vec3(0, std::numbers::pi / 2, 0);
  WindModel m(sw);
  const double t = 0.3;
  const Vec3 w = m.sample(t, Vec3::Zero());
  CHECK(w.x() == doctest::Approx(1 + 2 * std::sin(std::numbers::pi * t)).epsilon(1e-14));
  CHECK(w.y() == doctest::Approx(std::cos(0.5 * std::numbers::pi * t)).epsilon(1e-14));
  CHECK(w.z() == 0.0);
}

TEST_CASE("invalid profiles are rejected") {
  SinusoidWind sw;
  sw.frequency_hz = Vec3(1, 0, 1);
  CHECK_THROWS(WindModel(sw));
  DrydenWind d;
  d.altitude = 0.0;
  CHECK_THROWS(WindModel(d));
  CHECK_THROWS(turbulence_class_from_string("gale"));
}

TEST_CASE("dryden scale lengths and intensities") {
  DrydenWind d;
  d.altitude = 100.0 / 3.280839895;  // 100 ft
  d.intensity = TurbulenceClass::Moderate;
  d.mean = Vec3(3, 4, 0);
  const DrydenParameters p = dryden_parameters(d);
  const double denom = 0.177 + 0.000823 * 100.0;
  CHECK(p.scale_length.z() == doctest::Approx(100.0 / 3.280839895));
  CHECK(p.scale_length.x() == doctest::Approx(100.0 / std::pow(denom, 1.2) / 3.280839895));
  const double sigma_w = 0.1 * 30.0 * 0.514444;
  CHECK(p.sigma.z() == doctest::Approx(sigma_w));
  CHECK(p.sigma.x() == doctest::Approx(sigma_w / std::pow(denom, 0.4)));
  CHECK(p.convection_speed == doctest::Approx(5.0));

  d.mean.setZero();
  d.sigma = Vec3(0.1, 0.2, 0.3);
  const DrydenParameters q = dryden_parameters(d);
  CHECK(q.sigma == Vec3(0.1, 0.2, 0.3));
  CHECK(q.convection_speed > 0.0);
}

TEST_CASE("zero-intensity dryden returns the mean wind") {
  DrydenWind d;
  d.mean = Vec3(2, -1, 0.5);
  d.intensity = TurbulenceClass::None;
  WindModel m(d);
  for (double t = 0; t < 3; t += 0.37) CHECK((m.sample(t, Vec3::Zero()) - d.mean).norm() < 1e-15);
}

TEST_CASE("dryden stationary variance matches the requested intensity") {
  DrydenParameters p;
  p.sigma = Vec3(1.0, 0.8, 0.5);
  p.scale_length = Vec3(20.0, 20.0, 3.0);
  p.convection_speed = 10.0;
  DrydenFilter f(p, 99);
  const long n = 2'000'000;
  Vec3 sum = Vec3::Zero(), sq = Vec3::Zero();
  for (long i = 0; i < n; ++i) {
    const Vec3 x = f.step();
    sum += x;
    sq += x.cwiseProduct(x);
  }
  const Vec3 mean = sum / n;
  const Vec3 var = sq / n - mean.cwiseProduct(mean);
  for (int i = 0; i < 3; ++i) {
    CHECK(var(i) == doctest::Approx(p.sigma(i) * p.sigma(i)).epsilon(0.10));
    CHECK(std::abs(mean(i)) < 0.1 * p.sigma(i));
  }
}

TEST_CASE("dryden samples are reproducible and replay after rewinding") {
  DrydenWind d;
  d.mean = Vec3(3, 0, 0);
  d.seed = 17;
  WindModel a(d), b(d);
  std::vector<Vec3> first;
  for (double t = 0; t < 2; t += 0.01) {
    first.push_back(a.sample(t, Vec3::Zero()));
    CHECK(first.back() == b.sample(t, Vec3::Zero()));
  }
  CHECK(a.sample(0.0, Vec3::Zero()) == first.front());
  CHECK(a.sample(0.5, Vec3::Zero()) == first[50]);

  d.seed = 18;
  WindModel c(d);
  CHECK(c.sample(0.5, Vec3::Zero()) != first[50]);
}

TEST_CASE("dryden output is held between internal ticks") {
  DrydenWind d;
  d.seed = 5;
  WindModel m(d);
  const Vec3 a = m.sample(0.101, Vec3::Zero());
  const Vec3 b = m.sample(0.109, Vec3::Zero());
  CHECK(a == b);
}
