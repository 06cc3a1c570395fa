#include <doctest.h>

#include <cmath>

#include "lfa/controllers.hpp"

using namespace lfa;

namespace {

// Independent transcription of the discrete TD / ESO / EC difference
// equations, kept in plain-array style on purpose so it shares nothing with
// the library implementation. State layout: v1 v2 z1 z2 z3 u.
struct OracleGains {
  double h, r, beta1, beta2, beta3, b, b0, b1, b2;
};

void oracle_tick(double s[6], double chi, double rhat, const OracleGains& g) {
  // TD
  double inner = s[0] - chi + s[1] * std::fabs(s[1]) / (2.0 * g.r);
  double sgn_inner = inner > 0.0 ? 1.0 : (inner < 0.0 ? -1.0 : 0.0);
  double l = -g.r * sgn_inner;
  double v1 = s[0] + g.h * s[1];
  double v2 = s[1] + g.h * l;
  // ESO (observer input is the previous tick's compensator output)
  double e1o = s[2] - rhat;
  double z1 = s[2] + g.h * (s[3] - g.beta1 * e1o);
  double z2 = s[3] + g.h * (s[4] - g.beta2 * e1o + g.b * s[5]);
  double z3 = s[4] - g.h * g.beta3 * e1o;
  // EC
  double e1 = chi - rhat;
  double e2 = v2 - z2;
  double u0 = g.b1 * e1 + g.b2 * e2;
  double u = (u0 - z3) / g.b0;
  s[0] = v1;
  s[1] = v2;
  s[2] = z1;
  s[3] = z2;
  s[4] = z3;
  s[5] = u;
}

AdrcGains to_gains(const OracleGains& g) {
  AdrcGains out;
  out.h = g.h;
  out.td_accel = g.r;
  out.beta1 = g.beta1;
  out.beta2 = g.beta2;
  out.beta3 = g.beta3;
  out.b = g.b;
  out.b0 = g.b0;
  out.b1 = g.b1;
  out.b2 = g.b2;
  return out;
}

}  // namespace

TEST_CASE("sgn") {
  CHECK(sgn(-0.5) == -1);
  CHECK(sgn(0.0) == 0);
  CHECK(sgn(3.7) == 1);
  CHECK(sgn(-0.0) == 0);
}

TEST_CASE("td_step hand examples") {
  AdrcGains g;
  g.h = 0.01;
  g.td_accel = 100;

  AdrcState s;
  td_step(s, 1.0, g);
  CHECK(s.v1 == 0.0);
  CHECK(s.v2 == doctest::Approx(1.0).epsilon(1e-15));

  // fixed point: v1 == target, v2 == 0
  AdrcState fp;
  fp.v1 = 2.5;
  td_step(fp, 2.5, g);
  CHECK(fp.v1 == 2.5);
  CHECK(fp.v2 == 0.0);

  AdrcState over;
  over.v1 = 1.0;
  over.v2 = 1.0;
  td_step(over, 1.0, g);
  CHECK(over.v1 == doctest::Approx(1.01).epsilon(1e-15));
  CHECK(over.v2 == doctest::Approx(0.0).scale(1).epsilon(1e-15));
}

TEST_CASE("eso_step hand examples") {
  AdrcGains g;
  g.h = 0.01;
  g.beta1 = 10;
  g.beta2 = 30;
  g.beta3 = 100;
  g.b = 1;

  AdrcState s;
  eso_step(s, 0.5, g);
  CHECK(s.z1 == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(s.z2 == doctest::Approx(0.15).epsilon(1e-15));
  CHECK(s.z3 == doctest::Approx(0.5).epsilon(1e-15));

  AdrcState zero;
  eso_step(zero, 0.0, g);
  CHECK(zero.z1 == 0.0);
  CHECK(zero.z2 == 0.0);
  CHECK(zero.z3 == 0.0);

  AdrcGains nob3 = g;
  nob3.beta3 = 0;
  AdrcState s3;
  for (int i = 0; i < 100; ++i) eso_step(s3, 0.3 * i, nob3);
  CHECK(s3.z3 == 0.0);
}

TEST_CASE("ec_step hand examples") {
  AdrcGains g;
  g.b0 = 1;
  g.b1 = 1;
  g.b2 = 0.1;

  AdrcState s;
  s.v2 = 0.1;
  s.z2 = 0.05;
  s.z3 = 0.02;
  double u = ec_step(s, 1.0, 0.8, g);
  CHECK(u == doctest::Approx(0.185).epsilon(1e-15));
  CHECK(s.u_prev == u);

  AdrcState tracked;
  tracked.v2 = 0.4;
  tracked.z2 = 0.4;
  CHECK(ec_step(tracked, 1.0, 1.0, g) == 0.0);

  AdrcGains degen = g;
  degen.b2 = 0;
  AdrcState raw;
  raw.v2 = 5;
  raw.z2 = -3;
  CHECK(ec_step(raw, 1.0, 0.25, degen) == 0.75);
}

TEST_CASE("refine chained hand example on a fresh state") {
  AdrcGains g;
  g.h = 0.01;
  g.td_accel = 100;
  g.beta1 = 10;
  g.beta2 = 30;
  g.beta3 = 100;
  g.b = 1;
  g.b0 = 1;
  g.b1 = 1;
  g.b2 = 0.1;
  auto bank = ControllerBank::adrc(g, 1);
  double u = bank.refine(0, 1.0, 0.02);
  CHECK(u == doctest::Approx(1.0594).epsilon(1e-12));
  CHECK(bank.adrc_state(0).v2 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bank.adrc_state(0).v1 == 0.0);
  CHECK(bank.adrc_state(0).z2 == doctest::Approx(0.006).epsilon(1e-14));
  CHECK(bank.adrc_state(0).z3 == doctest::Approx(0.02).epsilon(1e-14));
}

TEST_CASE("oracle equivalence over random states and gains") {
  Rng rng(4242);
  for (int trial = 0; trial < 10000; ++trial) {
    OracleGains og;
    og.h = rng.uniform(0.001, 0.5);
    og.r = rng.uniform(0.1, 500);
    og.beta1 = rng.uniform(-50, 50);
    og.beta2 = rng.uniform(-200, 200);
    og.beta3 = rng.uniform(-500, 500);
    og.b = rng.uniform(-2, 2);
    og.b0 = rng.uniform(0.1, 2) * (rng.below(2) ? 1 : -1);
    og.b1 = rng.uniform(-2, 2);
    og.b2 = rng.uniform(-1, 1);

    double st[6];
    for (double& v : st) v = rng.uniform(-5, 5);
    AdrcState s;
    s.v1 = st[0];
    s.v2 = st[1];
    s.z1 = st[2];
    s.z2 = st[3];
    s.z3 = st[4];
    s.u_prev = st[5];

    double chi = rng.uniform(-5, 5);
    double rhat = rng.uniform(-5, 5);

    AdrcGains g = to_gains(og);
    td_step(s, chi, g);
    eso_step(s, rhat, g);
    double u = ec_step(s, chi, rhat, g);

    oracle_tick(st, chi, rhat, og);
    REQUIRE(std::fabs(s.v1 - st[0]) <= 1e-12);
    REQUIRE(std::fabs(s.v2 - st[1]) <= 1e-12);
    REQUIRE(std::fabs(s.z1 - st[2]) <= 1e-12);
    REQUIRE(std::fabs(s.z2 - st[3]) <= 1e-12);
    REQUIRE(std::fabs(s.z3 - st[4]) <= 1e-12);
    REQUIRE(std::fabs(u - st[5]) <= 1e-12);
  }
}

TEST_CASE("degenerate gains reduce the refiner to the raw error") {
  AdrcGains g;
  g.b1 = 1;
  g.b2 = 0;
  g.b0 = 1;
  g.beta3 = 0;
  auto bank = ControllerBank::adrc(g, 4);
  Rng rng(5);
  for (int t = 0; t < 300; ++t) {
    std::size_t i = rng.below(4);
    double target = rng.uniform(-5, 5);
    double pred = rng.uniform(-5, 5);
    CHECK(bank.refine(i, target, pred) == target - pred);
    CHECK(bank.adrc_state(i).z3 == 0.0);
  }
}

TEST_CASE("TD tracks a constant target") {
  AdrcGains g;
  g.h = 0.01;
  g.td_accel = 100;
  for (double chi : {-5.0, -3.3, -1.0, 0.5, 1.0, 2.7, 5.0}) {
    AdrcState s;
    for (int t = 0; t < 1000; ++t) td_step(s, chi, g);
    CHECK(std::fabs(s.v1 - chi) <= 0.05);
  }
}

TEST_CASE("ESO zero fixed point") {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    AdrcGains g;
    g.h = rng.uniform(0.001, 1);
    g.td_accel = rng.uniform(0.1, 100);
    g.beta1 = rng.uniform(-100, 100);
    g.beta2 = rng.uniform(-100, 100);
    g.beta3 = rng.uniform(-100, 100);
    g.b = rng.uniform(-2, 2);
    AdrcState s;
    for (int t = 0; t < 10; ++t) eso_step(s, 0.0, g);
    CHECK(s.z1 == 0.0);
    CHECK(s.z2 == 0.0);
    CHECK(s.z3 == 0.0);
  }
}

TEST_CASE("refining one instance leaves the others untouched") {
  AdrcGains g;
  auto bank = ControllerBank::adrc(g, 8);
  bank.refine(3, 4.0, 0.5);
  for (std::size_t i = 0; i < 8; ++i) {
    const auto& s = bank.adrc_state(i);
    if (i == 3) {
      CHECK(s.v2 != 0.0);
    } else {
      CHECK(s.v1 == 0.0);
      CHECK(s.v2 == 0.0);
      CHECK(s.z1 == 0.0);
      CHECK(s.z2 == 0.0);
      CHECK(s.z3 == 0.0);
      CHECK(s.u_prev == 0.0);
    }
  }
}

TEST_CASE("pid refiner") {
  PidGains g{.kp = 1, .ki = 0, .kd = 0};
  auto bank = ControllerBank::pid(g, 2);
  // pure proportional with unit gain is the identity refiner
  Rng rng(6);
  for (int t = 0; t < 100; ++t) {
    double target = rng.uniform(-5, 5);
    double pred = rng.uniform(-5, 5);
    CHECK(bank.refine(0, target, pred) == target - pred);
  }

  // integral term uses the sum of *previous* errors; derivative uses the
  // previous error
  PidGains full{.kp = 2, .ki = 0.5, .kd = 0.25};
  auto b2 = ControllerBank::pid(full, 1);
  double u1 = b2.refine(0, 1.0, 0.0);  // e=1, sum=0, prev=0
  CHECK(u1 == doctest::Approx(2 * 1 + 0.5 * 0 + 0.25 * 1).epsilon(1e-15));
  double u2 = b2.refine(0, 1.0, 0.4);  // e=0.6, sum=1, prev=1
  CHECK(u2 == doctest::Approx(2 * 0.6 + 0.5 * 1 + 0.25 * (0.6 - 1)).epsilon(1e-14));
}

TEST_CASE("bank construction and gain validation") {
  AdrcGains g;
  auto bank = ControllerBank::adrc(g, 3);
  CHECK(bank.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& s = bank.adrc_state(i);
    CHECK((s.v1 == 0 && s.v2 == 0 && s.z1 == 0 && s.z2 == 0 && s.z3 == 0 && s.u_prev == 0));
  }

  auto pt = ControllerBank::pass_through();
  CHECK(pt.size() == 0);

  auto pid = ControllerBank::pid({.kp = 1, .ki = 0.1, .kd = 0.2}, 2);
  CHECK(pid.size() == 2);
  CHECK(pid.pid_state(0).err_sum == 0.0);
  CHECK(pid.pid_state(1).err_prev == 0.0);

  AdrcGains bad = g;
  bad.b0 = 0;
  CHECK_THROWS_AS(ControllerBank::adrc(bad, 1), ConfigError);
  bad = g;
  bad.h = 0;
  CHECK_THROWS_AS(ControllerBank::adrc(bad, 1), ConfigError);
  bad = g;
  bad.td_accel = -1;
  CHECK_THROWS_AS(ControllerBank::adrc(bad, 1), ConfigError);
}

TEST_CASE("bandwidth parameterization of observer gains") {
  AdrcGains g;
  g.set_bandwidth(5);
  CHECK(g.beta1 == 15.0);
  CHECK(g.beta2 == 75.0);
  CHECK(g.beta3 == 125.0);
}
