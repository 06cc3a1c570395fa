#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lfa/model.hpp"

using namespace lfa;

namespace {

FactorModel make_model(std::int64_t rows, std::int64_t cols, std::int64_t f,
                       std::uint64_t seed, double scale = 1.0) {
  return init_factors(rows, cols, f, seed, scale);
}

}  // namespace

TEST_CASE("init_factors range and determinism") {
  auto m = init_factors(2, 3, 4, 1, 0.1);
  CHECK(m.num_rows() == 2);
  CHECK(m.num_cols() == 3);
  CHECK(m.latent_dim() == 4);
  for (double v : m.x_data()) {
    CHECK(v > 0.0);
    CHECK(v < 0.1);
  }
  for (double v : m.y_data()) {
    CHECK(v > 0.0);
    CHECK(v < 0.1);
  }
  auto m2 = init_factors(2, 3, 4, 1, 0.1);
  CHECK(m.x_data() == m2.x_data());
  CHECK(m.y_data() == m2.y_data());
}

TEST_CASE("initial predictions bounded by f * scale^2") {
  auto m = init_factors(5, 5, 20, 3, 0.1);
  for (std::int64_t i = 0; i < 5; ++i)
    for (std::int64_t j = 0; j < 5; ++j) {
      double p = m.predict(i, j);
      CHECK(p > 0.0);
      CHECK(p < 20 * 0.1 * 0.1);
    }
}

TEST_CASE("predict hand examples") {
  FactorModel m(1, 1, 2);
  m.row_factors(0)[0] = 1;
  m.row_factors(0)[1] = 2;
  m.col_factors(0)[0] = 3;
  m.col_factors(0)[1] = 4;
  CHECK(m.predict(0, 0) == 11.0);

  FactorModel z(1, 1, 3);
  z.col_factors(0)[0] = 5;
  CHECK(z.predict(0, 0) == 0.0);

  FactorModel s(1, 1, 1);
  s.row_factors(0)[0] = 0.1;
  s.col_factors(0)[0] = 0.2;
  CHECK(s.predict(0, 0) == doctest::Approx(0.02).epsilon(1e-15));
  CHECK_THROWS_AS(s.predict(1, 0), std::out_of_range);
}

TEST_CASE("predict is bilinear") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    FactorModel m(1, 1, 4);
    FactorModel scaled(1, 1, 4);
    double alpha = rng.uniform(-3, 3);
    for (int k = 0; k < 4; ++k) {
      double x = rng.uniform(-1, 1), y = rng.uniform(-1, 1);
      m.row_factors(0)[k] = x;
      m.col_factors(0)[k] = y;
      scaled.row_factors(0)[k] = alpha * x;
      scaled.col_factors(0)[k] = y;
    }
    CHECK(scaled.predict(0, 0) == doctest::Approx(alpha * m.predict(0, 0)).epsilon(1e-12));
  }
}

TEST_CASE("instant error and loss hand examples") {
  FactorModel m(1, 1, 1);
  m.row_factors(0)[0] = 0.1;
  m.col_factors(0)[0] = 0.2;
  RatingInstance inst{0, 0, 1.0};
  CHECK(instant_error(m, inst) == doctest::Approx(0.98).epsilon(1e-15));
  LfaHyper hyper{.eta = 0.01, .lambda = 0.05};
  CHECK(instant_loss(m, inst, hyper) == doctest::Approx(0.9629).epsilon(1e-12));

  // perfect fit, lambda 0
  FactorModel p(1, 1, 1);
  p.row_factors(0)[0] = 1;
  p.col_factors(0)[0] = 2;
  RatingInstance exact{0, 0, 2.0};
  CHECK(instant_error(p, exact) == 0.0);
  CHECK(instant_loss(p, exact, {.eta = 0.01, .lambda = 0.0}) == 0.0);

  RatingInstance neg{0, 0, 0.0};
  FactorModel ones(1, 1, 1);
  ones.row_factors(0)[0] = 1;
  ones.col_factors(0)[0] = 1;
  CHECK(instant_error(ones, neg) == -1.0);

  // lambda = 0 collapses the loss to the squared error
  CHECK(instant_loss(m, inst, {.eta = 0.01, .lambda = 0.0}) ==
        doctest::Approx(0.98 * 0.98).epsilon(1e-15));
}

TEST_CASE("full_loss counts shared-row regularization per instance") {
  FactorModel m(1, 2, 1);
  m.row_factors(0)[0] = 0.5;
  m.col_factors(0)[0] = 1.0;
  m.col_factors(1)[0] = 2.0;
  HdiDataset ds;
  ds.num_rows = 1;
  ds.num_cols = 2;
  ds.instances = {{0, 0, 1.0}, {0, 1, 2.0}};
  LfaHyper hyper{.eta = 0.01, .lambda = 0.1};
  // hand sum: (1-0.5)^2 + 0.1*0.25 + 0.1*1 + (2-1)^2 + 0.1*0.25 + 0.1*4
  double expect = 0.25 + 0.025 + 0.1 + 1.0 + 0.025 + 0.4;
  CHECK(full_loss(m, ds, hyper) == doctest::Approx(expect).epsilon(1e-14));

  HdiDataset single;
  single.num_rows = 1;
  single.num_cols = 2;
  single.instances = {{0, 0, 1.0}};
  CHECK(full_loss(m, single, hyper) ==
        doctest::Approx(instant_loss(m, single.instances[0], hyper)).epsilon(1e-15));
}

TEST_CASE("sgd_step hand example") {
  FactorModel m(1, 1, 1);
  m.row_factors(0)[0] = 0.1;
  m.col_factors(0)[0] = 0.2;
  RatingInstance inst{0, 0, 1.0};
  LfaHyper hyper{.eta = 0.01, .lambda = 0.05};
  sgd_step(m, inst, 0.98, hyper);
  CHECK(m.row_factors(0)[0] == doctest::Approx(0.10191).epsilon(1e-12));
  CHECK(m.col_factors(0)[0] == doctest::Approx(0.20088).epsilon(1e-12));
}

TEST_CASE("sgd_step zero cases leave the model unchanged") {
  auto m = make_model(3, 3, 2, 9, 0.5);
  auto x0 = m.x_data();
  auto y0 = m.y_data();
  RatingInstance inst{1, 2, 0.7};
  sgd_step(m, inst, 0.0, {.eta = 0.01, .lambda = 0.0});
  CHECK(m.x_data() == x0);
  CHECK(m.y_data() == y0);
}

TEST_CASE("sgd_step divergence guard") {
  FactorModel m(1, 1, 1);
  m.row_factors(0)[0] = 1;
  m.col_factors(0)[0] = 1;
  RatingInstance inst{0, 0, 1.0};
  CHECK_THROWS_AS(
      sgd_step(m, inst, std::numeric_limits<double>::infinity(), {.eta = 1.0, .lambda = 0.0}, 7),
      DivergenceError);
}

// Update direction must agree with central finite differences of the
// instant objective: (e*y - lambda*x) == -0.5 * d(loss)/dx.
TEST_CASE("gradient check against finite differences") {
  Rng rng(12345);
  const double fd_h = 1e-6;
  for (int trial = 0; trial < 1000; ++trial) {
    int f = 1 + static_cast<int>(rng.below(5));
    FactorModel m(2, 2, f);
    for (std::int64_t i = 0; i < 2; ++i)
      for (int k = 0; k < f; ++k) {
        m.row_factors(i)[k] = rng.uniform(-1, 1);
        m.col_factors(i)[k] = rng.uniform(-1, 1);
      }
    RatingInstance inst{static_cast<std::int64_t>(rng.below(2)),
                        static_cast<std::int64_t>(rng.below(2)), rng.uniform(-2, 2)};
    LfaHyper hyper{.eta = 0.01, .lambda = rng.uniform(0, 0.2)};
    double e = instant_error(m, inst);

    for (int k = 0; k < f; ++k) {
      double analytic =
          e * m.col_factors(inst.col_id)[k] - hyper.lambda * m.row_factors(inst.row_id)[k];
      double& xk = m.row_factors(inst.row_id)[k];
      double saved = xk;
      xk = saved + fd_h;
      double up = instant_loss(m, inst, hyper);
      xk = saved - fd_h;
      double down = instant_loss(m, inst, hyper);
      xk = saved;
      double numeric = -0.5 * (up - down) / (2 * fd_h);
      CHECK(analytic == doctest::Approx(numeric).epsilon(1e-6));
    }
  }
}

TEST_CASE("descent property for small steps") {
  Rng rng(777);
  int checked = 0;
  for (int trial = 0; trial < 1200; ++trial) {
    int f = 1 + static_cast<int>(rng.below(4));
    FactorModel m(1, 1, f);
    double xn = 0, yn = 0;
    for (int k = 0; k < f; ++k) {
      m.row_factors(0)[k] = rng.uniform(-0.5, 0.5);
      m.col_factors(0)[k] = rng.uniform(-0.5, 0.5);
      xn += m.row_factors(0)[k] * m.row_factors(0)[k];
      yn += m.col_factors(0)[k] * m.col_factors(0)[k];
    }
    if (xn > 1 || yn > 1) continue;
    RatingInstance inst{0, 0, rng.uniform(-2, 2)};
    LfaHyper hyper{.eta = 1e-3, .lambda = rng.uniform(0, 0.1)};
    double before = instant_loss(m, inst, hyper);
    sgd_step(m, inst, instant_error(m, inst), hyper);
    double after = instant_loss(m, inst, hyper);
    CHECK(after <= before + 1e-12);
    ++checked;
  }
  CHECK(checked >= 1000);
}

// x/y role symmetry: solving the transposed problem mirrors the update.
TEST_CASE("sgd_step is symmetric under row/column swap") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    int f = 1 + static_cast<int>(rng.below(4));
    FactorModel m(1, 1, f), swapped(1, 1, f);
    for (int k = 0; k < f; ++k) {
      double x = rng.uniform(-1, 1), y = rng.uniform(-1, 1);
      m.row_factors(0)[k] = x;
      m.col_factors(0)[k] = y;
      swapped.row_factors(0)[k] = y;
      swapped.col_factors(0)[k] = x;
    }
    RatingInstance inst{0, 0, rng.uniform(-2, 2)};
    LfaHyper hyper{.eta = 0.01, .lambda = 0.05};
    double e = instant_error(m, inst);
    sgd_step(m, inst, e, hyper);
    sgd_step(swapped, inst, e, hyper);
    for (int k = 0; k < f; ++k) {
      CHECK(m.row_factors(0)[k] == swapped.col_factors(0)[k]);
      CHECK(m.col_factors(0)[k] == swapped.row_factors(0)[k]);
    }
  }
}

TEST_CASE("checkpoint round-trips exactly") {
  auto m = make_model(4, 6, 3, 2024, 0.7);
  std::stringstream buf;
  save_model(m, buf);
  auto back = load_model(buf);
  CHECK(back.num_rows() == m.num_rows());
  CHECK(back.num_cols() == m.num_cols());
  CHECK(back.latent_dim() == m.latent_dim());
  CHECK(back.x_data() == m.x_data());
  CHECK(back.y_data() == m.y_data());
}
