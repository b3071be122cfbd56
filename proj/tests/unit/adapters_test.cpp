#include <cmath>

#include "doctest.h"

#include "camchain/adapters.hpp"
#include "test_util.hpp"

using camchain::ErrorCode;
using camchain::GuidanceState;
using camchain::LowRankAdapter;
using camchain::Tensor;
using testutil::thrown_code;
using testutil::uniform;

namespace {

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int rows, int cols, double scale = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = uniform(rng, -scale, scale);
  return m;
}

LowRankAdapter random_adapter(std::mt19937_64& rng, int d, int k, int r) {
  return LowRankAdapter(Eigen::MatrixXd::Zero(d, k), random_matrix(rng, d, r),
                        random_matrix(rng, r, k));
}

}  // namespace

TEST_CASE("adapter construction validates shape, rank, and finiteness") {
  Eigen::MatrixXd w0 = Eigen::MatrixXd::Zero(4, 3);

  CHECK(thrown_code([&] {
          LowRankAdapter a(w0, Eigen::MatrixXd::Zero(4, 0), Eigen::MatrixXd::Zero(0, 3));
        }) == ErrorCode::invalid_argument);
  CHECK(thrown_code([&] {
          LowRankAdapter a(w0, Eigen::MatrixXd::Zero(4, 4), Eigen::MatrixXd::Zero(4, 3));
        }) == ErrorCode::invalid_argument);  // r = 4 > min(4, 3)
  CHECK(thrown_code([&] {
          LowRankAdapter a(w0, Eigen::MatrixXd::Zero(3, 2), Eigen::MatrixXd::Zero(2, 3));
        }) == ErrorCode::shape_mismatch);  // B rows disagree with W0
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(4, 2);
  bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK(thrown_code([&] {
          LowRankAdapter a(w0, bad, Eigen::MatrixXd::Zero(2, 3));
        }) == ErrorCode::invalid_argument);

  LowRankAdapter ok(w0, Eigen::MatrixXd::Zero(4, 2), Eigen::MatrixXd::Zero(2, 3));
  CHECK(ok.rank() == 2);
}

TEST_CASE("the effective weight adds the factored update") {
  Eigen::MatrixXd w0(2, 2);
  w0 << 1, 0, 0, 1;
  Eigen::MatrixXd b(2, 1);
  b << 1, 2;
  Eigen::MatrixXd a(1, 2);
  a << 3, 4;

  LowRankAdapter adapter(w0, b, a);
  Eigen::MatrixXd delta = adapter.delta();
  CHECK(delta(0, 0) == 3.0);
  CHECK(delta(0, 1) == 4.0);
  CHECK(delta(1, 0) == 6.0);
  CHECK(delta(1, 1) == 8.0);

  Eigen::MatrixXd w = camchain::effective_weight(adapter);
  CHECK(w(0, 0) == 4.0);
  CHECK(w(1, 1) == 9.0);
}

TEST_CASE("overlap of identical updates is the squared Frobenius norm") {
  std::mt19937_64 rng(31);
  LowRankAdapter adapter = random_adapter(rng, 6, 5, 2);
  double norm2 = adapter.delta().squaredNorm();
  CHECK(camchain::ortho_loss(adapter, adapter) == doctest::Approx(norm2).epsilon(1e-14));
}

TEST_CASE("structurally disjoint updates overlap exactly zero") {
  // Updates live on disjoint rows, so the elementwise product vanishes.
  Eigen::MatrixXd w0 = Eigen::MatrixXd::Zero(4, 4);
  Eigen::MatrixXd b1 = Eigen::MatrixXd::Zero(4, 1), b2 = Eigen::MatrixXd::Zero(4, 1);
  b1(0, 0) = 1.0;
  b2(2, 0) = 1.0;
  Eigen::MatrixXd a1(1, 4), a2(1, 4);
  a1 << 1, 2, 3, 4;
  a2 << 5, 6, 7, 8;

  CHECK(camchain::ortho_loss(LowRankAdapter(w0, b1, a1), LowRankAdapter(w0, b2, a2)) == 0.0);
}

TEST_CASE("overlap is symmetric and scales linearly in each factor") {
  std::mt19937_64 rng(32);
  LowRankAdapter s = random_adapter(rng, 6, 5, 2);
  LowRankAdapter t = random_adapter(rng, 6, 5, 3);

  CHECK(camchain::ortho_loss(s, t) == camchain::ortho_loss(t, s));

  // Doubling B doubles the update; powers of two keep the arithmetic exact.
  LowRankAdapter s2(s.w0, 2.0 * s.b, s.a);
  CHECK(camchain::ortho_loss(s2, t) == 2.0 * camchain::ortho_loss(s, t));
}

TEST_CASE("overlap agrees with a direct elementwise evaluation") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    int d = 3 + static_cast<int>(rng() % 6);
    int k = 3 + static_cast<int>(rng() % 6);
    int max_r = std::min(std::min(d, k), 4);
    int rs = 1 + static_cast<int>(rng() % max_r);
    int rt = 1 + static_cast<int>(rng() % max_r);
    LowRankAdapter s = random_adapter(rng, d, k, rs);
    LowRankAdapter t = random_adapter(rng, d, k, rt);

    // Second route: accumulate B*A entries with plain loops.
    double inner = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < k; ++j) {
        double ds = 0.0, dt = 0.0;
        for (int r = 0; r < rs; ++r) ds += s.b(i, r) * s.a(r, j);
        for (int r = 0; r < rt; ++r) dt += t.b(i, r) * t.a(r, j);
        inner += ds * dt;
      }

    double loss = camchain::ortho_loss(s, t);
    CHECK(loss == doctest::Approx(std::abs(inner)).epsilon(1e-10));
  }
}

TEST_CASE("truncation to fewer directions matches an explicit SVD route") {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 20; ++trial) {
    LowRankAdapter s = random_adapter(rng, 6, 6, 3);
    LowRankAdapter t = random_adapter(rng, 6, 6, 3);

    auto truncate = [](const Eigen::MatrixXd& m, int k_sig) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
      Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m.rows(), m.cols());
      for (int i = 0; i < k_sig; ++i)
        out += svd.singularValues()(i) * svd.matrixU().col(i) * svd.matrixV().col(i).transpose();
      return out;
    };

    double expected =
        std::abs((truncate(s.delta(), 2).array() * truncate(t.delta(), 2).array()).sum());
    CHECK(camchain::ortho_loss(s, t, 2) == doctest::Approx(expected).epsilon(1e-10));

    // k_sig at or above both ranks leaves the updates untouched.
    CHECK(camchain::ortho_loss(s, t, 3) == camchain::ortho_loss(s, t));
    CHECK(camchain::ortho_loss(s, t, 50) == camchain::ortho_loss(s, t));
  }
}

TEST_CASE("overlap gradients match the closed form and the finite difference") {
  std::mt19937_64 rng(35);
  LowRankAdapter s = random_adapter(rng, 6, 5, 2);
  LowRankAdapter t = random_adapter(rng, 6, 5, 2);

  camchain::OrthoGradient grad = camchain::ortho_loss_grad(s, t, 2);
  REQUIRE(grad.d_b.rows() == 6);
  REQUIRE(grad.d_b.cols() == 2);
  REQUIRE(grad.d_a.rows() == 2);
  REQUIRE(grad.d_a.cols() == 5);

  double inner = (s.delta().array() * t.delta().array()).sum();
  double sign = inner > 0 ? 1.0 : (inner < 0 ? -1.0 : 0.0);
  Eigen::MatrixXd expected_db = sign * t.delta() * s.a.transpose();
  Eigen::MatrixXd expected_da = sign * s.b.transpose() * t.delta();
  CHECK((grad.d_b - expected_db).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((grad.d_a - expected_da).cwiseAbs().maxCoeff() < 1e-14);

  // Central differences on one entry of each factor.
  const double eps = 1e-6;
  auto loss_with_b = [&](double v) {
    LowRankAdapter probe = s;
    probe.b(1, 0) = v;
    return camchain::ortho_loss(probe, t);
  };
  double fd_b = (loss_with_b(s.b(1, 0) + eps) - loss_with_b(s.b(1, 0) - eps)) / (2 * eps);
  CHECK(grad.d_b(1, 0) == doctest::Approx(fd_b).epsilon(1e-6));

  auto loss_with_a = [&](double v) {
    LowRankAdapter probe = s;
    probe.a(0, 2) = v;
    return camchain::ortho_loss(probe, t);
  };
  double fd_a = (loss_with_a(s.a(0, 2) + eps) - loss_with_a(s.a(0, 2) - eps)) / (2 * eps);
  CHECK(grad.d_a(0, 2) == doctest::Approx(fd_a).epsilon(1e-6));

  // Truncated losses have no closed-form gradient here; demand coverage.
  CHECK(thrown_code([&] { camchain::ortho_loss_grad(s, t, 1); }) == ErrorCode::invalid_argument);
}

TEST_CASE("the zero-overlap kink returns the zero subgradient") {
  Eigen::MatrixXd w0 = Eigen::MatrixXd::Zero(4, 4);
  Eigen::MatrixXd b1 = Eigen::MatrixXd::Zero(4, 1), b2 = Eigen::MatrixXd::Zero(4, 1);
  b1(0, 0) = 1.0;
  b2(2, 0) = 1.0;
  Eigen::MatrixXd a = Eigen::MatrixXd::Ones(1, 4);

  camchain::OrthoGradient grad =
      camchain::ortho_loss_grad(LowRankAdapter(w0, b1, a), LowRankAdapter(w0, b2, a), 1);
  CHECK(grad.d_b.cwiseAbs().maxCoeff() == 0.0);
  CHECK(grad.d_a.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("batch gradient verification passes on every seed") {
  std::vector<camchain::GradCheckResult> results = camchain::run_gradient_checks(20, 1e-5);
  REQUIRE(results.size() == 20);
  for (const camchain::GradCheckResult& r : results) {
    CHECK(r.passed);
    CHECK(r.max_rel_error_b < 1e-5);
    CHECK(r.max_rel_error_a < 1e-5);
  }

  // Deterministic across invocations.
  std::vector<camchain::GradCheckResult> again = camchain::run_gradient_checks(20, 1e-5);
  for (std::size_t i = 0; i < results.size(); ++i) {
    CHECK(results[i].max_rel_error_b == again[i].max_rel_error_b);
    CHECK(results[i].max_rel_error_a == again[i].max_rel_error_a);
  }
}

TEST_CASE("stage losses combine terms with validated weights") {
  CHECK(camchain::first_stage_loss(1.0, 0.5, 0.3) == 1.15);
  CHECK(camchain::second_stage_loss(0.5, 0.25, 0.1) == 0.525);
  CHECK(camchain::second_stage_loss(0.5, 0.25, 0.0) == 0.5);

  CHECK(thrown_code([] { camchain::first_stage_loss(1.0, 0.5, 0.0); }) ==
        ErrorCode::weight_out_of_range);
  CHECK(thrown_code([] { camchain::first_stage_loss(1.0, 0.5, 1.0); }) ==
        ErrorCode::weight_out_of_range);
  CHECK(thrown_code([] { camchain::first_stage_loss(1.0, 0.5, -0.2); }) ==
        ErrorCode::weight_out_of_range);
  CHECK(thrown_code([] { camchain::second_stage_loss(0.5, 0.25, -1e-9); }) ==
        ErrorCode::weight_out_of_range);
}

TEST_CASE("a guided step moves the latent toward the prior") {
  Tensor z{{4}, {1.0, -0.5, 0.25, 2.0}};
  Tensor prior{{4}, {0.0, 0.0, 0.0, 0.0}};

  Tensor out = camchain::guidance_update(GuidanceState{z, prior, 0.25, std::nullopt});
  // 1 - 2 * 0.25 halves the residual exactly.
  CHECK(out.values == std::vector<double>{0.5, -0.25, 0.125, 1.0});

  SUBCASE("masked entries pass through unchanged") {
    GuidanceState state{z, prior, 0.25, std::vector<std::uint8_t>{1, 0, 1, 0}};
    Tensor masked = camchain::guidance_update(state);
    CHECK(masked.values == std::vector<double>{0.5, -0.5, 0.125, 2.0});
  }

  SUBCASE("lambda of zero is the identity update") {
    Tensor same = camchain::guidance_update(GuidanceState{z, prior, 0.0, std::nullopt});
    CHECK(same.values == z.values);
  }

  SUBCASE("shape and weight validation") {
    Tensor short_prior{{3}, {0.0, 0.0, 0.0}};
    CHECK(thrown_code([&] {
            camchain::guidance_update(GuidanceState{z, short_prior, 0.1, std::nullopt});
          }) == ErrorCode::shape_mismatch);
    CHECK(thrown_code([&] {
            camchain::guidance_update(
                GuidanceState{z, prior, 0.1, std::vector<std::uint8_t>{1, 0}});
          }) == ErrorCode::shape_mismatch);
    CHECK(thrown_code([&] {
            camchain::guidance_update(GuidanceState{z, prior, -0.1, std::nullopt});
          }) == ErrorCode::weight_out_of_range);
  }
}

TEST_CASE("iterated guidance contracts at the predicted geometric rate") {
  for (double lambda : {0.1, 0.25, 0.4}) {
    const double rate = std::abs(1.0 - 2.0 * lambda);
    Tensor prior{{3}, {0.0, 0.0, 0.0}};
    Tensor z{{3}, {1.0, -2.0, 0.5}};
    double r0 = std::sqrt(1.0 + 4.0 + 0.25);

    for (int step = 1; step <= 6; ++step) {
      z = camchain::guidance_update(GuidanceState{z, prior, lambda, std::nullopt});
      double residual = 0.0;
      for (double v : z.values) residual += v * v;
      residual = std::sqrt(residual);
      double expected = r0 * std::pow(rate, step);
      CHECK(std::abs(residual - expected) <= 1e-9 * std::max(1.0, expected));
    }
  }
}

TEST_CASE("tensor helpers compare and build shapes") {
  Tensor a{{2, 3}, std::vector<double>(6, 1.0)};
  Tensor b = Tensor::zeros_like(a);
  CHECK(camchain::same_shape(a, b));
  CHECK(b.values == std::vector<double>(6, 0.0));
  Tensor c{{3, 2}, std::vector<double>(6, 0.0)};
  CHECK(!camchain::same_shape(a, c));
}
