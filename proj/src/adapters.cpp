#include "camchain/adapters.hpp"

#include <cmath>
#include <random>

namespace camchain {

namespace {

void require_same_delta_shape(const LowRankAdapter& s, const LowRankAdapter& t) {
  if (s.b.rows() != t.b.rows() || s.a.cols() != t.a.cols())
    throw Error(ErrorCode::shape_mismatch, "adapter updates must share one (d, k) shape");
}

Eigen::MatrixXd truncate_to_rank(const Eigen::MatrixXd& m, int k_sig) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const int keep = std::min<int>(k_sig, static_cast<int>(sv.size()));
  return svd.matrixU().leftCols(keep) * sv.head(keep).asDiagonal() *
         svd.matrixV().leftCols(keep).transpose();
}

double uniform_signed(std::mt19937_64& rng) {
  // 53-bit mantissa draw in [0, 1), mapped to [-1, 1); bit-stable across
  // platforms, unlike the std distributions.
  return (static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0)) * 2.0 - 1.0;
}

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = uniform_signed(rng);
  return m;
}

}  // namespace

LowRankAdapter::LowRankAdapter(Eigen::MatrixXd w0_in, Eigen::MatrixXd b_in, Eigen::MatrixXd a_in)
    : w0(std::move(w0_in)), b(std::move(b_in)), a(std::move(a_in)) {
  const auto d = w0.rows();
  const auto k = w0.cols();
  const auto r = b.cols();
  if (d < 1 || k < 1)
    throw Error(ErrorCode::invalid_argument, "weight matrix must be nonempty");
  if (b.rows() != d || a.cols() != k || a.rows() != r)
    throw Error(ErrorCode::shape_mismatch, "factor shapes must be (d x r) and (r x k)");
  if (r < 1 || r > std::min(d, k))
    throw Error(ErrorCode::invalid_argument, "rank must satisfy 1 <= r <= min(d, k)");
  if (!w0.allFinite() || !b.allFinite() || !a.allFinite())
    throw Error(ErrorCode::invalid_argument, "adapter entries must be finite");
}

Eigen::MatrixXd effective_weight(const LowRankAdapter& adapter) {
  return adapter.w0 + adapter.b * adapter.a;
}

double ortho_loss(const LowRankAdapter& spatial, const LowRankAdapter& temporal, int k_sig) {
  require_same_delta_shape(spatial, temporal);
  if (k_sig < 1) throw Error(ErrorCode::invalid_argument, "k_sig must be >= 1");

  Eigen::MatrixXd ds = spatial.delta();
  Eigen::MatrixXd dt = temporal.delta();
  if (k_sig < spatial.rank()) ds = truncate_to_rank(ds, k_sig);
  if (k_sig < temporal.rank()) dt = truncate_to_rank(dt, k_sig);
  return std::abs(ds.cwiseProduct(dt).sum());
}

double ortho_loss(const LowRankAdapter& spatial, const LowRankAdapter& temporal) {
  return ortho_loss(spatial, temporal, std::max(spatial.rank(), temporal.rank()));
}

OrthoGradient ortho_loss_grad(const LowRankAdapter& spatial, const LowRankAdapter& temporal,
                              int k_sig) {
  require_same_delta_shape(spatial, temporal);
  if (k_sig < std::max(spatial.rank(), temporal.rank()))
    throw Error(ErrorCode::invalid_argument,
                "closed-form gradient needs k_sig >= both adapter ranks");

  Eigen::MatrixXd ds = spatial.delta();
  Eigen::MatrixXd dt = temporal.delta();
  const double inner = ds.cwiseProduct(dt).sum();
  const double sign = inner > 0.0 ? 1.0 : (inner < 0.0 ? -1.0 : 0.0);

  OrthoGradient grad;
  grad.d_b = sign * (dt * spatial.a.transpose());
  grad.d_a = sign * (spatial.b.transpose() * dt);
  return grad;
}

double first_stage_loss(double l_temporal, double l_spatial, double delta) {
  if (!(delta > 0.0) || !(delta < 1.0))
    throw Error(ErrorCode::weight_out_of_range, "delta must lie strictly in (0, 1)");
  return l_temporal + delta * l_spatial;
}

double second_stage_loss(double l_spatial, double l_ortho, double lambda) {
  if (!(lambda >= 0.0))
    throw Error(ErrorCode::weight_out_of_range, "lambda must be >= 0");
  return l_spatial + lambda * l_ortho;
}

Tensor Tensor::zeros_like(const Tensor& other) {
  return Tensor{other.shape, std::vector<double>(other.values.size(), 0.0)};
}

bool same_shape(const Tensor& a, const Tensor& b) { return a.shape == b.shape; }

Tensor guidance_update(const GuidanceState& state) {
  if (!same_shape(state.z, state.z_prior) ||
      state.z.values.size() != state.z_prior.values.size())
    throw Error(ErrorCode::shape_mismatch, "latent and prior must share one shape");
  if (state.mask && state.mask->size() != state.z.values.size())
    throw Error(ErrorCode::shape_mismatch, "mask length must match the latent");
  if (!(state.lambda_g >= 0.0))
    throw Error(ErrorCode::weight_out_of_range, "lambda_g must be >= 0");

  Tensor out{state.z.shape, state.z.values};
  const double step = 2.0 * state.lambda_g;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (state.mask && (*state.mask)[i] == 0) continue;
    out.values[i] = state.z.values[i] - step * (state.z.values[i] - state.z_prior.values[i]);
  }
  return out;
}

std::vector<GradCheckResult> run_gradient_checks(int seed_count, double tolerance) {
  if (seed_count < 1)
    throw Error(ErrorCode::invalid_argument, "seed_count must be >= 1");

  constexpr int d = 6, k = 5, r = 2;
  constexpr double step = 1e-5;

  std::vector<GradCheckResult> results;
  results.reserve(seed_count);
  for (int seed = 1; seed <= seed_count; ++seed) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    Eigen::MatrixXd w0 = Eigen::MatrixXd::Zero(d, k);
    Eigen::MatrixXd bs, as, bt, at;
    // Redraw near the |.| kink: the sign flips within the probe step there
    // and central differences stop describing the one-sided derivative.
    do {
      bs = random_matrix(rng, d, r);
      as = random_matrix(rng, r, k);
      bt = random_matrix(rng, d, r);
      at = random_matrix(rng, r, k);
    } while (std::abs(((bs * as).cwiseProduct(bt * at)).sum()) < 1e-2);

    LowRankAdapter spatial(w0, bs, as);
    LowRankAdapter temporal(w0, bt, at);
    OrthoGradient analytic = ortho_loss_grad(spatial, temporal, r);

    GradCheckResult check;
    check.seed = static_cast<std::uint64_t>(seed);

    auto probe = [&](Eigen::MatrixXd& target, int i, int j) {
      const double saved = target(i, j);
      target(i, j) = saved + step;
      const double up = ortho_loss(spatial, temporal, r);
      target(i, j) = saved - step;
      const double down = ortho_loss(spatial, temporal, r);
      target(i, j) = saved;
      return (up - down) / (2.0 * step);
    };
    auto relative = [](double a, double b) {
      return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
    };

    for (int i = 0; i < d; ++i)
      for (int j = 0; j < r; ++j)
        check.max_rel_error_b =
            std::max(check.max_rel_error_b, relative(analytic.d_b(i, j), probe(spatial.b, i, j)));
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < k; ++j)
        check.max_rel_error_a =
            std::max(check.max_rel_error_a, relative(analytic.d_a(i, j), probe(spatial.a, i, j)));

    check.passed = check.max_rel_error_b < tolerance && check.max_rel_error_a < tolerance;
    results.push_back(check);
  }
  return results;
}

}  // namespace camchain
