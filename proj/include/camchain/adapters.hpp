#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "camchain/error.hpp"

namespace camchain {

/// Additive low-rank update of a weight matrix: W0 (d x k) plus B (d x r)
/// times A (r x k). Construction enforces 1 <= r <= min(d, k) and finite
/// entries.
struct LowRankAdapter {
  LowRankAdapter(Eigen::MatrixXd w0, Eigen::MatrixXd b, Eigen::MatrixXd a);

  Eigen::MatrixXd w0;
  Eigen::MatrixXd b;
  Eigen::MatrixXd a;

  int rank() const { return static_cast<int>(b.cols()); }
  Eigen::MatrixXd delta() const { return b * a; }
};

/// W0 + B A.
Eigen::MatrixXd effective_weight(const LowRankAdapter& adapter);

/// Absolute Frobenius inner product of the two adapters' updates after each
/// is truncated to its k_sig most significant singular directions. Since
/// rank(B A) <= r, any k_sig >= r leaves an update untouched and the
/// truncation step is skipped exactly. Defaults to the larger of the two
/// ranks. Symmetric in its arguments.
double ortho_loss(const LowRankAdapter& spatial, const LowRankAdapter& temporal, int k_sig);
double ortho_loss(const LowRankAdapter& spatial, const LowRankAdapter& temporal);

struct OrthoGradient {
  Eigen::MatrixXd d_b;  // d/dB_spatial
  Eigen::MatrixXd d_a;  // d/dA_spatial
};

/// Closed-form gradient of ortho_loss with respect to the spatial factors,
/// valid when k_sig covers both ranks (no active truncation):
///   d/dB = sign(<dWs, dWt>) * dWt * A^T,  d/dA = sign(<dWs, dWt>) * B^T * dWt.
/// At the kink (<dWs, dWt> == 0) the zero subgradient is returned.
OrthoGradient ortho_loss_grad(const LowRankAdapter& spatial, const LowRankAdapter& temporal,
                              int k_sig);

/// l_temporal + delta * l_spatial with delta restricted to (0, 1).
double first_stage_loss(double l_temporal, double l_spatial, double delta);

/// l_spatial + lambda * l_ortho with lambda >= 0.
double second_stage_loss(double l_spatial, double l_ortho, double lambda);

/// Dense value block with an explicit shape; the guidance update itself is
/// elementwise, the shape only participates in compatibility checks.
struct Tensor {
  std::vector<std::int64_t> shape;
  std::vector<double> values;

  static Tensor zeros_like(const Tensor& other);
};

bool same_shape(const Tensor& a, const Tensor& b);

struct GuidanceState {
  Tensor z;        // current latent
  Tensor z_prior;  // motion prior latent
  double lambda_g = 0.0;
  std::optional<std::vector<std::uint8_t>> mask;  // 0 entries pass z through
};

/// One guided step: z - 2 * lambda_g * (z - z_prior), elementwise, with
/// optional masking. Iterating contracts toward the prior at the geometric
/// rate |1 - 2 lambda_g|.
Tensor guidance_update(const GuidanceState& state);

struct GradCheckResult {
  std::uint64_t seed = 0;
  double max_rel_error_b = 0.0;
  double max_rel_error_a = 0.0;
  bool passed = false;
};

/// Central-difference verification of ortho_loss_grad on randomly drawn
/// adapter pairs, one result per seed in [1, seed_count]. Deterministic.
std::vector<GradCheckResult> run_gradient_checks(int seed_count, double tolerance);

}  // namespace camchain
