#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>
#include <vector>

#include "fieldscan/channels.hpp"
#include "fieldscan/core.hpp"
#include "fieldscan/estimators.hpp"

namespace fieldscan::oracle {

// Explicit joint model over a tiny binary field: probability table over all
// 2^(w*h) clean configurations (bit i of the table index = value at
// row-major site i), observed through a BSC. Hard-capped at 12 sites.
struct JointModel {
    int width;
    int height;
    std::vector<double> probs;
    Channel channel;

    JointModel(int width, int height, std::vector<double> probs, Channel channel);
    int sites() const { return width * height; }
};

JointModel iid_binary_model(int width, int height, double p_one, const Channel& channel);
// Symmetric first-order Markov chain over the row-extension.
JointModel markov_chain_model(int length, double pi, const Channel& channel);

// Exact scalar Bayes loss min_g E l(X, g(Y)) for a finite joint table
// joint[x][y] over binary X and finitely many Y outcomes (decision space:
// {0,1} for Hamming, the reals for squared).
double brute_force_scalar_bayes(const std::vector<std::array<double, 2>>& joint_yx,
                                LossKind loss_kind);

// Exact expected cumulative loss of the Bayes-optimal estimator for a fixed
// visiting order, by full enumeration over clean and observed
// configurations.
double exhaustive_optimal_filter_loss(const JointModel& model, std::span<const Site> order,
                                      EstimatorMode mode, LossKind loss_kind = LossKind::hamming);

struct BestOrderResult {
    std::vector<Site> order;
    double value;
};

// Minimum of exhaustive_optimal_filter_loss over all |B|! data-independent
// orders (exact subset dynamic program; the per-step Bayes loss depends on
// the prefix only through its site set). Lexicographically-first optimal
// order. Capped at 8 sites.
BestOrderResult exhaustive_best_order(const JointModel& model, EstimatorMode mode,
                                      LossKind loss_kind = LossKind::hamming);

// Exact H(Y_B) in bits of the BSC output, by enumeration.
double exact_output_entropy_bits(const JointModel& model);

// Best data-dependent scan value (the next site may depend on the values
// observed so far), by exhaustive decision-tree search. Capped at 4 sites.
double exhaustive_best_adaptive_scan(const JointModel& model, EstimatorMode mode,
                                     LossKind loss_kind = LossKind::hamming);

// Per-step conditional variances along `order` by fresh dense solves of
// Sigma_XX - Sigma_XY Sigma_YY^{-1} Sigma_YX (oracle for the incremental
// path). Capped at 256 sites.
std::vector<double> dense_gaussian_conditioning(const Eigen::MatrixXd& covariance, double sigma_n2,
                                                std::span<const Site> order, EstimatorMode mode,
                                                int width);

// Var(target | conditioning) from a joint covariance by Schur complement.
double gaussian_conditional_variance(const Eigen::MatrixXd& joint_cov, int target,
                                     std::span<const int> conditioning);

}  // namespace fieldscan::oracle
