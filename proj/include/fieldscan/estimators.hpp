#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fieldscan/channels.hpp"
#include "fieldscan/core.hpp"
#include "fieldscan/scanners.hpp"

namespace fieldscan {

// Symmetric binary first-order Markov source (transition probability pi)
// observed through a BSC with crossover delta.
struct HmmParams {
    double pi;
    double delta;
    HmmParams(double pi_, double delta_);
};

// Normalized forward recursion; returns P(x_t = 1 | y^t) for every t.
std::vector<double> hmm_forward_filter(std::span<const double> y, const HmmParams& params);

// Predictive probabilities P(y_t = 1 | y^{t-1}) along the chain.
std::vector<double> hmm_forward_predictive(std::span<const double> y, const HmmParams& params);

// Exact P(x_i = 1 | y_{i-k}^{i+k}) by forward-backward on the (truncated)
// window. The masked variant conditions only on window positions marked
// revealed; unrevealed positions contribute no emission.
double hmm_window_posterior(std::span<const double> y, std::int64_t i, int k,
                            const HmmParams& params);
double hmm_window_posterior_masked(std::span<const double> values,
                                   std::span<const std::uint8_t> revealed, std::int64_t i, int k,
                                   const HmmParams& params);

// Exact expected Hamming loss of the Bayes decision from the full +-k window
// (stationary chain), by enumeration over the 2^(2k+1) window outputs.
double hmm_window_expected_loss(const HmmParams& params, int k);

// Monte Carlo prequential plug-in estimate of the output entropy rate in
// bits/site: an upper bound on the entropy rate in expectation (the exact
// rate of the hidden-Markov output has no closed form).
struct RateEstimate {
    double bits_per_site;
    double half_width;
};
RateEstimate hmm_output_entropy_rate_upper_mc(const HmmParams& params, std::int64_t symbols,
                                              std::uint64_t seed);

// Zero-mean Gaussian field on a w x h rectangle with AWGN observations.
// Covariance must be symmetric PSD (eigenvalues >= -1e-10; tiny negatives
// are clipped).
class GaussianFieldModel {
  public:
    GaussianFieldModel(Eigen::MatrixXd covariance, double noise_variance);

    const Eigen::MatrixXd& covariance() const { return covariance_; }
    double noise_variance() const { return noise_variance_; }
    int sites() const { return static_cast<int>(covariance_.rows()); }

  private:
    Eigen::MatrixXd covariance_;
    double noise_variance_;
};

// Separable exponential autocorrelation sigma_x2 * rho^(|dr|+|dc|) sampled
// on site offsets (row-major indexing); PSD by construction.
Eigen::MatrixXd ar_covariance(int width, int height, double sigma_x2, double rho);

enum class EstimatorMode { filter, predictor };

struct StepConditioning {
    // filter mode: Var(X_t | Y^t); predictor mode: Var(X_t | Y^{t-1}).
    double variance;
    // Var(Y_t | Y^{t-1}) (the observation innovation at this step).
    double innovation_variance;
    // Coefficients of the conditional mean E[X_t | y...] on the conditioning
    // observations (length t in filter mode, t-1 in predictor mode).
    std::vector<double> mean_coefficients;
};

// Exact joint-Gaussian sequential conditioning along `order` via incremental
// Cholesky of Sigma_Y = Sigma_X + sigma_n^2 I in scan order (O(t^2)/step).
std::vector<StepConditioning> gaussian_sequential_conditioning(const GaussianFieldModel& model,
                                                               std::span<const Site> order,
                                                               EstimatorMode mode, int width);

// Conditional mean of the +-sqrt-normalized symmetric binary input given a
// scalar AWGN observation: tanh(sqrt(snr) * y).
double binary_awgn_conditional_mean(double y, double snr);

// Scalar single-observation Bayes decisions.
double singlet_filter_bsc(double y, double delta, double prior_one);   // Hamming decision
double singlet_filter_awgn_gaussian(double y, double sigma_x2, double sigma_n2);  // Wiener

// Sequential estimator driven by run_scan_estimate. In predictor mode the
// current observation pointer is null: the interface withholds it.
class Estimator {
  public:
    virtual ~Estimator() = default;
    virtual double estimate(Site site, const ScanHistory& history, const double* current_obs) = 0;
    virtual std::string name() const = 0;
};

// Say-what-you-see (symmetric-prior BSC singlet filter).
std::unique_ptr<Estimator> make_say_what_you_see();
// Bayes posterior from the revealed subset of the chain window [i-k, i+k]
// on the row-extended index; Hamming decision by thresholding.
std::unique_ptr<Estimator> make_window_hmm_estimator(const HmmParams& params, int k);
// Optimal causal filter for the row-extended chain; requires raster order.
std::unique_ptr<Estimator> make_forward_hmm_estimator(const HmmParams& params);
// Optimal next-observation predictor for the chain (also optimal for the
// clean symbol under Hamming); requires raster order, predictor mode.
std::unique_ptr<Estimator> make_hmm_predictor(const HmmParams& params);
// Exact conditional-mean filter/predictor for a Gaussian model (zero mean).
std::unique_ptr<Estimator> make_gaussian_optimal_estimator(const GaussianFieldModel& model,
                                                           EstimatorMode mode);
// Scalar Wiener weight applied to the current observation (filter mode).
std::unique_ptr<Estimator> make_wiener_singlet(double sigma_x2, double sigma_n2);
// Simple predictors used as universal experts.
std::unique_ptr<Estimator> make_constant_predictor(double value);
std::unique_ptr<Estimator> make_last_observation_predictor(double initial = 0.0);
std::unique_ptr<Estimator> make_majority_predictor();

// Drives a full scan: the scanner picks sites from the observation history,
// the estimator sees exactly the allowed history (plus the current
// observation only in filter mode), and the trace records clean-vs-estimate
// losses.
ScanTrace run_scan_estimate(const Field& clean, const Field& noisy, Scanner& scanner,
                            Estimator& estimator, EstimatorMode mode, LossKind loss_kind);

}  // namespace fieldscan
