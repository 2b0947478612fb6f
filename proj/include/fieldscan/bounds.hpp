#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fieldscan/channels.hpp"
#include "fieldscan/core.hpp"
#include "fieldscan/estimators.hpp"

namespace fieldscan {

// Binary entropies in bits throughout this header; differential/Gaussian
// quantities in nats. Conversion happens only at presentation boundaries.

double binary_entropy_bits(double p);
// Inverse of h_b on the increasing branch [0, 1/2]; h in bits, [0, 1].
double binary_entropy_inverse_bits(double h);

// Scalar Bayes loss of estimating X through a BSC(delta), as a function of
// the output marginal p = P(Y=1) in [delta, 1-delta]:
//   min{(p-delta)/(1-2delta), (1-p-delta)/(1-2delta), delta}.
double bayes_envelope_bsc(double p, double delta);

// Max output entropy (bits) over marginals whose Bayes loss is <= d:
//   h_b(delta * d) for d < delta (delta*d = d(1-delta)+delta(1-d)), else 1.
// Discontinuous at d = delta.
double zeta_binary(double d, double delta);

// Gaussian-input AWGN analogue in nats:
//   0.5 ln(2 pi e sigma_n^4 / (sigma_n^2 - d)) for d < sigma_n^2, else +inf.
double zeta_gaussian(double d, double sigma_n2);

// Tabulated function with its pointwise-least concave majorant on the grid
// (upper convex hull of the graph, exact on hull vertices).
struct EnvelopeFunction {
    std::vector<double> grid;      // strictly increasing
    std::vector<double> raw;       // input values
    std::vector<double> envelope;  // concave majorant sampled on grid

    double max_value() const;
    // Piecewise-linear evaluation of the envelope at d (clamped to the grid).
    double operator()(double d) const;
    // inf{d : envelope(d) >= level}; throws NoFeasibleBound above the max.
    double inverse(double level) const;
};

EnvelopeFunction upper_concave_envelope(std::span<const double> grid,
                                        std::span<const double> values);

// zeta_binary tabulated on [0, d_max] with grid points pinned just below and
// exactly at d = delta so the discontinuity is represented.
EnvelopeFunction make_zeta_binary_envelope(double delta, int grid_points = 4097,
                                           double d_max = 0.5);

// Lower bound on the best scanning-and-filtering loss: the envelope
// inverted at the per-site output entropy (units must match the envelope).
double filtering_lower_bound(double entropy_rate, const EnvelopeFunction& envelope);

// f(x) = ln(1+x) - x/(x+1): the gap between the scalar causal continuous
// observation problem and one-shot estimation, Gaussian case.
double continuous_filtering_gap(double snr);
// g(x) = x - ln(1+x): prediction-side analogue.
double continuous_prediction_gap(double snr);

// sigma_n^2 * f(sigma_x^2 / sigma_n^2): two-scan filtering gap bound,
// Gaussian input.
double gaussian_filter_excess_bound(double sigma_x2, double sigma_n2);
// sigma_n^2 sigma_x^2 / (sigma_x^2 + sigma_n^2): one-shot estimation error,
// also the trivial excess bound.
double symbol_by_symbol_bound(double sigma_x2, double sigma_n2);
// sigma_n^2 * g(snr): two-scan prediction gap bound, Gaussian input.
double gaussian_scandiction_excess_bound(double sigma_x2, double sigma_n2);

// Mutual information and MMSE for +-1 binary input observed at sqrt(snr)
// through standard Gaussian noise, via Gauss-Hermite quadrature (>= 64
// nodes, refined until successive rules agree to 1e-8 absolute).
struct ImmseResult {
    double mutual_information;  // nats
    double mmse;
};
ImmseResult binary_awgn_immse(double snr);

// 2 sigma_n^2 I(snr) - sigma_x^2 mmse(snr), snr = sigma_x^2/sigma_n^2: the
// two-scan filtering gap bound for symmetric binary input in AWGN.
double fstar_binary_awgn(double sigma_x2, double sigma_n2);

// Minimax affine fit of the BSC Bayes envelope against the binary entropy:
//   epsilon = min_{a,b} max_{delta<=p<=1/2} |a h_b(p) + b - f_delta(p)|.
struct MinimaxFit {
    double epsilon;
    double a;
    double b;
};
MinimaxFit epsilon_delta(double delta, int grid_points = 4096);

// 2 * epsilon_delta: two-scan filtering gap bound, BSC.
double binary_filter_excess_bound(double delta);

// Excess-loss bound from a lower bound h_plus (nats) on the normalized
// denoising entropy: sbs_bound - exp(2 h_plus)/(2 pi e). Pass -inf for the
// perfect-denoising sentinel.
double hplus_excess_bound(double h_plus, double sigma_x2, double sigma_n2);

// Clean prediction lower bound: invert the max-entropy-at-loss function.
// Hamming: rate in bits, h_b^{-1}; squared: rate in nats, exp(2h)/(2 pi e).
double clean_prediction_lower_bound(double entropy_rate, LossKind loss_kind);

// Noisy prediction value from the clean prediction value of the noisy data:
// squared: U_Y - sigma_n^2;  Hamming/BSC: (U_Y - delta)/(1 - 2 delta)
// (requires U_Y >= delta).
double noisy_scandictability(double clean_value_on_y, const Channel& channel);

// sigma_u^2(Y) - sigma_n^2 with sigma_u^2 = exp{(1/4pi^2) int ln g} over the
// torus, evaluated by a tensor trapezoid rule refined to 1e-6 relative.
double gaussian_noisy_scandictability(
    const std::function<double(double, double)>& spectral_density_y, double sigma_n2,
    int min_grid = 256);

// Log-spectral one-step prediction variance exp{(1/4pi^2) int ln g}.
double log_spectral_prediction_variance(
    const std::function<double(double, double)>& spectral_density, int min_grid = 256);

// Minimax constant of the clean binary Hamming prediction fit, used by the
// noisy prediction excess bound.
inline constexpr double kCleanHammingMinimaxError = 0.08;

// 2 * kCleanHammingMinimaxError / (1 - 2 delta).
double noisy_prediction_excess_bound_bsc(double delta);

// Thresholds on the BSC crossover below which memoryless estimation is
// optimal for the symmetric binary Markov chain: filtering f(pi), denoising
// d(pi).
struct SingletRegions {
    double f_pi;
    double d_pi;
};
SingletRegions singlet_regions(double pi);

// 0.5 ln det(I + Sigma_X / sigma_n^2) in nats, via Cholesky.
double gaussian_mutual_information(const GaussianFieldModel& model);

struct BoundReport {
    std::string name;
    std::vector<std::pair<std::string, double>> parameters;
    double value;
    std::string formula;
};

std::string format_bound_report(const BoundReport& report);

}  // namespace fieldscan
