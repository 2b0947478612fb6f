#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fieldscan/core.hpp"
#include "fieldscan/estimators.hpp"
#include "fieldscan/scanners.hpp"

namespace fieldscan {

// One expert: a scanner/predictor pair instantiated fresh on each m x m
// block. Predictor names: const0 | const1 | last-obs | majority.
struct ExpertSpec {
    std::string scanner;
    std::string predictor;
};

struct ExpertSet {
    std::vector<ExpertSpec> experts;
    double l_max = 1.0;  // uniform bound on the per-step loss
};

std::unique_ptr<Estimator> make_block_predictor(const std::string& name);

// softmax(-eta * losses); numerically shift-invariant.
std::vector<double> expert_distribution(std::span<const double> estimated_cumulative_loss,
                                        double eta);

// Unbiased estimate of the expert's true block loss from the noisy block
// alone: sum over steps of (1-h(y)) l(0,F) + h(y) l(1,F) with
// h(y) = (y-delta)/(1-2delta). May be negative for single realizations.
double estimated_block_loss(const ExpertSpec& expert, const Field& noisy_block, double delta,
                            LossKind loss_kind);

// True block loss of the expert against the clean block (diagnostics).
double true_block_loss(const ExpertSpec& expert, const Field& clean_block,
                       const Field& noisy_block, LossKind loss_kind);

// Default learning rate sqrt(8 ln(lambda) / blocks) / l_max.
double default_learning_rate(std::size_t lambda, std::int64_t blocks, double l_max);

// m(n)(n+m(n)) sqrt(ln lambda) l_max / sqrt(2).
double regret_bound(int n, int m, std::size_t lambda, double l_max);

struct UniversalResult {
    ScanTrace trace;                    // requires the clean field for losses
    double algorithm_loss = 0.0;        // realized loss on full blocks
    std::vector<double> expert_losses;  // realized block-restarted losses
    double best_expert_loss = 0.0;
    double regret = 0.0;
    double bound = 0.0;
    double eta = 0.0;
    int blocks = 0;
    std::vector<int> chosen_expert;  // per block
};

// Exponential-weighting universal scandictor: scans the field in raster
// block order; each m x m block is predicted by an expert drawn from
// softmax(-eta * estimated cumulative losses), every expert restarted per
// block; estimates are updated from the noisy data only. Partial edge
// blocks (n % m != 0) are scanned raster with the currently-best expert and
// excluded from regret accounting.
UniversalResult universal_scandict(const Field& noisy, const ExpertSet& experts, int m, double eta,
                                   std::uint64_t seed, const Field* clean_for_scoring,
                                   double delta, LossKind loss_kind = LossKind::hamming);

// Binary filtering <-> prediction transformation over the 4 maps
// s: {0,1} -> {0,1}, indexed s(0)*2 + s(1).
using FunctionDistribution = std::array<double, 4>;

// Distribution over maps induced by a randomized filter with independent
// per-branch randomization: q_y = P(xhat = 1 | y).
FunctionDistribution filter_to_predictor(double q0, double q1);

// Inverse-CDF draw of the filter output from a distribution over maps.
int predictor_to_filter(const FunctionDistribution& dist, int y, double u);

}  // namespace fieldscan
