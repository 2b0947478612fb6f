#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fieldscan/channels.hpp"
#include "fieldscan/core.hpp"
#include "fieldscan/estimators.hpp"

namespace fieldscan {

// Field sources for experiments. markov is the symmetric binary first-order
// chain over the row-extension; gauss_ar is the separable exponential-
// autocorrelation field (exact linear-time sampling).
struct SourceSpec {
    enum class Kind { constant, iid_binary, markov, gauss_white, gauss_ar };
    Kind kind = Kind::iid_binary;
    double value = 0.0;     // constant
    double p_one = 0.5;     // iid_binary
    double pi = 0.1;        // markov
    double sigma_x2 = 1.0;  // gauss_*
    double rho = 0.6;       // gauss_ar
};

SourceSpec parse_source(const std::string& spec);
Field generate_field(const SourceSpec& source, int width, int height, std::uint64_t seed);

struct ExperimentConfig {
    SourceSpec source;
    Channel channel;
    std::string scanner = "raster";
    std::string estimator = "sws";
    EstimatorMode mode = EstimatorMode::filter;
    LossKind loss = LossKind::hamming;
    int width = 0;
    int height = 0;
    int trials = 1;
    std::uint64_t seed = 1;
    int jobs = 0;  // 0 = hardware concurrency
};

// Resolves an estimator spec against the experiment's model parameters:
// sws | wiener | window:K | hmm-forward | hmm-predict | gauss-opt |
// const0 | const1 | last-obs | majority. Throws ConfigError on mismatch.
std::unique_ptr<Estimator> make_estimator(const ExperimentConfig& config);

struct MonteCarloResult {
    double mean = 0.0;        // normalized cumulative loss
    double half_width = 0.0;  // 1.96 * sample std / sqrt(trials)
    std::vector<double> per_trial;
    std::vector<double> step_profile;  // mean per-step loss (when requested)
};

MonteCarloResult monte_carlo_loss(const ExperimentConfig& config, bool keep_profile = false);

enum class FigureKind {
    zeta_envelope,        // fig 1
    gauss_excess,         // fig 2
    binary_awgn_excess,   // fig 3
    binary_filter_bounds, // fig 4
    hmm_region,           // fig 5
    hmm_diff,             // fig 6
};

FigureKind figure_kind_from_number(int figure);

struct FigureOptions {
    double delta = 0.25;           // fig 1
    int snr_points = 200;          // figs 2-3, log grid 1e-2..1e2
    double grid_step = 0.01;       // figs 4-6
    std::int64_t symbols = 1000000;  // fig 5 Monte Carlo budget per cell
    std::uint64_t seed = 1;
    int jobs = 0;
};

struct FigureData {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

FigureData figure_data(FigureKind kind, const FigureOptions& options = {});

enum class AuditKind { thm1, thm2, thm4, lemma_sq, prop_binary, regret };

AuditKind parse_audit_kind(const std::string& name);

struct AuditReport {
    std::string name;
    bool pass = false;
    std::vector<std::string> lines;  // margin table, one line per check
};

AuditReport theorem_audit(AuditKind which, std::uint64_t seed = 1, int jobs = 0);

// Deterministic static-partition parallel loop (jobs <= 0: all cores;
// jobs == 1 runs inline and is guaranteed identical).
void parallel_for(std::int64_t count, int jobs, const std::function<void(std::int64_t)>& body);

// Exact expected normalized loss of the odds-then-evens scheme (k scanned,
// one skipped; window radius 1 on the second pass), ignoring chain-boundary
// effects: (k*delta + window_loss)/(k+1).
double ote_exact_loss(const HmmParams& params, int k);

}  // namespace fieldscan
