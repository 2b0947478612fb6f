#include "fieldscan/universal.hpp"

#include <algorithm>
#include <cmath>

#include "fieldscan/channels.hpp"
#include "fieldscan/errors.hpp"
#include "fieldscan/rng.hpp"

namespace fieldscan {

std::unique_ptr<Estimator> make_block_predictor(const std::string& name) {
    if (name == "const0") return make_constant_predictor(0.0);
    if (name == "const1") return make_constant_predictor(1.0);
    if (name == "last-obs") return make_last_observation_predictor(0.0);
    if (name == "majority") return make_majority_predictor();
    throw ConfigError("unknown block predictor: " + name);
}

std::vector<double> expert_distribution(std::span<const double> losses, double eta) {
    if (losses.empty()) throw std::invalid_argument("expert_distribution: no experts");
    if (!(eta > 0.0)) throw std::invalid_argument("expert_distribution: eta must be > 0");
    double lo = *std::min_element(losses.begin(), losses.end());
    if (!std::isfinite(lo)) throw std::invalid_argument("expert_distribution: non-finite loss");
    std::vector<double> p(losses.size());
    double sum = 0.0;
    for (std::size_t j = 0; j < losses.size(); ++j) {
        p[j] = std::exp(-eta * (losses[j] - lo));  // softmax is shift-invariant
        sum += p[j];
    }
    for (double& v : p) v /= sum;
    return p;
}

namespace {

Field extract_block(const Field& field, int row0, int col0, int rows, int cols) {
    Field block(cols, rows, field.alphabet());
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) block.set({r, c}, field({row0 + r, col0 + c}));
    return block;
}

// Runs the expert on a noisy block in predictor mode, invoking `visit` with
// (block-local site, observation, prediction) in visiting order.
template <typename Visit>
void drive_expert(const ExpertSpec& expert, const Field& noisy_block, Visit&& visit) {
    auto scanner = make_scanner(expert.scanner, noisy_block.width(), noisy_block.height());
    auto predictor = make_block_predictor(expert.predictor);
    ScanHistory history(noisy_block.width(), noisy_block.height());
    for (std::int64_t t = 0; t < noisy_block.size(); ++t) {
        Site s = scanner->next_site(history);
        double obs = noisy_block(s);
        double pred = predictor->estimate(s, history, nullptr);
        visit(s, obs, pred);
        history.push(s, obs);
    }
}

}  // namespace

double estimated_block_loss(const ExpertSpec& expert, const Field& noisy_block, double delta,
                            LossKind loss_kind) {
    if (noisy_block.alphabet() != Alphabet::binary)
        throw std::invalid_argument("estimated_block_loss: binary blocks only");
    double acc = 0.0;
    drive_expert(expert, noisy_block, [&](Site, double obs, double pred) {
        double h = unbiased_estimate_bsc(obs, delta);
        acc += (1.0 - h) * loss(loss_kind, 0.0, pred) + h * loss(loss_kind, 1.0, pred);
    });
    return acc;
}

double true_block_loss(const ExpertSpec& expert, const Field& clean_block,
                       const Field& noisy_block, LossKind loss_kind) {
    double acc = 0.0;
    drive_expert(expert, noisy_block, [&](Site s, double, double pred) {
        acc += loss(loss_kind, clean_block(s), pred);
    });
    return acc;
}

double default_learning_rate(std::size_t lambda, std::int64_t blocks, double l_max) {
    if (lambda < 1 || blocks < 1 || !(l_max > 0.0))
        throw std::invalid_argument("default_learning_rate: bad arguments");
    if (lambda == 1) return 1.0;  // distribution is degenerate anyway
    return std::sqrt(8.0 * std::log(static_cast<double>(lambda)) / static_cast<double>(blocks)) /
           l_max;
}

double regret_bound(int n, int m, std::size_t lambda, double l_max) {
    return static_cast<double>(m) * (n + m) * std::sqrt(std::log(static_cast<double>(lambda))) *
           l_max / std::sqrt(2.0);
}

UniversalResult universal_scandict(const Field& noisy, const ExpertSet& experts, int m, double eta,
                                   std::uint64_t seed, const Field* clean, double delta,
                                   LossKind loss_kind) {
    if (experts.experts.empty()) throw std::invalid_argument("universal_scandict: no experts");
    if (m < 1 || m > noisy.width() || m > noisy.height())
        throw std::invalid_argument("universal_scandict: block side must lie in [1, n]");
    if (clean && (clean->width() != noisy.width() || clean->height() != noisy.height()))
        throw std::invalid_argument("universal_scandict: clean/noisy shape mismatch");

    const std::size_t lambda = experts.experts.size();
    const int block_rows = noisy.height() / m;
    const int block_cols = noisy.width() / m;
    const int blocks = block_rows * block_cols;
    if (eta <= 0.0) eta = default_learning_rate(lambda, blocks, experts.l_max);

    UniversalResult result;
    result.eta = eta;
    result.blocks = blocks;
    result.expert_losses.assign(lambda, 0.0);
    result.chosen_expert.reserve(static_cast<std::size_t>(blocks));

    SequentialRng draw_rng(seed, RngStream::expert_draw);
    std::vector<double> est_cumulative(lambda, 0.0);
    TraceBuilder builder(noisy.size());

    for (int br = 0; br < block_rows; ++br) {
        for (int bc = 0; bc < block_cols; ++bc) {
            Field block = extract_block(noisy, br * m, bc * m, m, m);

            // Draw the acting expert from the exponential-weighting measure.
            std::vector<double> p = expert_distribution(est_cumulative, eta);
            double u = draw_rng.next_uniform();
            std::size_t j = 0;
            double cdf = 0.0;
            for (; j + 1 < lambda; ++j) {
                cdf += p[j];
                if (u < cdf) break;
            }
            result.chosen_expert.push_back(static_cast<int>(j));

            drive_expert(experts.experts[j], block, [&](Site s, double obs, double pred) {
                Site global{br * m + s.row, bc * m + s.col};
                double step = clean ? loss(loss_kind, (*clean)(global), pred) : 0.0;
                builder.add(global, obs, pred, step);
                if (clean) result.algorithm_loss += step;
            });

            // Every expert is scored on the finished block from noisy data.
            for (std::size_t e = 0; e < lambda; ++e)
                est_cumulative[e] += estimated_block_loss(experts.experts[e], block, delta, loss_kind);
            if (clean) {
                Field clean_block = extract_block(*clean, br * m, bc * m, m, m);
                for (std::size_t e = 0; e < lambda; ++e)
                    result.expert_losses[e] +=
                        true_block_loss(experts.experts[e], clean_block, block, loss_kind);
            }
        }
    }

    // Right and bottom strips: raster scan with the currently-best expert's
    // predictor (excluded from regret accounting).
    const int used_rows = block_rows * m, used_cols = block_cols * m;
    if (used_rows < noisy.height() || used_cols < noisy.width()) {
        std::size_t best = static_cast<std::size_t>(
            std::min_element(est_cumulative.begin(), est_cumulative.end()) - est_cumulative.begin());
        auto predictor = make_block_predictor(experts.experts[best].predictor);
        ScanHistory history(noisy.width(), noisy.height());
        for (int r = 0; r < noisy.height(); ++r) {
            for (int c = 0; c < noisy.width(); ++c) {
                if (r < used_rows && c < used_cols) continue;
                Site s{r, c};
                double obs = noisy(s);
                double pred = predictor->estimate(s, history, nullptr);
                builder.add(s, obs, pred, clean ? loss(loss_kind, (*clean)(s), pred) : 0.0);
                history.push(s, obs);
            }
        }
    }

    result.trace = builder.finish();
    if (clean) {
        result.best_expert_loss =
            *std::min_element(result.expert_losses.begin(), result.expert_losses.end());
        result.regret = result.algorithm_loss - result.best_expert_loss;
    }
    result.bound = regret_bound(noisy.width(), m, lambda, experts.l_max);
    return result;
}

FunctionDistribution filter_to_predictor(double q0, double q1) {
    if (q0 < 0.0 || q0 > 1.0 || q1 < 0.0 || q1 > 1.0)
        throw std::invalid_argument("filter_to_predictor: branch probabilities outside [0,1]");
    FunctionDistribution dist;
    for (int s0 = 0; s0 < 2; ++s0)
        for (int s1 = 0; s1 < 2; ++s1)
            dist[static_cast<std::size_t>(s0 * 2 + s1)] =
                (s0 ? q0 : 1.0 - q0) * (s1 ? q1 : 1.0 - q1);
    return dist;
}

int predictor_to_filter(const FunctionDistribution& dist, int y, double u) {
    if (y != 0 && y != 1) throw std::invalid_argument("predictor_to_filter: y must be binary");
    if (!(u >= 0.0 && u < 1.0))
        throw std::invalid_argument("predictor_to_filter: u must lie in [0, 1)");
    double sum = dist[0] + dist[1] + dist[2] + dist[3];
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("predictor_to_filter: distribution does not sum to 1");
    // P(output 0) = mass of maps with s(y) = 0.
    double p0 = (y == 0) ? dist[0] + dist[1] : dist[0] + dist[2];
    return u < p0 ? 0 : 1;
}

}  // namespace fieldscan
