#include "fieldscan/bounds.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

#include "fieldscan/errors.hpp"

namespace fieldscan {

namespace {
constexpr double kLog2 = 0.69314718055994530941723212;
constexpr double kTwoPiE = 17.079468445347134130927101;  // 2 pi e
}  // namespace

double binary_entropy_bits(double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("binary_entropy_bits: p outside [0,1]");
    if (p == 0.0 || p == 1.0) return 0.0;
    return (-p * std::log(p) - (1.0 - p) * std::log(1.0 - p)) / kLog2;
}

double binary_entropy_inverse_bits(double h) {
    if (h < 0.0 || h > 1.0 + 1e-12)
        throw NoFeasibleBound("binary_entropy_inverse_bits: level outside [0,1]");
    // The entropy peak is flat to second order; bisection there would stall
    // at sqrt(machine-epsilon) accuracy.
    if (h >= 1.0 - 1e-15) return 0.5;
    double lo = 0.0, hi = 0.5;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (binary_entropy_bits(mid) < h)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double bayes_envelope_bsc(double p, double delta) {
    if (!(delta >= 0.0 && delta < 0.5))
        throw std::invalid_argument("bayes_envelope_bsc: delta must lie in [0, 0.5)");
    if (p < delta - 1e-12 || p > 1.0 - delta + 1e-12)
        throw std::invalid_argument(
            "bayes_envelope_bsc: p is not a reachable output marginal (outside [delta, 1-delta])");
    if (delta == 0.5) return 0.5;
    double a = (p - delta) / (1.0 - 2.0 * delta);
    double b = (1.0 - p - delta) / (1.0 - 2.0 * delta);
    return std::max(0.0, std::min({a, b, delta}));
}

double zeta_binary(double d, double delta) {
    if (d < 0.0) throw std::invalid_argument("zeta_binary: d must be >= 0");
    if (!(delta >= 0.0 && delta < 0.5))
        throw std::invalid_argument("zeta_binary: delta must lie in [0, 0.5)");
    if (d >= delta) return 1.0;
    double star = d * (1.0 - delta) + delta * (1.0 - d);
    return binary_entropy_bits(star);
}

double zeta_gaussian(double d, double sigma_n2) {
    if (d < 0.0) throw std::invalid_argument("zeta_gaussian: d must be >= 0");
    if (!(sigma_n2 > 0.0)) throw std::invalid_argument("zeta_gaussian: sigma_n2 must be > 0");
    if (d >= sigma_n2) return std::numeric_limits<double>::infinity();
    return 0.5 * std::log(2.0 * M_PI * M_E * sigma_n2 * sigma_n2 / (sigma_n2 - d));
}

double EnvelopeFunction::max_value() const {
    return *std::max_element(envelope.begin(), envelope.end());
}

double EnvelopeFunction::operator()(double d) const {
    if (grid.empty()) throw std::invalid_argument("EnvelopeFunction: empty grid");
    if (d <= grid.front()) return envelope.front();
    if (d >= grid.back()) return envelope.back();
    auto it = std::upper_bound(grid.begin(), grid.end(), d);
    std::size_t i = static_cast<std::size_t>(it - grid.begin());
    double x0 = grid[i - 1], x1 = grid[i];
    double y0 = envelope[i - 1], y1 = envelope[i];
    return y0 + (d - x0) * (y1 - y0) / (x1 - x0);
}

double EnvelopeFunction::inverse(double level) const {
    if (level > max_value() + 1e-12)
        throw NoFeasibleBound("envelope inverse: level above the envelope's maximum");
    if (level <= envelope.front()) return grid.front();
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (envelope[i] >= level) {
            double x0 = grid[i - 1], x1 = grid[i];
            double y0 = envelope[i - 1], y1 = envelope[i];
            if (y1 == y0) return x0;
            return x0 + (level - y0) * (x1 - x0) / (y1 - y0);
        }
    }
    return grid.back();
}

EnvelopeFunction upper_concave_envelope(std::span<const double> grid,
                                        std::span<const double> values) {
    if (grid.size() != values.size() || grid.size() < 2)
        throw std::invalid_argument("upper_concave_envelope: need matched grids with >= 2 points");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("upper_concave_envelope: grid must be strictly increasing");

    // Upper convex hull of the graph (monotone chain).
    std::vector<std::size_t> hull;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        while (hull.size() >= 2) {
            std::size_t a = hull[hull.size() - 2], b = hull[hull.size() - 1];
            double cross = (grid[b] - grid[a]) * (values[i] - values[a]) -
                           (grid[i] - grid[a]) * (values[b] - values[a]);
            if (cross >= 0.0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(i);
    }

    EnvelopeFunction env;
    env.grid.assign(grid.begin(), grid.end());
    env.raw.assign(values.begin(), values.end());
    env.envelope.resize(grid.size());
    std::size_t seg = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        while (seg + 1 < hull.size() && grid[hull[seg + 1]] < grid[i]) ++seg;
        std::size_t a = hull[seg];
        std::size_t b = hull[std::min(seg + 1, hull.size() - 1)];
        if (a == b || grid[i] <= grid[a]) {
            env.envelope[i] = values[a];
        } else {
            double tt = (grid[i] - grid[a]) / (grid[b] - grid[a]);
            env.envelope[i] = values[a] + tt * (values[b] - values[a]);
        }
        env.envelope[i] = std::max(env.envelope[i], values[i]);
    }
    return env;
}

EnvelopeFunction make_zeta_binary_envelope(double delta, int grid_points, double d_max) {
    if (grid_points < 8) throw std::invalid_argument("make_zeta_binary_envelope: grid too coarse");
    if (!(d_max > delta)) throw std::invalid_argument("make_zeta_binary_envelope: d_max <= delta");
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(grid_points) + 2);
    for (int i = 0; i < grid_points; ++i)
        grid.push_back(d_max * static_cast<double>(i) / (grid_points - 1));
    if (delta > 0.0) {
        grid.push_back(delta);
        grid.push_back(delta * (1.0 - 1e-9));  // left limit of the jump
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    std::vector<double> vals(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = zeta_binary(grid[i], delta);
    return upper_concave_envelope(grid, vals);
}

double filtering_lower_bound(double entropy_rate, const EnvelopeFunction& envelope) {
    return envelope.inverse(entropy_rate);
}

double continuous_filtering_gap(double x) {
    if (x < 0.0) throw std::invalid_argument("continuous_filtering_gap: x must be >= 0");
    return std::log1p(x) - x / (x + 1.0);
}

double continuous_prediction_gap(double x) {
    if (x < 0.0) throw std::invalid_argument("continuous_prediction_gap: x must be >= 0");
    return x - std::log1p(x);
}

double gaussian_filter_excess_bound(double sigma_x2, double sigma_n2) {
    if (!(sigma_x2 > 0.0 && sigma_n2 > 0.0))
        throw std::invalid_argument("gaussian_filter_excess_bound: variances must be positive");
    return sigma_n2 * continuous_filtering_gap(sigma_x2 / sigma_n2);
}

double symbol_by_symbol_bound(double sigma_x2, double sigma_n2) {
    if (!(sigma_x2 > 0.0 && sigma_n2 > 0.0))
        throw std::invalid_argument("symbol_by_symbol_bound: variances must be positive");
    return sigma_n2 * sigma_x2 / (sigma_x2 + sigma_n2);
}

double gaussian_scandiction_excess_bound(double sigma_x2, double sigma_n2) {
    if (!(sigma_x2 > 0.0 && sigma_n2 > 0.0))
        throw std::invalid_argument("gaussian_scandiction_excess_bound: variances must be positive");
    return sigma_n2 * continuous_prediction_gap(sigma_x2 / sigma_n2);
}

namespace {

struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Golub-Welsch on the Hermite Jacobi matrix (weight e^{-x^2}).
const GaussHermiteRule& gauss_hermite(int n) {
    static std::map<int, GaussHermiteRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        double b = std::sqrt(k / 2.0);
        jacobi(k, k - 1) = b;
        jacobi(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    if (es.info() != Eigen::Success) throw NumericalError("gauss_hermite: eigensolver failed");
    GaussHermiteRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const double sqrt_pi = std::sqrt(M_PI);
    for (int k = 0; k < n; ++k) {
        rule.nodes[static_cast<std::size_t>(k)] = es.eigenvalues()(k);
        double v0 = es.eigenvectors()(0, k);
        rule.weights[static_cast<std::size_t>(k)] = sqrt_pi * v0 * v0;
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

inline double log_cosh(double z) {
    double a = std::abs(z);
    return a + std::log1p(std::exp(-2.0 * a)) - kLog2;
}

ImmseResult immse_with_rule(double snr, const GaussHermiteRule& rule) {
    // E over standard normal Y of phi(snr - sqrt(snr) Y), substituting
    // y = sqrt(2) x against the e^{-x^2} weight.
    const double c = std::sqrt(2.0 * snr);
    const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
    double s_lc = 0.0, s_th = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        double z = snr - c * rule.nodes[k];
        s_lc += rule.weights[k] * log_cosh(z);
        s_th += rule.weights[k] * std::tanh(z);
    }
    return {snr - inv_sqrt_pi * s_lc, 1.0 - inv_sqrt_pi * s_th};
}

}  // namespace

ImmseResult binary_awgn_immse(double snr) {
    if (!(snr > 0.0)) throw std::invalid_argument("binary_awgn_immse: snr must be > 0");
    int n = 96;
    ImmseResult prev = immse_with_rule(snr, gauss_hermite(64));
    for (; n <= 384; n = n * 3 / 2) {
        ImmseResult cur = immse_with_rule(snr, gauss_hermite(n));
        if (std::abs(cur.mutual_information - prev.mutual_information) <= 1e-8 &&
            std::abs(cur.mmse - prev.mmse) <= 1e-8)
            return cur;
        prev = cur;
    }
    std::ostringstream oss;
    oss << "binary_awgn_immse: quadrature did not converge to 1e-8 at snr=" << snr
        << " with up to 384 nodes";
    throw NumericalError(oss.str());
}

double fstar_binary_awgn(double sigma_x2, double sigma_n2) {
    if (!(sigma_x2 > 0.0 && sigma_n2 > 0.0))
        throw std::invalid_argument("fstar_binary_awgn: variances must be positive");
    double snr = sigma_x2 / sigma_n2;
    ImmseResult r = binary_awgn_immse(snr);
    return 2.0 * sigma_n2 * r.mutual_information - sigma_x2 * r.mmse;
}

namespace {

// Residual extremes of r(p) = f_delta(p) - a h_b(p) on [delta, 1/2]:
// dense grid plus golden refinement around the best cells.
struct ResidualExtremes {
    double max_value, max_arg;
    double min_value, min_arg;
};

ResidualExtremes residual_extremes(double delta, double a, const std::vector<double>& grid) {
    auto r = [&](double p) { return bayes_envelope_bsc(p, delta) - a * binary_entropy_bits(p); };
    std::size_t imax = 0, imin = 0;
    double vmax = -std::numeric_limits<double>::infinity();
    double vmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double v = r(grid[i]);
        if (v > vmax) { vmax = v; imax = i; }
        if (v < vmin) { vmin = v; imin = i; }
    }
    auto refine = [&](std::size_t i, int sign) {
        double lo = grid[i == 0 ? 0 : i - 1];
        double hi = grid[std::min(i + 1, grid.size() - 1)];
        const double gr = 0.6180339887498949;
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        double f1 = sign * r(x1), f2 = sign * r(x2);
        for (int it = 0; it < 80; ++it) {
            if (f1 < f2) {
                lo = x1; x1 = x2; f1 = f2;
                x2 = lo + gr * (hi - lo); f2 = sign * r(x2);
            } else {
                hi = x2; x2 = x1; f2 = f1;
                x1 = hi - gr * (hi - lo); f1 = sign * r(x1);
            }
        }
        double x = 0.5 * (lo + hi);
        return std::pair<double, double>{r(x), x};
    };
    auto [rmax, pmax] = refine(imax, +1);
    auto [rmin, pmin] = refine(imin, -1);
    if (rmax < vmax) { rmax = vmax; pmax = grid[imax]; }
    if (rmin > vmin) { rmin = vmin; pmin = grid[imin]; }
    return {rmax, pmax, rmin, pmin};
}

}  // namespace

MinimaxFit epsilon_delta(double delta, int grid_points) {
    if (!(delta > 0.0 && delta < 0.5))
        throw std::invalid_argument("epsilon_delta: delta must lie in (0, 0.5)");
    if (grid_points < 64) throw std::invalid_argument("epsilon_delta: grid too coarse");

    std::vector<double> grid(static_cast<std::size_t>(grid_points));
    for (int i = 0; i < grid_points; ++i)
        grid[static_cast<std::size_t>(i)] =
            delta + (0.5 - delta) * static_cast<double>(i) / (grid_points - 1);

    // E(a) = (max r - min r)/2 is convex in a; golden-section over a bracket
    // wide enough for the steep near-1/2 regime where a* ~ ln2/(1-2d)^2.
    auto objective = [&](double a) {
        ResidualExtremes e = residual_extremes(delta, a, grid);
        return 0.5 * (e.max_value - e.min_value);
    };
    double lo = 0.0;
    double hi = std::max(10.0, 4.0 * kLog2 / ((1.0 - 2.0 * delta) * (1.0 - 2.0 * delta)));
    const double gr = 0.6180339887498949;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = objective(x1), f2 = objective(x2);
    for (int it = 0; it < 120; ++it) {
        if (f1 < f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - gr * (hi - lo); f1 = objective(x1);
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + gr * (hi - lo); f2 = objective(x2);
        }
    }
    double a = 0.5 * (lo + hi);
    ResidualExtremes e = residual_extremes(delta, a, grid);
    MinimaxFit fit;
    fit.a = a;
    fit.b = 0.5 * (e.max_value + e.min_value);
    fit.epsilon = 0.5 * (e.max_value - e.min_value);
    return fit;
}

double binary_filter_excess_bound(double delta) { return 2.0 * epsilon_delta(delta).epsilon; }

double hplus_excess_bound(double h_plus, double sigma_x2, double sigma_n2) {
    double base = symbol_by_symbol_bound(sigma_x2, sigma_n2);
    if (h_plus == -std::numeric_limits<double>::infinity()) return base;
    if (!std::isfinite(h_plus)) throw std::invalid_argument("hplus_excess_bound: h_plus not finite");
    return base - std::exp(2.0 * h_plus) / kTwoPiE;
}

double clean_prediction_lower_bound(double entropy_rate, LossKind loss_kind) {
    if (loss_kind == LossKind::hamming) {
        if (entropy_rate < 0.0 || entropy_rate > 1.0 + 1e-12)
            throw NoFeasibleBound("clean_prediction_lower_bound: Hamming rate outside [0, 1] bits");
        return binary_entropy_inverse_bits(std::min(entropy_rate, 1.0));
    }
    return std::exp(2.0 * entropy_rate) / kTwoPiE;
}

double noisy_scandictability(double clean_value_on_y, const Channel& channel) {
    if (channel.kind == Channel::Kind::awgn) {
        if (clean_value_on_y < 0.0)
            throw std::invalid_argument("noisy_scandictability: clean value must be >= 0");
        return clean_value_on_y - channel.noise_variance;
    }
    if (clean_value_on_y < channel.delta - 1e-12)
        throw std::invalid_argument(
            "noisy_scandictability: Hamming clean value below delta is unreachable");
    return (clean_value_on_y - channel.delta) / (1.0 - 2.0 * channel.delta);
}

double log_spectral_prediction_variance(
    const std::function<double(double, double)>& spectral_density, int min_grid) {
    if (min_grid < 8) throw std::invalid_argument("log_spectral_prediction_variance: grid too coarse");
    double prev = 0.0;
    bool have_prev = false;
    for (int m = min_grid; m <= 4 * min_grid * 2; m *= 2) {
        double sum = 0.0;
        const double step = 2.0 * M_PI / m;
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                double g = spectral_density(i * step, j * step);
                if (!(g > 0.0) || g < 1e-300)
                    throw DegenerateSpectrum(
                        "log_spectral_prediction_variance: spectral density vanishes on the grid");
                sum += std::log(g);
            }
        }
        double value = std::exp(sum / (static_cast<double>(m) * m));
        if (have_prev && std::abs(value - prev) <= 1e-6 * std::max(1.0, std::abs(value)))
            return value;
        prev = value;
        have_prev = true;
    }
    throw NumericalError("log_spectral_prediction_variance: torus integral did not converge");
}

double gaussian_noisy_scandictability(
    const std::function<double(double, double)>& spectral_density_y, double sigma_n2,
    int min_grid) {
    if (!(sigma_n2 >= 0.0))
        throw std::invalid_argument("gaussian_noisy_scandictability: sigma_n2 must be >= 0");
    return log_spectral_prediction_variance(spectral_density_y, min_grid) - sigma_n2;
}

double noisy_prediction_excess_bound_bsc(double delta) {
    if (!(delta >= 0.0 && delta < 0.5))
        throw std::invalid_argument("noisy_prediction_excess_bound_bsc: delta must lie in [0, 0.5)");
    return 2.0 * kCleanHammingMinimaxError / (1.0 - 2.0 * delta);
}

SingletRegions singlet_regions(double pi) {
    if (!(pi > 0.0 && pi <= 0.5))
        throw std::invalid_argument("singlet_regions: pi must lie in (0, 0.5]");
    double f = 0.5 * (1.0 - std::sqrt(std::max(1.0 - 4.0 * pi, 0.0)));
    double ratio = pi / (1.0 - pi);
    double d = 0.5 * (1.0 - std::sqrt(std::max(1.0 - 4.0 * ratio * ratio, 0.0)));
    return {f, d};
}

double gaussian_mutual_information(const GaussianFieldModel& model) {
    const int n = model.sites();
    Eigen::MatrixXd a =
        Eigen::MatrixXd::Identity(n, n) + model.covariance() / model.noise_variance();
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success)
        throw NumericalError("gaussian_mutual_information: Cholesky factorization failed");
    double logdet = 0.0;
    for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
    return 0.5 * logdet;
}

std::string format_bound_report(const BoundReport& report) {
    std::ostringstream oss;
    oss << "bound " << report.name << "  value ";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", report.value);
    oss << buf;
    for (const auto& [k, v] : report.parameters) {
        std::snprintf(buf, sizeof buf, "%.12g", v);
        oss << "  " << k << "=" << buf;
    }
    oss << "  formula: " << report.formula;
    return oss.str();
}

}  // namespace fieldscan
