#include "fieldscan/estimators.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "fieldscan/errors.hpp"
#include "fieldscan/rng.hpp"

namespace fieldscan {

HmmParams::HmmParams(double pi_, double delta_) : pi(pi_), delta(delta_) {
    if (!(pi > 0.0 && pi <= 0.5))
        throw std::invalid_argument("HmmParams: pi must lie in (0, 0.5]");
    if (!(delta >= 0.0 && delta < 0.5))
        throw std::invalid_argument("HmmParams: delta must lie in [0, 0.5)");
}

namespace {

inline double emission(double y, double x, double delta) {
    return (y == x) ? 1.0 - delta : delta;
}

}  // namespace

std::vector<double> hmm_forward_filter(std::span<const double> y, const HmmParams& p) {
    std::vector<double> post(y.size());
    double prior = 0.5;  // stationary P(x_1 = 1)
    for (std::size_t t = 0; t < y.size(); ++t) {
        double w1 = prior * emission(y[t], 1.0, p.delta);
        double w0 = (1.0 - prior) * emission(y[t], 0.0, p.delta);
        double q = w1 / (w0 + w1);
        post[t] = q;
        prior = q * (1.0 - p.pi) + (1.0 - q) * p.pi;
    }
    return post;
}

std::vector<double> hmm_forward_predictive(std::span<const double> y, const HmmParams& p) {
    std::vector<double> pred(y.size());
    double prior = 0.5;
    for (std::size_t t = 0; t < y.size(); ++t) {
        pred[t] = prior * (1.0 - p.delta) + (1.0 - prior) * p.delta;
        double w1 = prior * emission(y[t], 1.0, p.delta);
        double w0 = (1.0 - prior) * emission(y[t], 0.0, p.delta);
        double q = w1 / (w0 + w1);
        prior = q * (1.0 - p.pi) + (1.0 - q) * p.pi;
    }
    return pred;
}

double hmm_window_posterior_masked(std::span<const double> values,
                                   std::span<const std::uint8_t> revealed, std::int64_t i, int k,
                                   const HmmParams& p) {
    const std::int64_t n = static_cast<std::int64_t>(values.size());
    if (i < 0 || i >= n) throw std::invalid_argument("hmm_window_posterior: index out of range");
    if (k < 0) throw std::invalid_argument("hmm_window_posterior: window radius must be >= 0");
    const std::int64_t lo = std::max<std::int64_t>(0, i - k);
    const std::int64_t hi = std::min<std::int64_t>(n - 1, i + k);

    auto emit = [&](std::int64_t j, double x) {
        return revealed[static_cast<std::size_t>(j)] ? emission(values[static_cast<std::size_t>(j)], x, p.delta) : 1.0;
    };

    // Forward pass lo..i (alpha includes emissions up to the position).
    double a0 = 0.5 * emit(lo, 0.0), a1 = 0.5 * emit(lo, 1.0);
    for (std::int64_t j = lo + 1; j <= i; ++j) {
        double b0 = (a0 * (1.0 - p.pi) + a1 * p.pi) * emit(j, 0.0);
        double b1 = (a0 * p.pi + a1 * (1.0 - p.pi)) * emit(j, 1.0);
        double s = b0 + b1;
        a0 = b0 / s;
        a1 = b1 / s;
    }
    // Backward pass hi..i (beta excludes the emission at the position itself).
    double c0 = 1.0, c1 = 1.0;
    for (std::int64_t j = hi; j > i; --j) {
        double e0 = emit(j, 0.0) * c0, e1 = emit(j, 1.0) * c1;
        double b0 = (1.0 - p.pi) * e0 + p.pi * e1;
        double b1 = p.pi * e0 + (1.0 - p.pi) * e1;
        double s = b0 + b1;
        c0 = b0 / s;
        c1 = b1 / s;
    }
    double w0 = a0 * c0, w1 = a1 * c1;
    return w1 / (w0 + w1);
}

double hmm_window_posterior(std::span<const double> y, std::int64_t i, int k,
                            const HmmParams& params) {
    std::vector<std::uint8_t> all(y.size(), 1);
    return hmm_window_posterior_masked(y, all, i, k, params);
}

double hmm_window_expected_loss(const HmmParams& p, int k) {
    if (k < 0 || k > 12) throw std::invalid_argument("hmm_window_expected_loss: k out of range");
    const int n = 2 * k + 1;
    std::vector<double> y(static_cast<std::size_t>(n));
    std::vector<std::uint8_t> all(static_cast<std::size_t>(n), 1);
    double total = 0.0;
    for (int yb = 0; yb < (1 << n); ++yb) {
        for (int j = 0; j < n; ++j) y[static_cast<std::size_t>(j)] = (yb >> j) & 1 ? 1.0 : 0.0;
        // Unnormalized forward pass gives the window mass P(y).
        double a0 = 0.5 * emission(y[0], 0.0, p.delta), a1 = 0.5 * emission(y[0], 1.0, p.delta);
        for (int j = 1; j < n; ++j) {
            double b0 = (a0 * (1.0 - p.pi) + a1 * p.pi) * emission(y[static_cast<std::size_t>(j)], 0.0, p.delta);
            double b1 = (a0 * p.pi + a1 * (1.0 - p.pi)) * emission(y[static_cast<std::size_t>(j)], 1.0, p.delta);
            a0 = b0;
            a1 = b1;
        }
        double mass = a0 + a1;
        double post = hmm_window_posterior_masked(y, all, k, k, p);
        total += mass * std::min(post, 1.0 - post);
    }
    return total;
}

RateEstimate hmm_output_entropy_rate_upper_mc(const HmmParams& p, std::int64_t symbols,
                                              std::uint64_t seed) {
    if (symbols < 2) throw std::invalid_argument("entropy rate estimate needs >= 2 symbols");
    SequentialRng rng(seed, RngStream::source);
    const double log2e = 1.4426950408889634;
    double x = rng.next_uniform() < 0.5 ? 1.0 : 0.0;
    double prior = 0.5;
    double sum = 0.0, sumsq = 0.0;
    for (std::int64_t t = 0; t < symbols; ++t) {
        if (t > 0 && rng.next_uniform() < p.pi) x = 1.0 - x;
        double y = rng.next_uniform() < p.delta ? 1.0 - x : x;
        double py1 = prior * (1.0 - p.delta) + (1.0 - prior) * p.delta;
        double py = (y == 1.0) ? py1 : 1.0 - py1;
        double bits = -std::log(py) * log2e;
        sum += bits;
        sumsq += bits * bits;
        double w1 = prior * emission(y, 1.0, p.delta);
        double w0 = (1.0 - prior) * emission(y, 0.0, p.delta);
        double q = w1 / (w0 + w1);
        prior = q * (1.0 - p.pi) + (1.0 - q) * p.pi;
    }
    double n = static_cast<double>(symbols);
    double mean = sum / n;
    double var = std::max(0.0, sumsq / n - mean * mean);
    return {mean, 1.96 * std::sqrt(var / n)};
}

GaussianFieldModel::GaussianFieldModel(Eigen::MatrixXd covariance, double noise_variance)
    : covariance_(std::move(covariance)), noise_variance_(noise_variance) {
    if (covariance_.rows() != covariance_.cols())
        throw ModelError("GaussianFieldModel: covariance must be square");
    if (!(noise_variance_ > 0.0))
        throw ModelError("GaussianFieldModel: noise variance must be positive");
    if (!covariance_.isApprox(covariance_.transpose(), 1e-10))
        throw ModelError("GaussianFieldModel: covariance must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(covariance_);
    if (es.info() != Eigen::Success) throw ModelError("GaussianFieldModel: eigensolver failed");
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw ModelError("GaussianFieldModel: covariance is not PSD");
    if (es.eigenvalues().minCoeff() < 0.0) {
        Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
        covariance_ = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
    }
}

Eigen::MatrixXd ar_covariance(int width, int height, double sigma_x2, double rho) {
    if (width <= 0 || height <= 0) throw std::invalid_argument("ar_covariance: bad dimensions");
    if (!(sigma_x2 > 0.0)) throw std::invalid_argument("ar_covariance: sigma_x2 must be > 0");
    if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("ar_covariance: |rho| must be < 1");
    const int n = width * height;
    Eigen::MatrixXd cov(n, n);
    for (int a = 0; a < n; ++a) {
        int ra = a / width, ca = a % width;
        for (int b = 0; b < n; ++b) {
            int rb = b / width, cb = b % width;
            cov(a, b) = sigma_x2 * std::pow(rho, std::abs(ra - rb) + std::abs(ca - cb));
        }
    }
    return cov;
}

std::vector<StepConditioning> gaussian_sequential_conditioning(const GaussianFieldModel& model,
                                                               std::span<const Site> order,
                                                               EstimatorMode mode, int width) {
    const auto& sx = model.covariance();
    const double sn2 = model.noise_variance();
    const int n = static_cast<int>(order.size());
    if (n > model.sites())
        throw std::invalid_argument("gaussian_sequential_conditioning: order longer than model");

    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t)
        idx[static_cast<std::size_t>(t)] = order[static_cast<std::size_t>(t)].row * width +
                                           order[static_cast<std::size_t>(t)].col;

    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);  // Cholesky of Sigma_Y over visited sites
    std::vector<StepConditioning> out;
    out.reserve(static_cast<std::size_t>(n));

    Eigen::VectorXd c(n), v(n);
    for (int t = 0; t < n; ++t) {
        const int j = idx[static_cast<std::size_t>(t)];

        // Predictor-mode conditioning uses the t previous observations only.
        StepConditioning step;
        if (mode == EstimatorMode::predictor) {
            for (int u = 0; u < t; ++u) c(u) = sx(idx[static_cast<std::size_t>(u)], j);
            Eigen::VectorXd w = L.topLeftCorner(t, t).triangularView<Eigen::Lower>().solve(c.head(t));
            step.variance = sx(j, j) - w.squaredNorm();
            Eigen::VectorXd a = L.topLeftCorner(t, t).transpose().triangularView<Eigen::Upper>().solve(w);
            step.mean_coefficients.assign(a.data(), a.data() + t);
        }

        // Extend the Cholesky factor with site j's observation row.
        for (int u = 0; u < t; ++u) c(u) = sx(idx[static_cast<std::size_t>(u)], j);
        Eigen::VectorXd w = L.topLeftCorner(t, t).triangularView<Eigen::Lower>().solve(c.head(t));
        double d2 = sx(j, j) + sn2 - w.squaredNorm();
        if (!(d2 > 0.0))
            throw ModelError("gaussian_sequential_conditioning: non-positive innovation variance");
        L.row(t).head(t) = w.transpose();
        L(t, t) = std::sqrt(d2);
        step.innovation_variance = d2;

        if (mode == EstimatorMode::filter) {
            for (int u = 0; u <= t; ++u) c(u) = sx(idx[static_cast<std::size_t>(u)], j);
            Eigen::VectorXd vv =
                L.topLeftCorner(t + 1, t + 1).triangularView<Eigen::Lower>().solve(c.head(t + 1));
            step.variance = sx(j, j) - vv.squaredNorm();
            Eigen::VectorXd a = L.topLeftCorner(t + 1, t + 1)
                                    .transpose()
                                    .triangularView<Eigen::Upper>()
                                    .solve(vv);
            step.mean_coefficients.assign(a.data(), a.data() + t + 1);
        }
        out.push_back(std::move(step));
    }
    return out;
}

double binary_awgn_conditional_mean(double y, double snr) {
    if (!(snr > 0.0)) throw std::invalid_argument("binary_awgn_conditional_mean: snr must be > 0");
    return std::tanh(std::sqrt(snr) * y);
}

double singlet_filter_bsc(double y, double delta, double prior_one) {
    if (!(delta >= 0.0 && delta < 0.5))
        throw std::invalid_argument("singlet_filter_bsc: delta must lie in [0, 0.5)");
    double w1 = prior_one * emission(y, 1.0, delta);
    double w0 = (1.0 - prior_one) * emission(y, 0.0, delta);
    return w1 >= w0 ? 1.0 : 0.0;
}

double singlet_filter_awgn_gaussian(double y, double sigma_x2, double sigma_n2) {
    return y * sigma_x2 / (sigma_x2 + sigma_n2);
}

namespace {

class SayWhatYouSee : public Estimator {
  public:
    double estimate(Site, const ScanHistory&, const double* current_obs) override {
        if (!current_obs)
            throw std::invalid_argument("say-what-you-see is a filter; predictor mode withholds y");
        return *current_obs;
    }
    std::string name() const override { return "sws"; }
};

class WindowHmmEstimator : public Estimator {
  public:
    WindowHmmEstimator(const HmmParams& p, int k) : p_(p), k_(k) {}

    double estimate(Site site, const ScanHistory& history, const double* current_obs) override {
        const std::int64_t i = history.site_index(site);
        const std::int64_t lo = std::max<std::int64_t>(0, i - k_);
        const std::int64_t hi = std::min<std::int64_t>(history.total_sites() - 1, i + k_);
        // Window-local slice; positions outside [lo, hi] are marginalized by
        // the stationary chain prior inside the posterior routine.
        values_.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
        mask_.assign(values_.size(), 0);
        for (std::int64_t j = lo; j <= hi; ++j) {
            if (history.revealed(j)) {
                mask_[static_cast<std::size_t>(j - lo)] = 1;
                values_[static_cast<std::size_t>(j - lo)] = history.value_at(j);
            }
        }
        if (current_obs) {
            mask_[static_cast<std::size_t>(i - lo)] = 1;
            values_[static_cast<std::size_t>(i - lo)] = *current_obs;
        } else {
            mask_[static_cast<std::size_t>(i - lo)] = 0;
        }
        double post = hmm_window_posterior_masked(values_, mask_, i - lo, k_, p_);
        return post >= 0.5 ? 1.0 : 0.0;
    }
    std::string name() const override { return "window:" + std::to_string(k_); }

  private:
    HmmParams p_;
    int k_;
    std::vector<double> values_;
    std::vector<std::uint8_t> mask_;
};

class ForwardHmmEstimator : public Estimator {
  public:
    explicit ForwardHmmEstimator(const HmmParams& p) : p_(p) {}

    double estimate(Site site, const ScanHistory& history, const double* current_obs) override {
        if (!current_obs)
            throw std::invalid_argument("forward HMM filter requires filter mode");
        if (history.site_index(site) != history.steps())
            throw std::invalid_argument("forward HMM filter requires raster scan order");
        double y = *current_obs;
        double w1 = prior_ * ((y == 1.0) ? 1.0 - p_.delta : p_.delta);
        double w0 = (1.0 - prior_) * ((y == 0.0) ? 1.0 - p_.delta : p_.delta);
        double q = w1 / (w0 + w1);
        prior_ = q * (1.0 - p_.pi) + (1.0 - q) * p_.pi;
        return q >= 0.5 ? 1.0 : 0.0;
    }
    std::string name() const override { return "hmm-forward"; }

  private:
    HmmParams p_;
    double prior_ = 0.5;  // P(x_t = 1 | y^{t-1})
};

class HmmPredictor : public Estimator {
  public:
    explicit HmmPredictor(const HmmParams& p) : p_(p) {}

    double estimate(Site site, const ScanHistory& history, const double* current_obs) override {
        if (history.site_index(site) != history.steps())
            throw std::invalid_argument("HMM predictor requires raster scan order");
        if (history.steps() > consumed_) {
            // Fold the observation revealed since the last call into the state.
            for (std::int64_t t = consumed_; t < history.steps(); ++t) {
                double y = history.observations()[static_cast<std::size_t>(t)];
                double w1 = prior_ * ((y == 1.0) ? 1.0 - p_.delta : p_.delta);
                double w0 = (1.0 - prior_) * ((y == 0.0) ? 1.0 - p_.delta : p_.delta);
                double q = w1 / (w0 + w1);
                prior_ = q * (1.0 - p_.pi) + (1.0 - q) * p_.pi;
            }
            consumed_ = history.steps();
        }
        (void)current_obs;
        double py1 = prior_ * (1.0 - p_.delta) + (1.0 - prior_) * p_.delta;
        return py1 >= 0.5 ? 1.0 : 0.0;
    }
    std::string name() const override { return "hmm-predict"; }

  private:
    HmmParams p_;
    double prior_ = 0.5;
    std::int64_t consumed_ = 0;
};

class GaussianOptimalEstimator : public Estimator {
  public:
    GaussianOptimalEstimator(const GaussianFieldModel& model, EstimatorMode mode)
        : model_(model), mode_(mode), L_(model.sites(), model.sites()) {
        L_.setZero();
    }

    double estimate(Site site, const ScanHistory& history, const double* current_obs) override {
        const auto& sx = model_.covariance();
        const double sn2 = model_.noise_variance();
        const int t = static_cast<int>(history.steps());
        const int j = site.row * history.width() + site.col;
        // Track the incremental Cholesky of Sigma_Y over visited sites.
        for (int u = extended_; u < t; ++u) {
            int ju = history.order()[static_cast<std::size_t>(u)].row * history.width() +
                     history.order()[static_cast<std::size_t>(u)].col;
            extend(ju, history, sx, sn2);
        }
        double est;
        if (mode_ == EstimatorMode::predictor) {
            est = conditional_mean(j, t, history, sx, nullptr);
        } else {
            if (!current_obs) throw std::invalid_argument("gaussian filter needs the observation");
            extend(j, history, sx, sn2);
            est = conditional_mean(j, t + 1, history, sx, current_obs);
        }
        return est;
    }
    std::string name() const override { return "gauss-opt"; }

  private:
    void extend(int site_index, const ScanHistory& history, const Eigen::MatrixXd& sx, double sn2) {
        int t = extended_;
        Eigen::VectorXd c(t);
        for (int u = 0; u < t; ++u) c(u) = sx(visited_[static_cast<std::size_t>(u)], site_index);
        Eigen::VectorXd w = L_.topLeftCorner(t, t).triangularView<Eigen::Lower>().solve(c);
        double d2 = sx(site_index, site_index) + sn2 - w.squaredNorm();
        if (!(d2 > 0.0)) throw ModelError("gaussian estimator: non-positive innovation variance");
        L_.row(t).head(t) = w.transpose();
        L_(t, t) = std::sqrt(d2);
        visited_.push_back(site_index);
        (void)history;
        ++extended_;
    }

    double conditional_mean(int target, int cond, const ScanHistory& history,
                            const Eigen::MatrixXd& sx, const double* current_obs) {
        if (cond == 0) return 0.0;  // prior mean
        Eigen::VectorXd c(cond), y(cond);
        for (int u = 0; u < cond; ++u) c(u) = sx(visited_[static_cast<std::size_t>(u)], target);
        for (int u = 0; u < static_cast<int>(history.steps()); ++u)
            y(u) = history.observations()[static_cast<std::size_t>(u)];
        if (current_obs) y(cond - 1) = *current_obs;
        Eigen::VectorXd w = L_.topLeftCorner(cond, cond).triangularView<Eigen::Lower>().solve(c);
        Eigen::VectorXd a =
            L_.topLeftCorner(cond, cond).transpose().triangularView<Eigen::Upper>().solve(w);
        return a.dot(y);
    }

    const GaussianFieldModel& model_;
    EstimatorMode mode_;
    Eigen::MatrixXd L_;
    std::vector<int> visited_;
    int extended_ = 0;
};

class WienerSinglet : public Estimator {
  public:
    WienerSinglet(double sx2, double sn2) : gain_(sx2 / (sx2 + sn2)) {}
    double estimate(Site, const ScanHistory&, const double* current_obs) override {
        if (!current_obs) throw std::invalid_argument("wiener singlet is a filter");
        return gain_ * *current_obs;
    }
    std::string name() const override { return "wiener"; }

  private:
    double gain_;
};

class ConstantPredictor : public Estimator {
  public:
    explicit ConstantPredictor(double v) : v_(v) {}
    double estimate(Site, const ScanHistory&, const double*) override { return v_; }
    std::string name() const override { return "const" + std::to_string(v_); }

  private:
    double v_;
};

class LastObservationPredictor : public Estimator {
  public:
    explicit LastObservationPredictor(double initial) : initial_(initial) {}
    double estimate(Site, const ScanHistory& history, const double*) override {
        if (history.steps() == 0) return initial_;
        return history.observations().back();
    }
    std::string name() const override { return "last-obs"; }

  private:
    double initial_;
};

class MajorityPredictor : public Estimator {
  public:
    double estimate(Site, const ScanHistory& history, const double*) override {
        double ones = 0;
        for (double y : history.observations()) ones += (y == 1.0) ? 1.0 : 0.0;
        return 2.0 * ones >= static_cast<double>(history.steps()) ? 1.0 : 0.0;
    }
    std::string name() const override { return "majority"; }
};

}  // namespace

std::unique_ptr<Estimator> make_say_what_you_see() { return std::make_unique<SayWhatYouSee>(); }
std::unique_ptr<Estimator> make_window_hmm_estimator(const HmmParams& p, int k) {
    return std::make_unique<WindowHmmEstimator>(p, k);
}
std::unique_ptr<Estimator> make_forward_hmm_estimator(const HmmParams& p) {
    return std::make_unique<ForwardHmmEstimator>(p);
}
std::unique_ptr<Estimator> make_hmm_predictor(const HmmParams& p) {
    return std::make_unique<HmmPredictor>(p);
}
std::unique_ptr<Estimator> make_gaussian_optimal_estimator(const GaussianFieldModel& m,
                                                           EstimatorMode mode) {
    return std::make_unique<GaussianOptimalEstimator>(m, mode);
}
std::unique_ptr<Estimator> make_wiener_singlet(double sx2, double sn2) {
    return std::make_unique<WienerSinglet>(sx2, sn2);
}
std::unique_ptr<Estimator> make_constant_predictor(double v) {
    return std::make_unique<ConstantPredictor>(v);
}
std::unique_ptr<Estimator> make_last_observation_predictor(double initial) {
    return std::make_unique<LastObservationPredictor>(initial);
}
std::unique_ptr<Estimator> make_majority_predictor() { return std::make_unique<MajorityPredictor>(); }

ScanTrace run_scan_estimate(const Field& clean, const Field& noisy, Scanner& scanner,
                            Estimator& estimator, EstimatorMode mode, LossKind loss_kind) {
    if (clean.width() != noisy.width() || clean.height() != noisy.height())
        throw std::invalid_argument("run_scan_estimate: clean/noisy shape mismatch");
    ScanHistory history(noisy.width(), noisy.height());
    TraceBuilder builder(noisy.size());
    for (std::int64_t t = 0; t < noisy.size(); ++t) {
        Site site = scanner.next_site(history);
        double obs = noisy(site);
        double est = (mode == EstimatorMode::filter)
                         ? estimator.estimate(site, history, &obs)
                         : estimator.estimate(site, history, nullptr);
        builder.add(site, obs, est, loss(loss_kind, clean(site), est));
        history.push(site, obs);
    }
    return builder.finish();
}

}  // namespace fieldscan
