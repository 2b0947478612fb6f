#include "fieldscan/harness.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "fieldscan/bounds.hpp"
#include "fieldscan/errors.hpp"
#include "fieldscan/rng.hpp"
#include "fieldscan/scanners.hpp"
#include "fieldscan/universal.hpp"

namespace fieldscan {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t next = s.find(sep, pos);
        if (next == std::string::npos) next = s.size();
        parts.push_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
    return parts;
}

}  // namespace

SourceSpec parse_source(const std::string& spec) {
    auto parts = split(spec, ':');
    SourceSpec src;
    const std::string& kind = parts[0];
    auto arg = [&](std::size_t i, double dflt) {
        return parts.size() > i && !parts[i].empty() ? std::stod(parts[i]) : dflt;
    };
    if (kind == "const") {
        src.kind = SourceSpec::Kind::constant;
        src.value = arg(1, 0.0);
    } else if (kind == "iid") {
        src.kind = SourceSpec::Kind::iid_binary;
        src.p_one = arg(1, 0.5);
    } else if (kind == "markov") {
        src.kind = SourceSpec::Kind::markov;
        src.pi = arg(1, 0.1);
    } else if (kind == "gauss-white") {
        src.kind = SourceSpec::Kind::gauss_white;
        src.sigma_x2 = arg(1, 1.0);
    } else if (kind == "gauss-ar") {
        src.kind = SourceSpec::Kind::gauss_ar;
        src.sigma_x2 = arg(1, 1.0);
        src.rho = arg(2, 0.6);
    } else {
        throw ConfigError("unknown source spec: " + spec);
    }
    return src;
}

Field generate_field(const SourceSpec& source, int width, int height, std::uint64_t seed) {
    const std::int64_t n = static_cast<std::int64_t>(width) * height;
    CounterRng rng(seed, RngStream::source);
    switch (source.kind) {
        case SourceSpec::Kind::constant: {
            bool binary = source.value == 0.0 || source.value == 1.0;
            return Field(width, height, binary ? Alphabet::binary : Alphabet::real, source.value);
        }
        case SourceSpec::Kind::iid_binary: {
            Field f(width, height, Alphabet::binary);
            for (std::int64_t i = 0; i < n; ++i)
                f.at_index(i) = rng.uniform(static_cast<std::uint64_t>(i)) < source.p_one ? 1.0 : 0.0;
            return f;
        }
        case SourceSpec::Kind::markov: {
            Field f(width, height, Alphabet::binary);
            double x = rng.uniform(0) < 0.5 ? 1.0 : 0.0;
            f.at_index(0) = x;
            for (std::int64_t i = 1; i < n; ++i) {
                if (rng.uniform(static_cast<std::uint64_t>(i)) < source.pi) x = 1.0 - x;
                f.at_index(i) = x;
            }
            return f;
        }
        case SourceSpec::Kind::gauss_white: {
            Field f(width, height, Alphabet::real);
            double s = std::sqrt(source.sigma_x2);
            for (std::int64_t i = 0; i < n; ++i)
                f.at_index(i) = s * rng.normal(static_cast<std::uint64_t>(i));
            return f;
        }
        case SourceSpec::Kind::gauss_ar: {
            // Separable AR(1): filter an iid normal panel along columns then
            // rows; covariance is exactly sigma_x2 rho^(|dr|+|dc|).
            Field f(width, height, Alphabet::real);
            const double rho = source.rho;
            const double inn = std::sqrt(1.0 - rho * rho);
            for (std::int64_t i = 0; i < n; ++i)
                f.at_index(i) = rng.normal(static_cast<std::uint64_t>(i));
            for (int c = 0; c < width; ++c)
                for (int r = 1; r < height; ++r)
                    f.set({r, c}, rho * f({r - 1, c}) + inn * f({r, c}));
            for (int r = 0; r < height; ++r)
                for (int c = 1; c < width; ++c)
                    f.set({r, c}, rho * f({r, c - 1}) + inn * f({r, c}));
            const double s = std::sqrt(source.sigma_x2);
            for (std::int64_t i = 0; i < n; ++i) f.at_index(i) *= s;
            return f;
        }
    }
    throw ConfigError("generate_field: bad source kind");
}

std::unique_ptr<Estimator> make_estimator(const ExperimentConfig& config) {
    const std::string& spec = config.estimator;
    auto parts = split(spec, ':');
    const std::string& kind = parts[0];

    auto hmm_params = [&]() {
        if (config.source.kind != SourceSpec::Kind::markov ||
            config.channel.kind != Channel::Kind::bsc)
            throw ConfigError("estimator '" + spec + "' needs a markov source and a bsc channel");
        return HmmParams(config.source.pi, config.channel.delta);
    };

    if (kind == "sws") return make_say_what_you_see();
    if (kind == "window") {
        int k = parts.size() > 1 && !parts[1].empty() ? std::stoi(parts[1]) : 1;
        return make_window_hmm_estimator(hmm_params(), k);
    }
    if (kind == "hmm-forward") return make_forward_hmm_estimator(hmm_params());
    if (kind == "hmm-predict") return make_hmm_predictor(hmm_params());
    if (kind == "wiener") {
        if (config.channel.kind != Channel::Kind::awgn)
            throw ConfigError("wiener estimator needs an awgn channel");
        return make_wiener_singlet(config.source.sigma_x2, config.channel.noise_variance);
    }
    if (kind == "gauss-opt") {
        if (config.channel.kind != Channel::Kind::awgn)
            throw ConfigError("gauss-opt estimator needs an awgn channel");
        if (static_cast<std::int64_t>(config.width) * config.height > 4096)
            throw ConfigError("gauss-opt estimator is capped at 4096 sites");
        Eigen::MatrixXd cov;
        if (config.source.kind == SourceSpec::Kind::gauss_ar)
            cov = ar_covariance(config.width, config.height, config.source.sigma_x2,
                                config.source.rho);
        else if (config.source.kind == SourceSpec::Kind::gauss_white)
            cov = config.source.sigma_x2 *
                  Eigen::MatrixXd::Identity(config.width * config.height,
                                            config.width * config.height);
        else
            throw ConfigError("gauss-opt estimator needs a gaussian source");
        auto model =
            std::make_shared<GaussianFieldModel>(std::move(cov), config.channel.noise_variance);
        // keep the model alive inside a wrapper estimator
        struct Holder : Estimator {
            std::shared_ptr<GaussianFieldModel> model;
            std::unique_ptr<Estimator> inner;
            double estimate(Site s, const ScanHistory& h, const double* cur) override {
                return inner->estimate(s, h, cur);
            }
            std::string name() const override { return inner->name(); }
        };
        auto holder = std::make_unique<Holder>();
        holder->model = model;
        holder->inner = make_gaussian_optimal_estimator(*model, config.mode);
        return holder;
    }
    if (kind == "const0") return make_constant_predictor(0.0);
    if (kind == "const1") return make_constant_predictor(1.0);
    if (kind == "last-obs") return make_last_observation_predictor(0.0);
    if (kind == "majority") return make_majority_predictor();
    throw ConfigError("unknown estimator spec: " + spec);
}

void parallel_for(std::int64_t count, int jobs, const std::function<void(std::int64_t)>& body) {
    if (count <= 0) return;
    unsigned hw = std::thread::hardware_concurrency();
    int workers = jobs > 0 ? jobs : static_cast<int>(hw ? hw : 1);
    workers = static_cast<int>(std::min<std::int64_t>(workers, count));
    if (workers <= 1) {
        for (std::int64_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (std::int64_t i = w; i < count; i += workers) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

MonteCarloResult monte_carlo_loss(const ExperimentConfig& config, bool keep_profile) {
    if (config.trials < 1) throw ConfigError("monte_carlo_loss: trials must be >= 1");
    if (config.width < 1 || config.height < 1)
        throw ConfigError("monte_carlo_loss: field dimensions must be positive");

    const std::int64_t sites = static_cast<std::int64_t>(config.width) * config.height;
    std::vector<double> per_trial(static_cast<std::size_t>(config.trials), 0.0);
    std::vector<std::vector<double>> profiles;
    if (keep_profile)
        profiles.assign(static_cast<std::size_t>(config.trials),
                        std::vector<double>(static_cast<std::size_t>(sites), 0.0));

    CounterRng trial_seeds(config.seed, RngStream::trial);
    parallel_for(config.trials, config.jobs, [&](std::int64_t t) {
        std::uint64_t ts = trial_seeds.bits(static_cast<std::uint64_t>(t));
        Field clean = generate_field(config.source, config.width, config.height, ts);
        Field noisy = corrupt(config.channel, clean, ts);
        auto scanner = make_scanner(config.scanner, config.width, config.height);
        auto estimator = make_estimator(config);
        ScanTrace trace =
            run_scan_estimate(clean, noisy, *scanner, *estimator, config.mode, config.loss);
        per_trial[static_cast<std::size_t>(t)] = normalized_loss(trace);
        if (keep_profile) profiles[static_cast<std::size_t>(t)] = trace.step_losses;
    });

    MonteCarloResult result;
    result.per_trial = per_trial;
    double sum = 0.0;
    for (double v : per_trial) sum += v;
    result.mean = sum / config.trials;
    if (config.trials > 1) {
        double ss = 0.0;
        for (double v : per_trial) ss += (v - result.mean) * (v - result.mean);
        double sd = std::sqrt(ss / (config.trials - 1));
        result.half_width = 1.96 * sd / std::sqrt(static_cast<double>(config.trials));
    }
    if (keep_profile) {
        result.step_profile.assign(static_cast<std::size_t>(sites), 0.0);
        for (const auto& p : profiles)
            for (std::int64_t i = 0; i < sites; ++i)
                result.step_profile[static_cast<std::size_t>(i)] += p[static_cast<std::size_t>(i)];
        for (double& v : result.step_profile) v /= config.trials;
    }
    return result;
}

double ote_exact_loss(const HmmParams& params, int k) {
    if (k < 1) throw std::invalid_argument("ote_exact_loss: k must be >= 1");
    double w = hmm_window_expected_loss(params, 1);
    return (k * params.delta + w) / (k + 1);
}

FigureKind figure_kind_from_number(int figure) {
    switch (figure) {
        case 1: return FigureKind::zeta_envelope;
        case 2: return FigureKind::gauss_excess;
        case 3: return FigureKind::binary_awgn_excess;
        case 4: return FigureKind::binary_filter_bounds;
        case 5: return FigureKind::hmm_region;
        case 6: return FigureKind::hmm_diff;
    }
    throw ConfigError("figure number must lie in 1..6");
}

namespace {

// Monte Carlo cell of the Markov/BSC study: trivial raster scan with the
// optimal causal filter vs odds-then-evens with the window estimator.
struct HmmCell {
    double trivial_mean, trivial_hw;
    double ote_mean, ote_hw;
};

HmmCell hmm_study_cell(double pi, double delta, std::int64_t symbols, std::uint64_t seed,
                       int jobs) {
    const int trials = 8;
    const int chain = static_cast<int>(std::max<std::int64_t>(symbols / trials, 64));
    ExperimentConfig cfg;
    cfg.source.kind = SourceSpec::Kind::markov;
    cfg.source.pi = pi;
    cfg.channel = Channel::bsc(delta);
    cfg.width = chain;
    cfg.height = 1;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.jobs = jobs;
    cfg.mode = EstimatorMode::filter;
    cfg.loss = LossKind::hamming;

    cfg.scanner = "raster";
    cfg.estimator = "hmm-forward";
    MonteCarloResult trivial = monte_carlo_loss(cfg);

    cfg.scanner = "ote:1";
    cfg.estimator = "window:1";
    MonteCarloResult ote = monte_carlo_loss(cfg);
    return {trivial.mean, trivial.half_width, ote.mean, ote.half_width};
}

}  // namespace

FigureData figure_data(FigureKind kind, const FigureOptions& opt) {
    FigureData data;
    switch (kind) {
        case FigureKind::zeta_envelope: {
            data.name = "zeta_envelope";
            data.columns = {"d", "zeta_bits", "zeta_envelope_bits"};
            EnvelopeFunction env = make_zeta_binary_envelope(opt.delta);
            for (std::size_t i = 0; i < env.grid.size(); ++i)
                data.rows.push_back({env.grid[i], env.raw[i], env.envelope[i]});
            return data;
        }
        case FigureKind::gauss_excess: {
            data.name = "gauss_excess";
            data.columns = {"snr", "gap_bound_over_varx", "symbol_by_symbol_over_varx"};
            for (int i = 0; i < opt.snr_points; ++i) {
                double snr =
                    std::pow(10.0, -2.0 + 4.0 * static_cast<double>(i) / (opt.snr_points - 1));
                data.rows.push_back(
                    {snr, continuous_filtering_gap(snr) / snr, 1.0 / (1.0 + snr)});
            }
            return data;
        }
        case FigureKind::binary_awgn_excess: {
            data.name = "binary_awgn_excess";
            data.columns = {"snr", "fstar_over_varx", "symbol_by_symbol_over_varx"};
            for (int i = 0; i < opt.snr_points; ++i) {
                double snr =
                    std::pow(10.0, -2.0 + 4.0 * static_cast<double>(i) / (opt.snr_points - 1));
                ImmseResult r = binary_awgn_immse(snr);
                data.rows.push_back(
                    {snr, 2.0 * r.mutual_information / snr - r.mmse, r.mmse});
            }
            return data;
        }
        case FigureKind::binary_filter_bounds: {
            data.name = "binary_filter_bounds";
            data.columns = {"delta", "two_epsilon_delta", "singlet_bound"};
            for (double d = opt.grid_step; d < 0.5 - 1e-12; d += opt.grid_step)
                data.rows.push_back({d, binary_filter_excess_bound(d), d});
            return data;
        }
        case FigureKind::hmm_region: {
            data.name = "hmm_region";
            data.columns = {"pi",     "delta",      "trivial_loss", "ote_loss", "improvement",
                            "two_hw", "improves",   "f_pi",         "d_pi"};
            std::vector<std::pair<double, double>> cells;
            for (double pi = opt.grid_step; pi <= 0.5 + 1e-12; pi += opt.grid_step)
                for (double d = opt.grid_step; d < 0.5 - 1e-12; d += opt.grid_step)
                    cells.emplace_back(std::min(pi, 0.5), d);
            data.rows.assign(cells.size(), {});
            CounterRng seeds(opt.seed, RngStream::trial);
            parallel_for(static_cast<std::int64_t>(cells.size()), opt.jobs, [&](std::int64_t i) {
                auto [pi, d] = cells[static_cast<std::size_t>(i)];
                HmmCell cell = hmm_study_cell(pi, d, opt.symbols,
                                              seeds.bits(static_cast<std::uint64_t>(i)), 1);
                double improvement = cell.trivial_mean - cell.ote_mean;
                double two_hw = 2.0 * std::sqrt(cell.trivial_hw * cell.trivial_hw +
                                                cell.ote_hw * cell.ote_hw);
                // improves: 1 beats trivial, 0 inconclusive, -1 worse
                double marker = improvement > two_hw ? 1.0 : (improvement < -two_hw ? -1.0 : 0.0);
                SingletRegions regions = singlet_regions(pi);
                data.rows[static_cast<std::size_t>(i)] = {
                    pi,     d,      cell.trivial_mean, cell.ote_mean, improvement,
                    two_hw, marker, regions.f_pi,      regions.d_pi};
            });
            return data;
        }
        case FigureKind::hmm_diff: {
            data.name = "hmm_diff";
            data.columns = {"pi", "delta", "improvement_exact"};
            for (double pi = opt.grid_step; pi <= 0.5 + 1e-12; pi += opt.grid_step) {
                double f = singlet_regions(std::min(pi, 0.5)).f_pi;
                for (double d = opt.grid_step; d < std::min(f, 0.5 - opt.grid_step) + 1e-12;
                     d += opt.grid_step) {
                    HmmParams params(std::min(pi, 0.5), d);
                    double ote = ote_exact_loss(params, 1);
                    data.rows.push_back({std::min(pi, 0.5), d, d - ote});
                }
            }
            return data;
        }
    }
    throw ConfigError("figure_data: bad kind");
}

AuditKind parse_audit_kind(const std::string& name) {
    if (name == "thm1") return AuditKind::thm1;
    if (name == "thm2") return AuditKind::thm2;
    if (name == "thm4") return AuditKind::thm4;
    if (name == "lemma_sq") return AuditKind::lemma_sq;
    if (name == "prop_binary") return AuditKind::prop_binary;
    if (name == "regret") return AuditKind::regret;
    throw ConfigError("unknown audit: " + name);
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

AuditReport audit_thm1(std::uint64_t seed, int jobs) {
    AuditReport report{"thm1", true, {}};
    const std::pair<double, double> cells[] = {{0.1, 0.1}, {0.2, 0.1}, {0.1, 0.25}, {0.3, 0.2}};
    for (auto [pi, delta] : cells) {
        double rate_lb = binary_entropy_bits(pi * (1 - delta) + delta * (1 - pi));
        EnvelopeFunction env = make_zeta_binary_envelope(delta);
        for (const char* scan : {"raster", "ote:1"}) {
            ExperimentConfig cfg;
            cfg.source.kind = SourceSpec::Kind::markov;
            cfg.source.pi = pi;
            cfg.channel = Channel::bsc(delta);
            cfg.width = 50000;
            cfg.height = 1;
            cfg.trials = 4;
            cfg.seed = seed;
            cfg.jobs = jobs;
            cfg.scanner = scan;
            cfg.estimator = std::string(scan) == "raster" ? "hmm-forward" : "window:1";
            MonteCarloResult mc = monte_carlo_loss(cfg);
            // Evaluate the envelope at loss + 3 standard errors so Monte
            // Carlo noise cannot fake a violation.
            double lhs = env(std::min(mc.mean + 3.0 * (mc.half_width / 1.96), 0.5));
            double margin = lhs - rate_lb;
            bool ok = margin >= -1e-9;
            report.pass = report.pass && ok;
            report.lines.push_back("pi=" + fmt(pi) + " delta=" + fmt(delta) + " scan=" + scan +
                                   " loss=" + fmt(mc.mean) + " zetabar(loss)=" + fmt(lhs) +
                                   " rate_lb_bits=" + fmt(rate_lb) + " margin=" + fmt(margin) +
                                   (ok ? "  ok" : "  VIOLATED"));
        }
    }
    return report;
}

std::vector<std::vector<Site>> audit_scan_set(int w, int h, std::uint64_t seed, int count) {
    std::vector<std::vector<Site>> scans;
    Field dummy(w, h, Alphabet::real, 0.0);
    for (const char* s : {"raster", "snake", "hilbert", "checker", "ote:1"}) {
        auto sc = make_scanner(s, w, h);
        scans.push_back(scan_order(*sc, dummy));
    }
    for (int i = 0; i < count; ++i) {
        auto sc = make_random_scanner(w, h, seed + static_cast<std::uint64_t>(i));
        scans.push_back(scan_order(*sc, dummy));
    }
    return scans;
}

AuditReport audit_thm2(std::uint64_t seed, int /*jobs*/) {
    AuditReport report{"thm2", true, {}};
    for (int n : {4, 6}) {
        const double sx2 = 1.0, rho = 0.6, sn2 = 0.5;
        GaussianFieldModel model(ar_covariance(n, n, sx2, rho), sn2);
        double bound = gaussian_filter_excess_bound(sx2, sn2);
        double mi = gaussian_mutual_information(model);
        double mi_per_site_term = 2.0 * sn2 * mi / (n * n);

        auto scans = audit_scan_set(n, n, seed, 8);  // 13 scans -> 78 pairs
        std::vector<double> filter_losses, predictor_losses;
        for (const auto& order : scans) {
            auto steps_f =
                gaussian_sequential_conditioning(model, order, EstimatorMode::filter, n);
            auto steps_p =
                gaussian_sequential_conditioning(model, order, EstimatorMode::predictor, n);
            double lf = 0.0, lp = 0.0;
            for (const auto& s : steps_f) lf += s.variance;
            for (const auto& s : steps_p) lp += s.variance;
            filter_losses.push_back(lf / (n * n));
            predictor_losses.push_back(lp / (n * n));
        }
        double max_gap = 0.0;
        for (std::size_t i = 0; i < filter_losses.size(); ++i)
            for (std::size_t j = i + 1; j < filter_losses.size(); ++j)
                max_gap = std::max(max_gap, std::abs(filter_losses[i] - filter_losses[j]));
        double max_filter = *std::max_element(filter_losses.begin(), filter_losses.end());
        double min_pred = *std::min_element(predictor_losses.begin(), predictor_losses.end());

        bool ok_gap = max_gap <= bound + 1e-12;
        bool ok_upper = max_filter <= mi_per_site_term + 1e-12;
        bool ok_lower = min_pred >= mi_per_site_term - 1e-12;
        report.pass = report.pass && ok_gap && ok_upper && ok_lower;
        std::size_t pairs = filter_losses.size() * (filter_losses.size() - 1) / 2;
        report.lines.push_back("n=" + std::to_string(n) + " scans=" +
                               std::to_string(filter_losses.size()) + " pairs=" +
                               std::to_string(pairs) + " max_gap=" + fmt(max_gap) + " bound=" +
                               fmt(bound) + " margin=" + fmt(bound - max_gap) +
                               (ok_gap ? "  ok" : "  VIOLATED"));
        report.lines.push_back("n=" + std::to_string(n) + " max_filter_loss=" + fmt(max_filter) +
                               " 2sn2I/n2=" + fmt(mi_per_site_term) + " margin=" +
                               fmt(mi_per_site_term - max_filter) +
                               (ok_upper ? "  ok" : "  VIOLATED"));
        report.lines.push_back("n=" + std::to_string(n) + " min_predictor_loss=" + fmt(min_pred) +
                               " 2sn2I/n2=" + fmt(mi_per_site_term) + " margin=" +
                               fmt(min_pred - mi_per_site_term) +
                               (ok_lower ? "  ok" : "  VIOLATED"));
    }
    return report;
}

AuditReport audit_thm4(std::uint64_t, int) {
    AuditReport report{"thm4", true, {}};
    const std::pair<double, double> cells[] = {{0.1, 0.1}, {0.25, 0.1}, {0.3, 0.25}};
    for (auto [pi, delta] : cells) {
        if (delta > singlet_regions(pi).f_pi) continue;  // need the singlet-optimal region
        HmmParams params(pi, delta);
        double improvement = delta - ote_exact_loss(params, 1);
        double bound = binary_filter_excess_bound(delta);
        bool ok = improvement <= bound + 1e-12;
        report.pass = report.pass && ok;
        report.lines.push_back("pi=" + fmt(pi) + " delta=" + fmt(delta) + " improvement=" +
                               fmt(improvement) + " 2eps=" + fmt(bound) + " margin=" +
                               fmt(bound - improvement) + (ok ? "  ok" : "  VIOLATED"));
    }
    return report;
}

AuditReport audit_lemma_sq(std::uint64_t seed, int) {
    AuditReport report{"lemma_sq", true, {}};
    const int n = 8;
    const double sx2 = 1.0, rho = 0.55, sn2 = 0.4;
    GaussianFieldModel model(ar_covariance(n, n, sx2, rho), sn2);
    auto scans = audit_scan_set(n, n, seed, 3);
    for (const auto& order : scans) {
        auto steps = gaussian_sequential_conditioning(model, order, EstimatorMode::predictor, n);
        double max_err = 0.0, noisy = 0.0, clean_y = 0.0;
        for (const auto& s : steps) {
            // predicting the clean symbol vs predicting the next observation
            max_err = std::max(max_err, std::abs(s.innovation_variance - s.variance - sn2));
            noisy += s.variance;
            clean_y += s.innovation_variance;
        }
        double total_err = std::abs(clean_y / (n * n) - sn2 - noisy / (n * n));
        bool ok = max_err < 1e-9 && total_err < 1e-9;
        report.pass = report.pass && ok;
        report.lines.push_back("scan_len=" + std::to_string(steps.size()) + " per_step_max_err=" +
                               fmt(max_err) + " total_err=" + fmt(total_err) +
                               (ok ? "  ok" : "  VIOLATED"));
    }
    return report;
}

AuditReport audit_prop_binary(std::uint64_t seed, int) {
    AuditReport report{"prop_binary", true, {}};
    for (double pi : {0.1, 0.25}) {
        for (double delta : {0.1, 0.25}) {
            const std::int64_t n = 200000;
            SequentialRng rng(seed ^ mix64(static_cast<std::uint64_t>(pi * 1e6) * 31 +
                                           static_cast<std::uint64_t>(delta * 1e6)),
                              RngStream::source);
            double x = rng.next_uniform() < 0.5 ? 1.0 : 0.0;
            double prior = 0.5;
            double sum_d = 0.0, sum_d2 = 0.0;
            for (std::int64_t t = 0; t < n; ++t) {
                if (t > 0 && rng.next_uniform() < pi) x = 1.0 - x;
                double y = rng.next_uniform() < delta ? 1.0 - x : x;
                double py1 = prior * (1.0 - delta) + (1.0 - prior) * delta;
                double f = py1 >= 0.5 ? 1.0 : 0.0;  // optimal predictor of Y (and of X)
                double d = (f != x ? 1.0 : 0.0) - ((f != y ? 1.0 : 0.0) - delta) / (1.0 - 2.0 * delta);
                sum_d += d;
                sum_d2 += d * d;
                double w1 = prior * (y == 1.0 ? 1.0 - delta : delta);
                double w0 = (1.0 - prior) * (y == 0.0 ? 1.0 - delta : delta);
                double q = w1 / (w0 + w1);
                prior = q * (1.0 - pi) + (1.0 - q) * pi;
            }
            double mean = sum_d / n;
            double var = std::max(0.0, sum_d2 / n - mean * mean);
            double se = std::sqrt(var / n);
            bool ok = std::abs(mean) <= 3.0 * se + 1e-12;
            report.pass = report.pass && ok;
            report.lines.push_back("pi=" + fmt(pi) + " delta=" + fmt(delta) + " paired_mean=" +
                                   fmt(mean) + " 3se=" + fmt(3.0 * se) +
                                   (ok ? "  ok" : "  VIOLATED"));
        }
    }
    return report;
}

AuditReport audit_regret(std::uint64_t seed, int jobs) {
    AuditReport report{"regret", true, {}};
    const int n = 32, m = 4, trials = 100;
    ExpertSet experts;
    experts.experts = {{"raster", "const0"},
                       {"raster", "const1"},
                       {"raster", "last-obs"},
                       {"snake", "majority"}};
    const double pi = 0.1, delta = 0.2;
    double bound = regret_bound(n, m, experts.experts.size(), experts.l_max);
    std::vector<double> regrets(trials, 0.0);
    CounterRng trial_seeds(seed, RngStream::trial);
    parallel_for(trials, jobs, [&](std::int64_t t) {
        std::uint64_t ts = trial_seeds.bits(static_cast<std::uint64_t>(t));
        SourceSpec src;
        src.kind = SourceSpec::Kind::markov;
        src.pi = pi;
        Field clean = generate_field(src, n, n, ts);
        Field noisy = corrupt(Channel::bsc(delta), clean, ts);
        UniversalResult r = universal_scandict(noisy, experts, m, 0.0, ts, &clean, delta);
        regrets[static_cast<std::size_t>(t)] = r.regret;
    });
    int violations = 0;
    double worst = -1e300;
    for (double r : regrets) {
        if (r > bound) ++violations;
        worst = std::max(worst, r);
    }
    report.pass = violations == 0;
    report.lines.push_back("trials=" + std::to_string(trials) + " bound=" + fmt(bound) +
                           " max_regret=" + fmt(worst) + " violations=" +
                           std::to_string(violations) + (report.pass ? "  ok" : "  VIOLATED"));
    return report;
}

}  // namespace

AuditReport theorem_audit(AuditKind which, std::uint64_t seed, int jobs) {
    switch (which) {
        case AuditKind::thm1: return audit_thm1(seed, jobs);
        case AuditKind::thm2: return audit_thm2(seed, jobs);
        case AuditKind::thm4: return audit_thm4(seed, jobs);
        case AuditKind::lemma_sq: return audit_lemma_sq(seed, jobs);
        case AuditKind::prop_binary: return audit_prop_binary(seed, jobs);
        case AuditKind::regret: return audit_regret(seed, jobs);
    }
    throw ConfigError("theorem_audit: bad kind");
}

}  // namespace fieldscan
