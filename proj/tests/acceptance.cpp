// Acceptance suite: runs every release criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code = number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <vector>

#include "fieldscan/bounds.hpp"
#include "fieldscan/channels.hpp"
#include "fieldscan/estimators.hpp"
#include "fieldscan/harness.hpp"
#include "fieldscan/oracle.hpp"
#include "fieldscan/rng.hpp"
#include "fieldscan/scanners.hpp"
#include "fieldscan/universal.hpp"

using namespace fieldscan;

namespace {

struct Criterion {
    std::string label;
    bool pass = true;
    std::ostringstream detail;
    double seconds = 0.0;

    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        detail << (ok ? "  [ok] " : "  [FAILED] ") << what << "\n";
    }
};

double timed(Criterion& c, const std::function<void()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    body();
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return c.seconds;
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

Criterion criterion1() {
    Criterion c{"1: minimax fit solver values and limits"};
    timed(c, [&] {
        MinimaxFit e01 = epsilon_delta(0.1);
        MinimaxFit e025 = epsilon_delta(0.25);
        MinimaxFit e001 = epsilon_delta(0.01);
        MinimaxFit e049 = epsilon_delta(0.49);
        c.check(e01.epsilon < 0.035, "eps(0.10) = " + num(e01.epsilon) + " < 0.035");
        c.check(e025.epsilon < 0.03, "eps(0.25) = " + num(e025.epsilon) + " < 0.03");
        c.check(e001.epsilon < 0.005, "eps(0.01) = " + num(e001.epsilon) + " < 0.005");
        c.check(e049.epsilon < 0.005, "eps(0.49) = " + num(e049.epsilon) + " < 0.005");
    });
    c.check(c.seconds < 10.0, "runtime " + num(c.seconds) + " s < 10 s");
    return c;
}

Criterion criterion2() {
    Criterion c{"2: gaussian excess-bound peak over snr"};
    timed(c, [&] {
        double peak = 0.0;
        for (int i = 0; i <= 20000; ++i) {
            double snr = std::pow(10.0, -2.0 + 4.0 * i / 20000.0);
            peak = std::max(peak, continuous_filtering_gap(snr) / snr);
        }
        c.check(std::abs(peak - 0.216) <= 0.005,
                "max f(snr)/snr = " + num(peak) + " within 0.216 +- 0.005");
    });
    c.check(c.seconds < 1.0, "runtime " + num(c.seconds) + " s < 1 s");
    return c;
}

Criterion criterion3() {
    Criterion c{"3: odds-then-evens study at pi=delta=0.1 (1e6 symbols/arm)"};
    timed(c, [&] {
        ExperimentConfig cfg;
        cfg.source = parse_source("markov:0.1");
        cfg.channel = Channel::bsc(0.1);
        cfg.width = 100000;
        cfg.height = 1;
        cfg.trials = 10;
        cfg.seed = 101;
        cfg.scanner = "raster";
        cfg.estimator = "hmm-forward";
        MonteCarloResult trivial = monte_carlo_loss(cfg);

        cfg.scanner = "ote:1";
        cfg.estimator = "window:1";
        MonteCarloResult ote = monte_carlo_loss(cfg);

        double improvement = trivial.mean - ote.mean;
        c.check(std::abs(trivial.mean - 0.100) <= 0.003,
                "trivial-scan optimal filter loss = " + num(trivial.mean) + " within 0.100 +- 0.003");
        c.check(std::abs(ote.mean - 0.079) <= 0.003,
                "odds-then-evens loss = " + num(ote.mean) + " within 0.079 +- 0.003");
        c.check(std::abs(improvement - 0.021) <= 0.005,
                "improvement = " + num(improvement) + " within 0.021 +- 0.005");

        EnvelopeFunction env = make_zeta_binary_envelope(0.1);
        double lb = filtering_lower_bound(binary_entropy_bits(0.1 * 0.9 + 0.9 * 0.1), env);
        c.check(std::abs(lb - 0.04) <= 0.005,
                "entropy lower bound = " + num(lb) + " within 0.04 +- 0.005");

        double two_eps = binary_filter_excess_bound(0.1);
        c.check(improvement <= two_eps && two_eps < 0.07,
                "improvement " + num(improvement) + " <= 2 eps(0.1) = " + num(two_eps) + " < 0.07");
    });
    c.check(c.seconds < 120.0, "runtime " + num(c.seconds) + " s < 2 min");
    return c;
}

Criterion criterion4() {
    Criterion c{"4: two-scan gap and information sandwich on AR fields"};
    timed(c, [&] {
        AuditReport report = theorem_audit(AuditKind::thm2, 1, 0);
        for (const auto& line : report.lines) c.detail << "      " << line << "\n";
        c.check(report.pass, "exact losses over >= 50 scan pairs on 4x4 and 6x6 fields");
    });
    c.check(c.seconds < 30.0, "runtime " + num(c.seconds) + " s < 30 s");
    return c;
}

Criterion criterion5() {
    Criterion c{"5: prediction-loss identity on the 8x8 gaussian field"};
    timed(c, [&] {
        AuditReport report = theorem_audit(AuditKind::lemma_sq, 1, 0);
        for (const auto& line : report.lines) c.detail << "      " << line << "\n";
        c.check(report.pass, "noisy prediction loss = clean loss of Y minus noise (abs < 1e-9)");
    });
    return c;
}

Criterion criterion6() {
    Criterion c{"6: binary prediction error-rate relation"};
    timed(c, [&] {
        AuditReport report = theorem_audit(AuditKind::prop_binary, 1, 0);
        for (const auto& line : report.lines) c.detail << "      " << line << "\n";
        c.check(report.pass, "P(F != X) = (P(F != Y) - delta)/(1 - 2 delta) within 3 sigma");
    });
    return c;
}

Criterion criterion7() {
    Criterion c{"7: loss-estimate martingale over 1e4 channel draws"};
    timed(c, [&] {
        SourceSpec src = parse_source("markov:0.1");
        Field clean = generate_field(src, 16, 16, 9);
        const double delta = 0.25;
        const int draws = 10000, sites = 256;
        std::vector<double> d1(draws), dmid(draws), dfull(draws), lag(draws, 0.0);
        parallel_for(draws, 0, [&](std::int64_t d) {
            Field noisy = corrupt(Channel::bsc(delta), clean, 40000 + static_cast<std::uint64_t>(d));
            auto scanner = make_raster_scanner(16, 16);
            auto predictor = make_block_predictor("last-obs");
            ScanHistory history(16, 16);
            double cum = 0.0, prev = 0.0, prev_inc = 0.0;
            for (int t = 0; t < sites; ++t) {
                Site s = scanner->next_site(history);
                double obs = noisy(s);
                double pred = predictor->estimate(s, history, nullptr);
                double h = unbiased_estimate_bsc(obs, delta);
                double est = (1.0 - h) * pred + h * (1.0 - pred);  // hamming l0/l1
                cum += loss(LossKind::hamming, clean(s), pred) - est;
                double inc = cum - prev;
                if (t >= 1) lag[static_cast<std::size_t>(d)] += prev_inc * inc;
                prev_inc = inc;
                prev = cum;
                if (t == 0) d1[static_cast<std::size_t>(d)] = cum;
                if (t == sites / 2 - 1) dmid[static_cast<std::size_t>(d)] = cum;
                history.push(s, obs);
            }
            dfull[static_cast<std::size_t>(d)] = cum;
        });
        auto mean_se = [&](const std::vector<double>& v) {
            double m = 0.0;
            for (double x : v) m += x;
            m /= static_cast<double>(v.size());
            double s2 = 0.0;
            for (double x : v) s2 += (x - m) * (x - m);
            return std::pair<double, double>{
                m, std::sqrt(s2 / (v.size() - 1) / static_cast<double>(v.size()))};
        };
        const char* names[] = {"t=1", "t=|B|/2", "t=|B|"};
        int idx = 0;
        for (const auto* v : {&d1, &dmid, &dfull}) {
            auto [m, se] = mean_se(*v);
            c.check(std::abs(m) <= 4.0 * se + 1e-12,
                    std::string("mean Delta at ") + names[idx++] + " = " + num(m) + " within 4se=" +
                        num(4.0 * se));
        }
        auto [lm, lse] = mean_se(lag);
        c.check(std::abs(lm) <= 4.0 * lse + 1e-12,
                "lag-1 increment covariance = " + num(lm) + " within 4se=" + num(4.0 * lse));
    });
    return c;
}

Criterion criterion8() {
    Criterion c{"8: exponential-weighting regret bound, 100 seeded trials"};
    timed(c, [&] {
        AuditReport report = theorem_audit(AuditKind::regret, 1, 0);
        for (const auto& line : report.lines) c.detail << "      " << line << "\n";
        c.check(report.pass, "zero violations of m(n+m)sqrt(ln lambda) l_max/sqrt(2)");
    });
    return c;
}

Criterion criterion9() {
    Criterion c{"9: oracle equivalences"};
    timed(c, [&] {
        // (a) forward filter vs exhaustive joint enumeration, chains 3..8
        double worst = 0.0;
        for (int n = 3; n <= 8; ++n) {
            HmmParams p(0.1, 0.2);
            for (std::size_t y = 0; y < (std::size_t{1} << n); ++y) {
                std::vector<double> ys(static_cast<std::size_t>(n));
                for (int j = 0; j < n; ++j) ys[static_cast<std::size_t>(j)] = (y >> j) & 1;
                auto post = hmm_forward_filter(ys, p);
                for (int t = 0; t < n; ++t) {
                    double num_mass = 0.0, den = 0.0;
                    for (std::size_t x = 0; x < (std::size_t{1} << n); ++x) {
                        double prob = 0.5;
                        for (int j = 1; j < n; ++j)
                            prob *= (((x >> j) & 1) == ((x >> (j - 1)) & 1)) ? 1.0 - p.pi : p.pi;
                        for (int j = 0; j <= t; ++j) {
                            double xr = static_cast<double>((x >> j) & 1);
                            prob *= (ys[static_cast<std::size_t>(j)] == xr) ? 1.0 - p.delta
                                                                            : p.delta;
                        }
                        den += prob;
                        if ((x >> t) & 1) num_mass += prob;
                    }
                    worst = std::max(worst,
                                     std::abs(post[static_cast<std::size_t>(t)] - num_mass / den));
                }
            }
        }
        c.check(worst <= 1e-12, "forward filter vs enumeration, max abs err = " + num(worst));

        // (b) incremental vs dense gaussian conditioning
        double worst_rel = 0.0;
        Eigen::MatrixXd cov = ar_covariance(4, 4, 1.3, 0.6);
        GaussianFieldModel model(cov, 0.7);
        Field dummy(4, 4, Alphabet::real, 0.0);
        for (const char* spec : {"raster", "hilbert", "random:7"}) {
            auto sc = make_scanner(spec, 4, 4);
            auto order = scan_order(*sc, dummy);
            for (EstimatorMode mode : {EstimatorMode::filter, EstimatorMode::predictor}) {
                auto inc = gaussian_sequential_conditioning(model, order, mode, 4);
                auto dense = oracle::dense_gaussian_conditioning(cov, 0.7, order, mode, 4);
                for (std::size_t t = 0; t < inc.size(); ++t)
                    worst_rel = std::max(worst_rel, std::abs(inc[t].variance - dense[t]) /
                                                        std::max(1e-300, std::abs(dense[t])));
            }
        }
        c.check(worst_rel <= 1e-8,
                "incremental vs dense conditioning, max rel err = " + num(worst_rel));

        // (c) bsc bayes envelope vs the scalar oracle on a 50-point grid
        double worst_env = 0.0;
        for (double delta : {0.1, 0.25, 0.4}) {
            for (int i = 0; i < 50; ++i) {
                double p = delta + (1.0 - 2.0 * delta) * i / 49.0;
                double px = (p - delta) / (1.0 - 2.0 * delta);
                std::vector<std::array<double, 2>> joint = {
                    {(1 - px) * (1 - delta), px * delta},
                    {(1 - px) * delta, px * (1 - delta)},
                };
                double want = oracle::brute_force_scalar_bayes(joint, LossKind::hamming);
                worst_env = std::max(worst_env, std::abs(bayes_envelope_bsc(p, delta) - want));
            }
        }
        c.check(worst_env <= 1e-14, "bayes envelope vs scalar oracle, max abs err = " + num(worst_env));
    });
    return c;
}

Criterion criterion10() {
    Criterion c{"10: information-estimation derivative identity"};
    timed(c, [&] {
        for (double snr : {0.5, 1.0, 2.0}) {
            double h = 1e-3 * snr;
            double dI = (binary_awgn_immse(snr + h).mutual_information -
                         binary_awgn_immse(snr - h).mutual_information) /
                        (2 * h);
            double half = 0.5 * binary_awgn_immse(snr).mmse;
            double rel = std::abs(dI - half) / half;
            c.check(rel <= 1e-4, "snr=" + num(snr) + ": dI/dsnr=" + num(dI) + " vs mmse/2=" +
                                     num(half) + " rel err=" + num(rel));
        }
    });
    return c;
}

Criterion criterion11() {
    Criterion c{"11: envelope dominance, concavity and the jump at d=delta"};
    timed(c, [&] {
        EnvelopeFunction env = make_zeta_binary_envelope(0.25);
        bool dominated = true, concave = true;
        double prev_diff = 1e300;
        for (std::size_t i = 0; i < env.grid.size(); ++i) {
            dominated = dominated && env.envelope[i] >= env.raw[i] - 1e-12;
            if (i >= 1) {
                double diff = env.envelope[i] - env.envelope[i - 1];
                if (i >= 2 && diff - prev_diff > 1e-9) concave = false;
                prev_diff = diff;
            }
        }
        c.check(dominated, "envelope dominates zeta on the full grid");
        c.check(concave, "second differences <= 1e-9");
        double jump = 1.0 - zeta_binary(0.25 * (1.0 - 1e-9), 0.25);
        c.check(jump > 0.04, "zeta jump at d=delta = " + num(jump));
        double env_step = std::abs(env(0.25) - env(0.25 - 1e-6));
        c.check(env_step < 1e-4, "envelope change across d=delta = " + num(env_step));
    });
    return c;
}

}  // namespace

int main() {
    std::vector<Criterion> results;
    results.push_back(criterion1());
    results.push_back(criterion2());
    results.push_back(criterion3());
    results.push_back(criterion4());
    results.push_back(criterion5());
    results.push_back(criterion6());
    results.push_back(criterion7());
    results.push_back(criterion8());
    results.push_back(criterion9());
    results.push_back(criterion10());
    results.push_back(criterion11());

    int failures = 0;
    for (const auto& c : results) {
        std::cout << (c.pass ? "PASS" : "FAIL") << "  criterion " << c.label << "  ("
                  << num(c.seconds) << " s)\n"
                  << c.detail.str();
        if (!c.pass) ++failures;
    }
    std::cout << (failures == 0 ? "all criteria passed" :
                                  std::to_string(failures) + " criterion(s) failed")
              << "\n";
    return failures;
}
