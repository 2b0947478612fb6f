#include <doctest.h>

#include <cmath>

#include "fieldscan/estimators.hpp"
#include "fieldscan/harness.hpp"
#include "fieldscan/oracle.hpp"
#include "fieldscan/rng.hpp"

using namespace fieldscan;

namespace {

// Joint-probability oracle for a stationary symmetric chain through a BSC:
// enumerates all clean sequences.
double chain_posterior_oracle(const std::vector<double>& y, std::size_t i, const HmmParams& p,
                              std::size_t cond_from, std::size_t cond_to) {
    const std::size_t n = y.size();
    double num = 0.0, den = 0.0;
    for (std::size_t x = 0; x < (std::size_t{1} << n); ++x) {
        double prob = 0.5;
        for (std::size_t j = 1; j < n; ++j)
            prob *= (((x >> j) & 1) == ((x >> (j - 1)) & 1)) ? 1.0 - p.pi : p.pi;
        for (std::size_t j = cond_from; j <= cond_to; ++j) {
            double xr = static_cast<double>((x >> j) & 1);
            prob *= (y[j] == xr) ? 1.0 - p.delta : p.delta;
        }
        den += prob;
        if ((x >> i) & 1) num += prob;
    }
    return num / den;
}

}  // namespace

TEST_CASE("singlet filters") {
    CHECK(singlet_filter_bsc(1.0, 0.3, 0.5) == 1.0);  // say-what-you-see
    CHECK(singlet_filter_bsc(0.0, 0.05, 0.5) == 0.0);
    CHECK(singlet_filter_awgn_gaussian(2.0, 1.0, 1.0) == 1.0);
    CHECK(singlet_filter_awgn_gaussian(3.0, 4.0, 1.0) == doctest::Approx(2.4).epsilon(1e-15));

    // skewed prior: decision 0 for both observations at delta=0.25, P(X=1)=0.1
    CHECK(singlet_filter_bsc(0.0, 0.25, 0.1) == 0.0);
    CHECK(singlet_filter_bsc(1.0, 0.25, 0.1) == 0.0);
    // cross-check with the exact scalar Bayes loss: constant-0 decision
    // P(x=1,y): 0.1*[.75 at y=1, .25 at y=0]; P(x=0,y): 0.9*[.25, .75]
    std::vector<std::array<double, 2>> joint = {{0.9 * 0.75, 0.1 * 0.25},
                                                {0.9 * 0.25, 0.1 * 0.75}};
    CHECK(oracle::brute_force_scalar_bayes(joint, LossKind::hamming) ==
          doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("forward filter degenerate cases") {
    HmmParams clean(0.2, 0.0);
    std::vector<double> y = {1, 0, 0, 1, 1};
    auto post = hmm_forward_filter(y, clean);
    for (std::size_t t = 0; t < y.size(); ++t) CHECK(post[t] == y[t]);

    // pi = 1/2 makes the source memoryless: posterior depends on y_t only
    HmmParams memoryless(0.5, 0.2);
    auto post2 = hmm_forward_filter(y, memoryless);
    for (std::size_t t = 0; t < y.size(); ++t) {
        double expect = y[t] == 1.0 ? 0.8 : 0.2;
        CHECK(post2[t] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("forward filter matches exhaustive enumeration") {
    HmmParams p(0.1, 0.1);
    std::vector<double> y = {1, 1, 0};
    auto post = hmm_forward_filter(y, p);
    for (std::size_t t = 0; t < y.size(); ++t) {
        double want = chain_posterior_oracle(y, t, p, 0, t);
        CHECK(post[t] == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("window posterior") {
    HmmParams p(0.1, 0.2);
    std::vector<double> y = {0, 1, 0};
    // k=0 reduces to the scalar posterior given y_i
    double p0 = hmm_window_posterior(y, 1, 0, p);
    CHECK(p0 == doctest::Approx(0.8).epsilon(1e-12));
    // noiseless: point mass
    HmmParams clean(0.1, 0.0);
    CHECK(hmm_window_posterior(y, 1, 1, clean) == doctest::Approx(1.0).epsilon(1e-12));
    // k=1 against the enumeration oracle with stationary boundaries
    double got = hmm_window_posterior(y, 1, 1, p);
    double want = chain_posterior_oracle(y, 1, p, 0, 2);
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
    // truncated window at the left edge
    double edge = hmm_window_posterior(y, 0, 1, p);
    double edge_want = chain_posterior_oracle(y, 0, p, 0, 1);
    CHECK(edge == doctest::Approx(edge_want).epsilon(1e-12));
}

TEST_CASE("window expected loss is monotone in the radius") {
    HmmParams p(0.1, 0.1);
    CHECK(hmm_window_expected_loss(p, 0) == doctest::Approx(0.1).epsilon(1e-12));
    double prev = 1.0;
    for (int k = 0; k <= 3; ++k) {
        double w = hmm_window_expected_loss(p, k);
        CHECK(w <= prev + 1e-12);
        prev = w;
    }
    // frozen enumeration values
    CHECK(hmm_window_expected_loss(p, 1) == doctest::Approx(0.06192).epsilon(1e-10));
    CHECK(hmm_window_expected_loss(p, 2) == doctest::Approx(0.0570016).epsilon(1e-8));
}

TEST_CASE("gaussian sequential conditioning, independent sites") {
    const int n = 3;
    GaussianFieldModel model(2.0 * Eigen::MatrixXd::Identity(n * n, n * n), 0.5);
    Field dummy(n, n, Alphabet::real, 0.0);
    auto sc = make_raster_scanner(n, n);
    auto order = scan_order(*sc, dummy);
    auto steps = gaussian_sequential_conditioning(model, order, EstimatorMode::filter, n);
    for (const auto& s : steps)
        CHECK(s.variance == doctest::Approx(2.0 * 0.5 / 2.5).epsilon(1e-12));
}

TEST_CASE("gaussian filter variance vanishes with the noise") {
    const int n = 3;
    GaussianFieldModel model(ar_covariance(n, n, 1.0, 0.5), 1e-10);
    Field dummy(n, n, Alphabet::real, 0.0);
    auto sc = make_raster_scanner(n, n);
    auto order = scan_order(*sc, dummy);
    auto steps = gaussian_sequential_conditioning(model, order, EstimatorMode::filter, n);
    for (const auto& s : steps) CHECK(s.variance < 1e-9);
}

TEST_CASE("incremental conditioning matches the dense oracle") {
    const int n = 3;
    Eigen::MatrixXd cov = ar_covariance(n, n, 1.7, 0.6);
    GaussianFieldModel model(cov, 0.8);
    Field dummy(n, n, Alphabet::real, 0.0);
    for (const char* spec : {"raster", "hilbert", "random:5"}) {
        auto sc = make_scanner(spec, n, n);
        auto order = scan_order(*sc, dummy);
        for (EstimatorMode mode : {EstimatorMode::filter, EstimatorMode::predictor}) {
            auto steps = gaussian_sequential_conditioning(model, order, mode, n);
            auto dense = oracle::dense_gaussian_conditioning(cov, 0.8, order, mode, n);
            for (std::size_t t = 0; t < steps.size(); ++t)
                CHECK(steps[t].variance ==
                      doctest::Approx(dense[t]).epsilon(1e-8));
        }
    }
}

TEST_CASE("conditioning is monotone in the observation set") {
    Eigen::MatrixXd cov = ar_covariance(4, 4, 1.0, 0.55);
    // joint covariance of (X stacked, Y stacked)
    const int n = 16;
    Eigen::MatrixXd joint(2 * n, 2 * n);
    joint.topLeftCorner(n, n) = cov;
    joint.topRightCorner(n, n) = cov;
    joint.bottomLeftCorner(n, n) = cov;
    joint.bottomRightCorner(n, n) = cov + 0.5 * Eigen::MatrixXd::Identity(n, n);
    SequentialRng rng(2, RngStream::misc);
    for (int rep = 0; rep < 10; ++rep) {
        int target = static_cast<int>(rng.next_below(n));
        std::vector<int> small, big;
        for (int i = 0; i < n; ++i) {
            if (rng.next_uniform() < 0.4) small.push_back(n + i);
            if (rng.next_uniform() < 0.4) big.push_back(n + i);
        }
        // make big a superset
        big.insert(big.end(), small.begin(), small.end());
        std::sort(big.begin(), big.end());
        big.erase(std::unique(big.begin(), big.end()), big.end());
        double vs = oracle::gaussian_conditional_variance(joint, target, small);
        double vb = oracle::gaussian_conditional_variance(joint, target, big);
        CHECK(vb <= vs + 1e-10);
    }
}

TEST_CASE("predictor innovation decomposition") {
    const int n = 4;
    GaussianFieldModel model(ar_covariance(n, n, 1.0, 0.5), 0.3);
    Field dummy(n, n, Alphabet::real, 0.0);
    auto sc = make_snake_scanner(n, n);
    auto order = scan_order(*sc, dummy);
    auto steps = gaussian_sequential_conditioning(model, order, EstimatorMode::predictor, n);
    for (const auto& s : steps)
        CHECK(s.innovation_variance == doctest::Approx(s.variance + 0.3).epsilon(1e-11));
}

TEST_CASE("binary awgn conditional mean") {
    CHECK(binary_awgn_conditional_mean(0.0, 2.0) == 0.0);
    CHECK(binary_awgn_conditional_mean(50.0, 4.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(binary_awgn_conditional_mean(1.0, 1.0) ==
          doctest::Approx(0.7615941559557649).epsilon(1e-14));
}

TEST_CASE("run_scan_estimate basics") {
    // noiseless say-what-you-see, any scan: zero loss
    SourceSpec src;
    src.kind = SourceSpec::Kind::iid_binary;
    Field clean = generate_field(src, 8, 8, 3);
    auto sc = make_hilbert_scanner(8, 8);
    auto sws = make_say_what_you_see();
    ScanTrace t =
        run_scan_estimate(clean, clean, *sc, *sws, EstimatorMode::filter, LossKind::hamming);
    CHECK(cumulative_loss(t) == 0.0);

    // say-what-you-see loss equals the flip rate
    Field noisy = corrupt(Channel::bsc(0.25), clean, 11);
    auto sc2 = make_raster_scanner(8, 8);
    auto sws2 = make_say_what_you_see();
    ScanTrace t2 =
        run_scan_estimate(clean, noisy, *sc2, *sws2, EstimatorMode::filter, LossKind::hamming);
    double flips = 0;
    for (std::int64_t i = 0; i < clean.size(); ++i)
        flips += clean.at_index(i) != noisy.at_index(i) ? 1.0 : 0.0;
    CHECK(cumulative_loss(t2) == flips);

    // predictor mode structurally withholds the current observation
    auto sws3 = make_say_what_you_see();
    auto sc3 = make_raster_scanner(8, 8);
    CHECK_THROWS_AS(
        run_scan_estimate(clean, noisy, *sc3, *sws3, EstimatorMode::predictor, LossKind::hamming),
        std::invalid_argument);
}

TEST_CASE("say-what-you-see at delta 0.25 over 64x64") {
    ExperimentConfig cfg;
    cfg.source.kind = SourceSpec::Kind::iid_binary;
    cfg.channel = Channel::bsc(0.25);
    cfg.scanner = "raster";
    cfg.estimator = "sws";
    cfg.width = 64;
    cfg.height = 64;
    cfg.trials = 10;
    cfg.seed = 13;
    cfg.jobs = 1;
    MonteCarloResult mc = monte_carlo_loss(cfg);
    CHECK(std::abs(mc.mean - 0.25) < 0.02);
}

TEST_CASE("optimal filter beats say-what-you-see outside the singlet region") {
    // inside: (pi, delta) = (0.1, 0.1): optimal filtering loss equals delta
    ExperimentConfig cfg;
    cfg.source.kind = SourceSpec::Kind::markov;
    cfg.source.pi = 0.1;
    cfg.channel = Channel::bsc(0.1);
    cfg.scanner = "raster";
    cfg.estimator = "hmm-forward";
    cfg.width = 40000;
    cfg.height = 1;
    cfg.trials = 4;
    cfg.seed = 21;
    MonteCarloResult inside = monte_carlo_loss(cfg);
    CHECK(std::abs(inside.mean - 0.1) < 0.006);

    // outside: (0.1, 0.3): strictly better than delta
    cfg.source.pi = 0.1;
    cfg.channel = Channel::bsc(0.3);
    MonteCarloResult outside = monte_carlo_loss(cfg);
    CHECK(outside.mean < 0.3 - 0.02);
}

TEST_CASE("odds-then-evens improves on the trivial scan at pi=delta=0.1") {
    ExperimentConfig cfg;
    cfg.source.kind = SourceSpec::Kind::markov;
    cfg.source.pi = 0.1;
    cfg.channel = Channel::bsc(0.1);
    cfg.width = 50000;
    cfg.height = 1;
    cfg.trials = 4;
    cfg.seed = 31;

    cfg.scanner = "raster";
    cfg.estimator = "hmm-forward";
    MonteCarloResult trivial = monte_carlo_loss(cfg);

    cfg.scanner = "ote:1";
    cfg.estimator = "window:1";
    MonteCarloResult ote = monte_carlo_loss(cfg);

    CHECK(std::abs(trivial.mean - 0.1) < 0.005);
    CHECK(std::abs(ote.mean - 0.08096) < 0.005);
    CHECK(trivial.mean - ote.mean > 0.01);
}

TEST_CASE("gaussian optimal estimator tracks the exact conditioning") {
    const int n = 4;
    Eigen::MatrixXd cov = ar_covariance(n, n, 1.0, 0.6);
    GaussianFieldModel model(cov, 0.5);

    SourceSpec src;
    src.kind = SourceSpec::Kind::gauss_ar;
    src.sigma_x2 = 1.0;
    src.rho = 0.6;
    Field clean = generate_field(src, n, n, 5);
    Field noisy = corrupt(Channel::awgn(0.5), clean, 6);

    auto sc = make_raster_scanner(n, n);
    auto est = make_gaussian_optimal_estimator(model, EstimatorMode::filter);
    ScanTrace t =
        run_scan_estimate(clean, noisy, *sc, *est, EstimatorMode::filter, LossKind::squared);

    // reference: conditional means via explicit dense solves
    auto sc2 = make_raster_scanner(n, n);
    auto order = scan_order(*sc2, noisy);
    for (int step = 0; step < n * n; ++step) {
        int cond = step + 1;
        Eigen::MatrixXd syy(cond, cond);
        Eigen::VectorXd sxy(cond), yv(cond);
        for (int a = 0; a < cond; ++a) {
            int ia = order[static_cast<std::size_t>(a)].row * n + order[static_cast<std::size_t>(a)].col;
            int it = order[static_cast<std::size_t>(step)].row * n + order[static_cast<std::size_t>(step)].col;
            sxy(a) = cov(ia, it);
            yv(a) = noisy(order[static_cast<std::size_t>(a)]);
            for (int b = 0; b < cond; ++b) {
                int ib = order[static_cast<std::size_t>(b)].row * n + order[static_cast<std::size_t>(b)].col;
                syy(a, b) = cov(ia, ib) + (a == b ? 0.5 : 0.0);
            }
        }
        double want = sxy.dot(syy.ldlt().solve(yv));
        CHECK(t.estimates[static_cast<std::size_t>(step)] == doctest::Approx(want).epsilon(1e-8));
    }
}

TEST_CASE("ar covariance matches the sampler") {
    // empirical second moments of the exact sampler against the matrix
    SourceSpec src;
    src.kind = SourceSpec::Kind::gauss_ar;
    src.sigma_x2 = 2.0;
    src.rho = 0.5;
    double sum_var = 0.0, sum_adj = 0.0;
    const int trials = 400, n = 16;
    for (int t = 0; t < trials; ++t) {
        Field f = generate_field(src, n, n, static_cast<std::uint64_t>(t));
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                sum_var += f({r, c}) * f({r, c});
                if (c + 1 < n) sum_adj += f({r, c}) * f({r, c + 1});
            }
    }
    double var = sum_var / (trials * n * n);
    double adj = sum_adj / (trials * n * (n - 1));
    CHECK(var == doctest::Approx(2.0).epsilon(0.05));
    CHECK(adj / var == doctest::Approx(0.5).epsilon(0.06));
}
