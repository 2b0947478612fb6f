#include <doctest.h>

#include <cmath>

#include "fieldscan/channels.hpp"
#include "fieldscan/rng.hpp"

using namespace fieldscan;

TEST_CASE("noiseless channels are identities") {
    Field zeros(8, 8, Alphabet::binary, 0.0);
    Field out = corrupt(Channel::bsc(0.0), zeros, 42);
    CHECK(out.values() == zeros.values());

    Field reals(8, 8, Alphabet::real, 1.5);
    Field out2 = corrupt(Channel::awgn(0.0), reals, 42);
    CHECK(out2.values() == reals.values());
}

TEST_CASE("bsc flip fraction obeys the law of large numbers") {
    Field zeros(64, 64, Alphabet::binary, 0.0);
    Field noisy = corrupt(Channel::bsc(0.25), zeros, 7);
    double flips = 0;
    for (std::int64_t i = 0; i < noisy.size(); ++i) flips += noisy.at_index(i);
    CHECK(flips / static_cast<double>(noisy.size()) == doctest::Approx(0.25).epsilon(0.08));
    CHECK(std::abs(flips / 4096.0 - 0.25) < 0.02);
}

TEST_CASE("bsc requires binary input") {
    Field reals(2, 2, Alphabet::real, 0.5);
    CHECK_THROWS_AS(corrupt(Channel::bsc(0.1), reals, 1), std::invalid_argument);
}

TEST_CASE("corrupt is deterministic in the seed") {
    Field zeros(16, 16, Alphabet::binary, 0.0);
    Field a = corrupt(Channel::bsc(0.3), zeros, 5);
    Field b = corrupt(Channel::bsc(0.3), zeros, 5);
    CHECK(a.values() == b.values());
    Field c = corrupt(Channel::bsc(0.3), zeros, 6);
    CHECK(a.values() != c.values());

    Field base(16, 16, Alphabet::real, 0.0);
    Field g1 = corrupt(Channel::awgn(1.0), base, 9);
    Field g2 = corrupt(Channel::awgn(1.0), base, 9);
    CHECK(g1.values() == g2.values());
}

TEST_CASE("unbiased estimate values and unbiasedness") {
    CHECK(unbiased_estimate_bsc(1.0, 0.25) == 1.5);
    CHECK(unbiased_estimate_bsc(0.0, 0.25) == -0.5);
    CHECK_THROWS_AS(unbiased_estimate_bsc(1.0, 0.5), std::invalid_argument);

    // Monte Carlo mean of h(Y) given X=1 at delta=0.1
    CounterRng rng(99, RngStream::misc);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        double y = rng.uniform(static_cast<std::uint64_t>(i)) < 0.1 ? 0.0 : 1.0;
        sum += unbiased_estimate_bsc(y, 0.1);
    }
    CHECK(std::abs(sum / n - 1.0) < 0.01);
}

TEST_CASE("unbiasedness across delta grid within 3 sigma") {
    const int n = 200000;
    for (double delta : {0.05, 0.1, 0.25, 0.4}) {
        for (double x : {0.0, 1.0}) {
            CounterRng rng(static_cast<std::uint64_t>(delta * 1000 + x), RngStream::misc);
            double sum = 0.0, sumsq = 0.0;
            for (int i = 0; i < n; ++i) {
                double y = rng.uniform(static_cast<std::uint64_t>(i)) < delta ? 1.0 - x : x;
                double h = unbiased_estimate_bsc(y, delta);
                sum += h;
                sumsq += h * h;
            }
            double mean = sum / n;
            double sd = std::sqrt(std::max(0.0, sumsq / n - mean * mean) / n);
            CHECK(std::abs(mean - x) <= 3.0 * sd + 1e-9);
        }
    }
}

TEST_CASE("modified loss values") {
    CHECK(modified_loss(ModifiedLossKind::squared_additive, 2.0, 1.0, 0.5) ==
          0.5);
    CHECK(modified_loss(ModifiedLossKind::hamming_bsc, 1.0, 1.0, 0.25) ==
          -0.5);
    CHECK_THROWS_AS(modified_loss(ModifiedLossKind::hamming_bsc, 1.0, 0.0, 0.6),
                    std::invalid_argument);
}

TEST_CASE("modified loss conditional-mean identity") {
    // E rho(Y, F) = l(X, F) for fixed X, F over the channel
    const int n = 100000;
    {
        CounterRng rng(5, RngStream::misc);
        double x = 1.0, f = 0.0, sum = 0.0;
        for (int i = 0; i < n; ++i) {
            double y = rng.uniform(static_cast<std::uint64_t>(i)) < 0.1 ? 1.0 - x : x;
            sum += modified_loss(ModifiedLossKind::hamming_bsc, y, f, 0.1);
        }
        CHECK(std::abs(sum / n - 1.0) < 0.01);
    }
    {
        // AWGN squared: random clean/decision pairs
        CounterRng rng(6, RngStream::misc);
        for (int rep = 0; rep < 4; ++rep) {
            double x = rng.normal(1000 + static_cast<std::uint64_t>(rep));
            double f = rng.normal(2000 + static_cast<std::uint64_t>(rep));
            double sn2 = 0.7;
            double sum = 0.0;
            for (int i = 0; i < n; ++i) {
                double y = x + std::sqrt(sn2) * rng.normal(static_cast<std::uint64_t>(rep) * n + i);
                sum += modified_loss(ModifiedLossKind::squared_additive, y, f, sn2);
            }
            double want = (x - f) * (x - f);
            CHECK(std::abs(sum / n - want) < 0.05 * (1.0 + want));
        }
    }
}
