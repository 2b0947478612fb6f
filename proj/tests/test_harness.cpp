#include <doctest.h>

#include <cmath>

#include "fieldscan/bounds.hpp"
#include "fieldscan/errors.hpp"
#include "fieldscan/harness.hpp"

using namespace fieldscan;

TEST_CASE("field generation determinism and statistics") {
    SourceSpec markov = parse_source("markov:0.1");
    Field a = generate_field(markov, 1000, 1, 4);
    Field b = generate_field(markov, 1000, 1, 4);
    CHECK(a.values() == b.values());
    double flips = 0.0;
    for (int i = 1; i < 1000; ++i) flips += a.at_index(i) != a.at_index(i - 1) ? 1.0 : 0.0;
    CHECK(flips / 999.0 == doctest::Approx(0.1).epsilon(0.35));

    SourceSpec constant = parse_source("const:1");
    Field c = generate_field(constant, 3, 3, 1);
    CHECK(c.alphabet() == Alphabet::binary);
    for (std::int64_t i = 0; i < 9; ++i) CHECK(c.at_index(i) == 1.0);

    CHECK_THROWS_AS(parse_source("pink-noise"), ConfigError);
}

TEST_CASE("monte carlo loss on degenerate and simple cases") {
    ExperimentConfig cfg;
    cfg.source = parse_source("iid:0.5");
    cfg.channel = Channel::bsc(0.0);
    cfg.scanner = "raster";
    cfg.estimator = "sws";
    cfg.width = 32;
    cfg.height = 32;
    cfg.trials = 5;
    cfg.seed = 2;
    MonteCarloResult clean = monte_carlo_loss(cfg);
    CHECK(clean.mean == 0.0);
    CHECK(clean.half_width == 0.0);

    cfg.channel = Channel::bsc(0.25);
    cfg.width = 100;
    cfg.height = 100;
    cfg.trials = 100;
    MonteCarloResult mc = monte_carlo_loss(cfg);
    CHECK(std::abs(mc.mean - 0.25) < 0.003);
    CHECK(mc.half_width < 0.003);
    CHECK(mc.per_trial.size() == 100);
}

TEST_CASE("monte carlo is reproducible and parallel-safe") {
    ExperimentConfig cfg;
    cfg.source = parse_source("markov:0.2");
    cfg.channel = Channel::bsc(0.15);
    cfg.scanner = "ote:1";
    cfg.estimator = "window:1";
    cfg.width = 512;
    cfg.height = 1;
    cfg.trials = 8;
    cfg.seed = 5;
    cfg.jobs = 1;
    MonteCarloResult serial = monte_carlo_loss(cfg);
    cfg.jobs = 4;
    MonteCarloResult parallel = monte_carlo_loss(cfg);
    CHECK(serial.per_trial == parallel.per_trial);
}

TEST_CASE("per-step profile is recorded when requested") {
    ExperimentConfig cfg;
    cfg.source = parse_source("iid:0.5");
    cfg.channel = Channel::bsc(0.3);
    cfg.scanner = "raster";
    cfg.estimator = "sws";
    cfg.width = 16;
    cfg.height = 4;
    cfg.trials = 50;
    cfg.seed = 6;
    MonteCarloResult mc = monte_carlo_loss(cfg, true);
    CHECK(mc.step_profile.size() == 64);
    double avg = 0.0;
    for (double v : mc.step_profile) avg += v;
    CHECK(avg / 64.0 == doctest::Approx(mc.mean).epsilon(1e-12));
}

TEST_CASE("config errors are reported as such") {
    ExperimentConfig cfg;
    cfg.source = parse_source("iid:0.5");
    cfg.channel = Channel::bsc(0.1);
    cfg.estimator = "hmm-forward";  // needs a markov source
    cfg.width = 4;
    cfg.height = 4;
    CHECK_THROWS_AS(monte_carlo_loss(cfg), ConfigError);
    cfg.estimator = "no-such-estimator";
    CHECK_THROWS_AS(monte_carlo_loss(cfg), ConfigError);
}

TEST_CASE("figure 1 data shows the jump and its concave cover") {
    FigureOptions opt;
    opt.delta = 0.25;
    FigureData data = figure_data(FigureKind::zeta_envelope, opt);
    CHECK(data.columns.size() == 3);
    bool found = false;
    for (const auto& row : data.rows) {
        if (std::abs(row[0] - 0.3) < 2e-4) {
            CHECK(row[1] == 1.0);
            CHECK(row[2] == 1.0);
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("figure 2 peak ratio") {
    FigureData data = figure_data(FigureKind::gauss_excess);
    double peak = 0.0;
    for (const auto& row : data.rows) peak = std::max(peak, row[1]);
    CHECK(peak == doctest::Approx(0.216).epsilon(0.02));
}

TEST_CASE("figure 4 compares the two binary bounds") {
    FigureOptions opt;
    opt.grid_step = 0.05;
    FigureData data = figure_data(FigureKind::binary_filter_bounds, opt);
    CHECK(data.rows.size() == 9);
    for (const auto& row : data.rows) {
        CHECK(row[1] > 0.0);
        if (row[0] >= 0.1 && row[0] <= 0.45) CHECK(row[1] < row[2]);
    }
}

TEST_CASE("figure 6 exact improvement at the study point") {
    FigureOptions opt;
    opt.grid_step = 0.05;
    FigureData data = figure_data(FigureKind::hmm_diff, opt);
    bool found = false;
    for (const auto& row : data.rows) {
        CHECK(row[1] < singlet_regions(row[0]).f_pi + 1e-12);
        if (std::abs(row[0] - 0.1) < 1e-9 && std::abs(row[1] - 0.1) < 1e-9) {
            CHECK(std::abs(row[2] - 0.021) <= 0.005);
            CHECK(row[2] == doctest::Approx(0.01904).epsilon(1e-6));
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("figure 5 marks the known improving cell") {
    FigureOptions opt;
    opt.grid_step = 0.1;
    opt.symbols = 60000;
    opt.seed = 9;
    FigureData data = figure_data(FigureKind::hmm_region, opt);
    bool found = false;
    for (const auto& row : data.rows) {
        CHECK((row[6] == 1.0 || row[6] == 0.0 || row[6] == -1.0));
        if (std::abs(row[0] - 0.1) < 1e-9 && std::abs(row[1] - 0.1) < 1e-9) {
            found = true;
            CHECK(row[6] == 1.0);  // improvement beyond two half-widths
        }
    }
    CHECK(found);
}

TEST_CASE("ote exact loss composition") {
    HmmParams p(0.1, 0.1);
    CHECK(ote_exact_loss(p, 1) == doctest::Approx(0.08096).epsilon(1e-9));
    // more sites on the singlet pass pulls the loss toward delta
    CHECK(ote_exact_loss(p, 3) > ote_exact_loss(p, 1));
}

TEST_CASE("audits pass on default seeds") {
    for (AuditKind kind : {AuditKind::lemma_sq, AuditKind::thm4, AuditKind::thm2,
                           AuditKind::prop_binary}) {
        AuditReport report = theorem_audit(kind);
        INFO(report.name);
        for (const auto& line : report.lines) INFO(line);
        CHECK(report.pass);
    }
}

TEST_CASE("entropy rate estimate brackets the known bounds") {
    HmmParams p(0.1, 0.1);
    RateEstimate est = hmm_output_entropy_rate_upper_mc(p, 200000, 3);
    double lb = binary_entropy_bits(0.18);
    CHECK(est.bits_per_site + 3.0 * est.half_width / 1.96 >= lb - 0.01);
    CHECK(est.bits_per_site <= 1.0 + 1e-9);
}
