// fieldscan: sequential scanning, filtering and prediction of noisy 2-D
// data arrays, with the associated performance bounds, figure data and
// theorem audits.
//
// Subcommands: gen | corrupt | run | bounds | figures | universal | audit |
// oracle. Every output is accompanied by a run manifest (command line,
// config hash, seed, PRNG id, library version, wall time); identical argv
// and seed reproduce outputs byte-for-byte apart from the wall-time field.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "fieldscan/bounds.hpp"
#include "fieldscan/channels.hpp"
#include "fieldscan/core.hpp"
#include "fieldscan/errors.hpp"
#include "fieldscan/estimators.hpp"
#include "fieldscan/harness.hpp"
#include "fieldscan/oracle.hpp"
#include "fieldscan/rng.hpp"
#include "fieldscan/scanners.hpp"
#include "fieldscan/universal.hpp"

namespace {

using namespace fieldscan;

std::string g12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

struct ManifestInfo {
    std::string command_line;
    std::string config;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;
};

std::string render_manifest(const ManifestInfo& info) {
    std::ostringstream oss;
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(info.config)));
    oss << "# manifest\n";
    oss << "command: " << info.command_line << "\n";
    oss << "config_hash: " << hash << "\n";
    oss << "seed: " << info.seed << "\n";
    oss << "prng: " << kPrngId << "\n";
    oss << "version: " << kLibraryVersion << "\n";
    oss << "wall_seconds: " << g12(info.wall_seconds) << "\n";
    return oss.str();
}

void write_manifest_for(const std::string& output_path, const ManifestInfo& info) {
    std::ofstream out(output_path + ".manifest");
    out << render_manifest(info);
}

std::map<std::string, double> parse_params(const std::string& params) {
    std::map<std::string, double> kv;
    std::stringstream ss(params);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--params expects k=v,...  got '" + item + "'");
        kv[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    }
    return kv;
}

double need(const std::map<std::string, double>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError("missing parameter '" + key + "'");
    return it->second;
}

double get_or(const std::map<std::string, double>& kv, const std::string& key, double dflt) {
    auto it = kv.find(key);
    return it == kv.end() ? dflt : it->second;
}

void write_csv(const std::string& path, const FigureData& data) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open " + path);
    for (std::size_t i = 0; i < data.columns.size(); ++i)
        out << (i ? "," : "") << data.columns[i];
    out << "\n";
    for (const auto& row : data.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << g12(row[i]);
        out << "\n";
    }
}

std::string join_argv(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scanning / filtering / prediction of noisy 2-D data arrays"};
    app.set_config("--config", "", "key=value config file (flags take precedence)");
    int jobs = 0;
    app.add_option("--jobs", jobs, "worker threads (0 = all cores; 1 = deterministic serial)");

    auto started = std::chrono::steady_clock::now();
    ManifestInfo manifest;
    manifest.command_line = join_argv(argc, argv);

    // ---- gen ----------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "generate a clean field");
    std::string gen_source = "iid:0.5", gen_out;
    int gen_w = 16, gen_h = 16;
    std::uint64_t gen_seed = 1;
    gen->add_option("--source", gen_source,
                    "const:V | iid:P1 | markov:PI | gauss-white:VAR | gauss-ar:VAR:RHO");
    gen->add_option("--width", gen_w)->check(CLI::PositiveNumber);
    gen->add_option("--height", gen_h)->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed);
    gen->add_option("--out", gen_out)->required();

    // ---- corrupt ------------------------------------------------------
    auto* cor = app.add_subcommand("corrupt", "pass a clean field through a channel");
    std::string cor_channel = "bsc", cor_in, cor_out;
    double cor_delta = 0.25, cor_var = 1.0;
    std::uint64_t cor_seed = 1;
    cor->add_option("--channel", cor_channel, "bsc | awgn");
    cor->add_option("--delta", cor_delta, "BSC crossover in [0, 0.5)");
    cor->add_option("--noise-var", cor_var, "AWGN variance");
    cor->add_option("--seed", cor_seed);
    cor->add_option("--in", cor_in)->required();
    cor->add_option("--out", cor_out)->required();

    // ---- run ----------------------------------------------------------
    auto* run = app.add_subcommand("run", "Monte Carlo scan/estimate experiment");
    std::string run_scan = "raster", run_est = "sws", run_mode = "filter", run_loss = "hamming";
    std::string run_source = "markov:0.1", run_channel = "bsc", run_out;
    double run_delta = 0.1, run_var = 1.0;
    int run_w = 64, run_h = 64, run_trials = 10, run_profile_stride = 0;
    std::uint64_t run_seed = 1;
    run->add_option("--scan", run_scan, "raster|snake|hilbert|random:SEED|ote:K|checker|greedy")
        ->required();
    run->add_option("--estimator", run_est,
                    "sws|wiener|window:K|hmm-forward|hmm-predict|gauss-opt|const0|const1|last-obs|majority")
        ->required();
    run->add_option("--mode", run_mode, "filter | predict");
    run->add_option("--loss", run_loss, "hamming | squared");
    run->add_option("--source", run_source);
    run->add_option("--channel", run_channel, "bsc | awgn");
    run->add_option("--delta", run_delta);
    run->add_option("--noise-var", run_var);
    run->add_option("--width", run_w)->check(CLI::PositiveNumber);
    run->add_option("--height", run_h)->check(CLI::PositiveNumber);
    run->add_option("--trials", run_trials)->check(CLI::PositiveNumber);
    run->add_option("--seed", run_seed);
    run->add_option("--out", run_out, "write per-step loss profile CSV here");
    run->add_option("--profile-stride", run_profile_stride,
                    "emit every Nth profile row (0 = auto, caps at 4096 rows)");

    // ---- bounds -------------------------------------------------------
    auto* bnd = app.add_subcommand("bounds", "evaluate a closed-form or numerical bound");
    std::string bnd_which, bnd_params;
    bnd->add_option("--which", bnd_which,
                    "zeta|zeta-gauss|eps-delta|gauss-excess|sbs|immse|fstar|scand|gauss-scand|"
                    "scand-excess|pred-excess-bsc|regions|hplus|filter-lb|pred-lb")
        ->required();
    bnd->add_option("--params", bnd_params, "k=v,... (e.g. delta=0.25,d=0.1)");

    // ---- figures ------------------------------------------------------
    auto* fig = app.add_subcommand("figures", "regenerate figure datasets as CSV");
    int fig_number = 1;
    std::string fig_out_dir = ".";
    double fig_delta = 0.25, fig_step = 0.01;
    std::int64_t fig_symbols = 1000000;
    std::uint64_t fig_seed = 1;
    fig->add_option("--fig", fig_number, "1..6")->required()->check(CLI::Range(1, 6));
    fig->add_option("--out", fig_out_dir, "output directory");
    fig->add_option("--delta", fig_delta, "fig 1 crossover");
    fig->add_option("--grid-step", fig_step, "figs 4-6 grid step");
    fig->add_option("--symbols", fig_symbols, "fig 5 Monte Carlo symbols per cell");
    fig->add_option("--seed", fig_seed);

    // ---- universal ----------------------------------------------------
    auto* uni = app.add_subcommand("universal", "exponential-weighting universal scandictor");
    std::string uni_experts, uni_out;
    int uni_n = 32, uni_m = 4, uni_trials = 10;
    double uni_eta = 0.0, uni_pi = 0.1, uni_delta = 0.2;
    std::uint64_t uni_seed = 1;
    uni->add_option("--experts", uni_experts, "experts spec JSON (scanner/predictor pairs)");
    uni->add_option("--n", uni_n, "field side")->check(CLI::PositiveNumber);
    uni->add_option("--m", uni_m, "block side")->check(CLI::PositiveNumber);
    uni->add_option("--eta", uni_eta, "learning rate (0 = auto)");
    uni->add_option("--pi", uni_pi, "Markov transition probability of the source");
    uni->add_option("--delta", uni_delta, "BSC crossover");
    uni->add_option("--trials", uni_trials)->check(CLI::PositiveNumber);
    uni->add_option("--seed", uni_seed);
    uni->add_option("--out", uni_out, "per-trial CSV");

    // ---- audit --------------------------------------------------------
    auto* aud = app.add_subcommand("audit", "run a theorem audit");
    std::string aud_which = "all";
    std::uint64_t aud_seed = 1;
    aud->add_option("--which", aud_which, "thm1|thm2|thm4|lemma_sq|prop_binary|regret|all");
    aud->add_option("--seed", aud_seed);

    // ---- oracle -------------------------------------------------------
    auto* orc = app.add_subcommand("oracle", "exact small-instance reference computations");
    std::string orc_op, orc_params;
    orc->add_option("--op", orc_op, "filter-loss|best-order|adaptive-scan|output-entropy")
        ->required();
    orc->add_option("--params", orc_params,
                    "k=v,... (length, pi, delta, predictor=0/1 for mode)");

    app.require_subcommand(1);
    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            manifest.seed = gen_seed;
            manifest.config = "gen;" + gen_source + ";" + std::to_string(gen_w) + "x" +
                              std::to_string(gen_h) + ";" + std::to_string(gen_seed);
            Field f = generate_field(parse_source(gen_source), gen_w, gen_h, gen_seed);
            write_field(f, gen_out);
            manifest.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            write_manifest_for(gen_out, manifest);
            std::cout << render_manifest(manifest);
            std::cout << "wrote " << gen_out << "\n";
            return 0;
        }

        if (*cor) {
            manifest.seed = cor_seed;
            Channel channel = cor_channel == "bsc" ? Channel::bsc(cor_delta) : Channel::awgn(cor_var);
            manifest.config = "corrupt;" + cor_channel + ";" + g12(cor_delta) + ";" + g12(cor_var) +
                              ";" + std::to_string(cor_seed);
            Field clean = read_field(cor_in);
            Field noisy = corrupt(channel, clean, cor_seed);
            write_field(noisy, cor_out);
            manifest.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            write_manifest_for(cor_out, manifest);
            std::cout << render_manifest(manifest);
            std::cout << "wrote " << cor_out << "\n";
            return 0;
        }

        if (*run) {
            manifest.seed = run_seed;
            ExperimentConfig cfg;
            cfg.source = parse_source(run_source);
            cfg.channel = run_channel == "bsc" ? Channel::bsc(run_delta) : Channel::awgn(run_var);
            cfg.scanner = run_scan;
            cfg.estimator = run_est;
            if (run_mode == "filter")
                cfg.mode = EstimatorMode::filter;
            else if (run_mode == "predict")
                cfg.mode = EstimatorMode::predictor;
            else
                throw ConfigError("--mode must be filter or predict");
            cfg.loss = parse_loss_kind(run_loss);
            cfg.width = run_w;
            cfg.height = run_h;
            cfg.trials = run_trials;
            cfg.seed = run_seed;
            cfg.jobs = jobs;
            manifest.config = "run;" + run_source + ";" + run_channel + ";" + g12(run_delta) + ";" +
                              g12(run_var) + ";" + run_scan + ";" + run_est + ";" + run_mode + ";" +
                              run_loss + ";" + std::to_string(run_w) + "x" + std::to_string(run_h) +
                              ";" + std::to_string(run_trials) + ";" + std::to_string(run_seed);
            bool profile = !run_out.empty();
            MonteCarloResult mc = monte_carlo_loss(cfg, profile);
            std::cout << "mean_normalized_loss " << g12(mc.mean) << "\n";
            std::cout << "half_width " << g12(mc.half_width) << "\n";
            if (profile) {
                std::int64_t n = static_cast<std::int64_t>(mc.step_profile.size());
                std::int64_t stride = run_profile_stride > 0
                                          ? run_profile_stride
                                          : std::max<std::int64_t>(1, n / 4096);
                std::ofstream out(run_out);
                if (!out) throw ConfigError("cannot open " + run_out);
                out << "step,mean_loss\n";
                for (std::int64_t i = 0; i < n; i += stride)
                    out << i << "," << g12(mc.step_profile[static_cast<std::size_t>(i)]) << "\n";
                manifest.wall_seconds =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                        .count();
                write_manifest_for(run_out, manifest);
            }
            manifest.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            std::cout << render_manifest(manifest);
            return 0;
        }

        if (*bnd) {
            auto kv = parse_params(bnd_params);
            manifest.seed = 0;
            manifest.config = "bounds;" + bnd_which + ";" + bnd_params;
            BoundReport report;
            report.name = bnd_which;
            if (bnd_which == "zeta") {
                double d = need(kv, "d"), delta = need(kv, "delta");
                report.value = zeta_binary(d, delta);
                report.parameters = {{"d", d}, {"delta", delta}};
                report.formula = "h_b(delta*d) bits for d<delta, else 1";
            } else if (bnd_which == "zeta-gauss") {
                double d = need(kv, "d"), sn2 = need(kv, "sigma_n2");
                report.value = zeta_gaussian(d, sn2);
                report.parameters = {{"d", d}, {"sigma_n2", sn2}};
                report.formula = "0.5 ln(2 pi e sigma_n^4/(sigma_n^2-d)) nats";
            } else if (bnd_which == "eps-delta") {
                MinimaxFit fit = epsilon_delta(need(kv, "delta"));
                report.value = fit.epsilon;
                report.parameters = {{"delta", need(kv, "delta")}, {"a", fit.a}, {"b", fit.b}};
                report.formula = "min_{a,b} max_{delta<=p<=1/2} |a h_b(p)+b-f_delta(p)|";
            } else if (bnd_which == "gauss-excess") {
                double sx2 = need(kv, "sigma_x2"), sn2 = need(kv, "sigma_n2");
                report.value = gaussian_filter_excess_bound(sx2, sn2);
                report.parameters = {{"sigma_x2", sx2}, {"sigma_n2", sn2}};
                report.formula = "sigma_n2*(ln(1+snr)-snr/(1+snr))";
            } else if (bnd_which == "sbs") {
                double sx2 = need(kv, "sigma_x2"), sn2 = need(kv, "sigma_n2");
                report.value = symbol_by_symbol_bound(sx2, sn2);
                report.parameters = {{"sigma_x2", sx2}, {"sigma_n2", sn2}};
                report.formula = "sigma_n2*sigma_x2/(sigma_x2+sigma_n2)";
            } else if (bnd_which == "immse") {
                ImmseResult r = binary_awgn_immse(need(kv, "snr"));
                report.value = r.mutual_information;
                report.parameters = {{"snr", need(kv, "snr")}, {"mmse", r.mmse}};
                report.formula = "Gauss-Hermite I(snr) nats; mmse in parameters";
            } else if (bnd_which == "fstar") {
                double sx2 = need(kv, "sigma_x2"), sn2 = need(kv, "sigma_n2");
                report.value = fstar_binary_awgn(sx2, sn2);
                report.parameters = {{"sigma_x2", sx2}, {"sigma_n2", sn2}};
                report.formula = "2 sigma_n2 I(snr) - sigma_x2 mmse(snr)";
            } else if (bnd_which == "scand") {
                Channel ch = kv.count("delta") ? Channel::bsc(need(kv, "delta"))
                                               : Channel::awgn(need(kv, "sigma_n2"));
                report.value = noisy_scandictability(need(kv, "clean_value"), ch);
                report.parameters = {{"clean_value", need(kv, "clean_value")}};
                report.formula = "squared: U_Y - sigma_n2; Hamming: (U_Y-delta)/(1-2delta)";
            } else if (bnd_which == "gauss-scand") {
                // separable AR spectrum by default
                double sx2 = need(kv, "sigma_x2"), sn2 = need(kv, "sigma_n2");
                double rho = get_or(kv, "rho", 0.0);
                auto g = [sx2, sn2, rho](double l1, double l2) {
                    auto kern = [rho](double l) {
                        return (1.0 - rho * rho) / (1.0 - 2.0 * rho * std::cos(l) + rho * rho);
                    };
                    return sx2 * kern(l1) * kern(l2) + sn2;
                };
                report.value = gaussian_noisy_scandictability(g, sn2);
                report.parameters = {{"sigma_x2", sx2}, {"sigma_n2", sn2}, {"rho", rho}};
                report.formula = "exp{(1/4pi^2) int ln g_Y} - sigma_n2";
            } else if (bnd_which == "scand-excess") {
                double sx2 = need(kv, "sigma_x2"), sn2 = need(kv, "sigma_n2");
                report.value = gaussian_scandiction_excess_bound(sx2, sn2);
                report.parameters = {{"sigma_x2", sx2}, {"sigma_n2", sn2}};
                report.formula = "sigma_n2*(snr-ln(1+snr))";
            } else if (bnd_which == "pred-excess-bsc") {
                report.value = noisy_prediction_excess_bound_bsc(need(kv, "delta"));
                report.parameters = {{"delta", need(kv, "delta")}};
                report.formula = "2*0.08/(1-2delta)";
            } else if (bnd_which == "regions") {
                SingletRegions r = singlet_regions(need(kv, "pi"));
                report.value = r.f_pi;
                report.parameters = {{"pi", need(kv, "pi")}, {"d_pi", r.d_pi}};
                report.formula = "f(pi)=0.5(1-sqrt(max(1-4pi,0))); d in parameters";
            } else if (bnd_which == "hplus") {
                double sx2 = need(kv, "sigma_x2"), sn2 = need(kv, "sigma_n2");
                double hp = need(kv, "h_plus");
                report.value = hplus_excess_bound(hp, sx2, sn2);
                if (report.value < 0.0)
                    std::cerr << "warning: negative bound; supplied h_plus exceeds the "
                                 "symbol-by-symbol entropy\n";
                report.parameters = {{"sigma_x2", sx2}, {"sigma_n2", sn2}, {"h_plus", hp}};
                report.formula = "sbs - exp(2 h_plus)/(2 pi e)";
            } else if (bnd_which == "filter-lb") {
                double delta = need(kv, "delta"), rate = need(kv, "rate_bits");
                EnvelopeFunction env = make_zeta_binary_envelope(delta);
                report.value = filtering_lower_bound(rate, env);
                report.parameters = {{"delta", delta}, {"rate_bits", rate}};
                report.formula = "zetabar^{-1}(rate)";
            } else if (bnd_which == "pred-lb") {
                double rate = need(kv, "rate");
                LossKind lk = kv.count("squared") ? LossKind::squared : LossKind::hamming;
                report.value = clean_prediction_lower_bound(rate, lk);
                report.parameters = {{"rate", rate}};
                report.formula = "Hamming: h_b^{-1}(rate bits); squared: exp(2 rate)/(2 pi e)";
            } else {
                throw ConfigError("unknown bound: " + bnd_which);
            }
            std::cout << format_bound_report(report) << "\n";
            manifest.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            std::cout << render_manifest(manifest);
            return 0;
        }

        if (*fig) {
            manifest.seed = fig_seed;
            manifest.config = "figures;" + std::to_string(fig_number) + ";" + g12(fig_delta) + ";" +
                              g12(fig_step) + ";" + std::to_string(fig_symbols) + ";" +
                              std::to_string(fig_seed);
            FigureOptions opt;
            opt.delta = fig_delta;
            opt.grid_step = fig_step;
            opt.symbols = fig_symbols;
            opt.seed = fig_seed;
            opt.jobs = jobs;
            FigureData data = figure_data(figure_kind_from_number(fig_number), opt);
            std::filesystem::create_directories(fig_out_dir);
            std::string path = fig_out_dir + "/fig" + std::to_string(fig_number) + "_" + data.name +
                               ".csv";
            write_csv(path, data);
            manifest.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            write_manifest_for(path, manifest);
            std::cout << render_manifest(manifest);
            std::cout << "wrote " << path << " (" << data.rows.size() << " rows)\n";
            return 0;
        }

        if (*uni) {
            manifest.seed = uni_seed;
            ExpertSet experts;
            if (uni_experts.empty()) {
                experts.experts = {{"raster", "const0"},
                                   {"raster", "const1"},
                                   {"raster", "last-obs"},
                                   {"snake", "majority"}};
            } else {
                std::ifstream in(uni_experts);
                if (!in) throw ConfigError("cannot open experts spec " + uni_experts);
                nlohmann::json spec = nlohmann::json::parse(in);
                for (const auto& e : spec.at("experts"))
                    experts.experts.push_back(
                        {e.at("scanner").get<std::string>(), e.at("predictor").get<std::string>()});
                if (spec.contains("l_max")) experts.l_max = spec["l_max"].get<double>();
            }
            manifest.config = "universal;" + std::to_string(uni_n) + ";" + std::to_string(uni_m) +
                              ";" + g12(uni_eta) + ";" + g12(uni_pi) + ";" + g12(uni_delta) + ";" +
                              std::to_string(uni_trials) + ";" + std::to_string(uni_seed) + ";" +
                              std::to_string(experts.experts.size());
            double bound = regret_bound(uni_n, uni_m, experts.experts.size(), experts.l_max);
            std::ostringstream csv;
            csv << "trial,algorithm_loss,best_expert_loss,regret,bound\n";
            CounterRng trial_seeds(uni_seed, RngStream::trial);
            double worst = -1e300;
            for (int t = 0; t < uni_trials; ++t) {
                std::uint64_t ts = trial_seeds.bits(static_cast<std::uint64_t>(t));
                SourceSpec src;
                src.kind = SourceSpec::Kind::markov;
                src.pi = uni_pi;
                Field clean = generate_field(src, uni_n, uni_n, ts);
                Field noisy = corrupt(Channel::bsc(uni_delta), clean, ts);
                UniversalResult r =
                    universal_scandict(noisy, experts, uni_m, uni_eta, ts, &clean, uni_delta);
                worst = std::max(worst, r.regret);
                csv << t << "," << g12(r.algorithm_loss) << "," << g12(r.best_expert_loss) << ","
                    << g12(r.regret) << "," << g12(r.bound) << "\n";
            }
            if (!uni_out.empty()) {
                std::ofstream out(uni_out);
                out << csv.str();
                manifest.wall_seconds =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                        .count();
                write_manifest_for(uni_out, manifest);
            } else {
                std::cout << csv.str();
            }
            std::cout << "regret_bound " << g12(bound) << "\n";
            std::cout << "max_regret " << g12(worst) << "\n";
            manifest.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            std::cout << render_manifest(manifest);
            return 0;
        }

        if (*aud) {
            manifest.seed = aud_seed;
            manifest.config = "audit;" + aud_which + ";" + std::to_string(aud_seed);
            std::vector<AuditKind> kinds;
            if (aud_which == "all")
                kinds = {AuditKind::thm1,     AuditKind::thm2,        AuditKind::thm4,
                         AuditKind::lemma_sq, AuditKind::prop_binary, AuditKind::regret};
            else
                kinds = {parse_audit_kind(aud_which)};
            bool all_ok = true;
            for (AuditKind kind : kinds) {
                AuditReport report = theorem_audit(kind, aud_seed, jobs);
                std::cout << "audit " << report.name << ": " << (report.pass ? "PASS" : "FAIL")
                          << "\n";
                for (const auto& line : report.lines) std::cout << "  " << line << "\n";
                all_ok = all_ok && report.pass;
            }
            manifest.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            std::cout << render_manifest(manifest);
            return all_ok ? 0 : 2;
        }

        if (*orc) {
            auto kv = parse_params(orc_params);
            manifest.config = "oracle;" + orc_op + ";" + orc_params;
            int length = static_cast<int>(get_or(kv, "length", 4));
            double pi = get_or(kv, "pi", 0.1), delta = get_or(kv, "delta", 0.1);
            EstimatorMode mode = get_or(kv, "predictor", 0.0) != 0.0 ? EstimatorMode::predictor
                                                                     : EstimatorMode::filter;
            oracle::JointModel model =
                oracle::markov_chain_model(length, pi, Channel::bsc(delta));
            if (orc_op == "filter-loss") {
                std::vector<Site> order;
                for (int i = 0; i < length; ++i) order.push_back({0, i});
                double v = oracle::exhaustive_optimal_filter_loss(model, order, mode) / length;
                std::cout << "normalized_loss " << g12(v) << "\n";
            } else if (orc_op == "best-order") {
                auto r = oracle::exhaustive_best_order(model, mode);
                std::cout << "value " << g12(r.value / length) << "\norder";
                for (const Site& s : r.order) std::cout << " (" << s.row << "," << s.col << ")";
                std::cout << "\n";
            } else if (orc_op == "adaptive-scan") {
                double v = oracle::exhaustive_best_adaptive_scan(model, mode) / length;
                std::cout << "value " << g12(v) << "\n";
            } else if (orc_op == "output-entropy") {
                std::cout << "bits_per_site " << g12(oracle::exact_output_entropy_bits(model) / length)
                          << "\n";
            } else {
                throw ConfigError("unknown oracle op: " + orc_op);
            }
            manifest.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            std::cout << render_manifest(manifest);
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
