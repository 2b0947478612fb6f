#include "fieldscan/oracle.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "fieldscan/errors.hpp"

namespace fieldscan::oracle {

namespace {

constexpr int kEnumerationCap = 12;
constexpr int kBestOrderCap = 8;
constexpr int kAdaptiveCap = 4;

inline double bsc_w(int y, int x, double delta) { return y == x ? 1.0 - delta : delta; }

// Expected step loss given the two joint masses P(x=0, cond), P(x=1, cond).
inline double step_bayes_loss(double m0, double m1, LossKind kind) {
    if (kind == LossKind::hamming) return std::min(m0, m1);
    double s = m0 + m1;
    if (s <= 0.0) return 0.0;
    // optimal real decision is the conditional mean m1/s; loss mass is the
    // conditional Bernoulli variance times the conditioning probability
    return m0 * m1 / s;
}

}  // namespace

JointModel::JointModel(int width_, int height_, std::vector<double> probs_, Channel channel_)
    : width(width_), height(height_), probs(std::move(probs_)), channel(channel_) {
    if (width <= 0 || height <= 0) throw ModelError("JointModel: bad dimensions");
    int n = width * height;
    if (n > kEnumerationCap)
        throw SizeCapExceeded("JointModel: site count exceeds the enumeration cap (12)");
    if (probs.size() != (std::size_t{1} << n))
        throw ModelError("JointModel: probability table must have 2^sites entries");
    double sum = 0.0;
    for (double p : probs) {
        if (p < 0.0) throw ModelError("JointModel: negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw ModelError("JointModel: probabilities must sum to 1");
    if (channel.kind != Channel::Kind::bsc)
        throw ModelError("JointModel: enumeration oracles require a BSC channel");
}

JointModel iid_binary_model(int width, int height, double p_one, const Channel& channel) {
    int n = width * height;
    if (n > kEnumerationCap) throw SizeCapExceeded("iid_binary_model: too many sites");
    std::vector<double> probs(std::size_t{1} << n);
    for (std::size_t x = 0; x < probs.size(); ++x) {
        double p = 1.0;
        for (int i = 0; i < n; ++i) p *= ((x >> i) & 1) ? p_one : 1.0 - p_one;
        probs[x] = p;
    }
    return {width, height, std::move(probs), channel};
}

JointModel markov_chain_model(int length, double pi, const Channel& channel) {
    if (length > kEnumerationCap) throw SizeCapExceeded("markov_chain_model: too many sites");
    std::vector<double> probs(std::size_t{1} << length);
    for (std::size_t x = 0; x < probs.size(); ++x) {
        double p = 0.5;
        for (int i = 1; i < length; ++i)
            p *= (((x >> i) & 1) == ((x >> (i - 1)) & 1)) ? 1.0 - pi : pi;
        probs[x] = p;
    }
    return {length, 1, std::move(probs), channel};
}

double brute_force_scalar_bayes(const std::vector<std::array<double, 2>>& joint_yx,
                                LossKind loss_kind) {
    double total = 0.0;
    for (const auto& m : joint_yx) total += step_bayes_loss(m[0], m[1], loss_kind);
    return total;
}

double exhaustive_optimal_filter_loss(const JointModel& model, std::span<const Site> order,
                                      EstimatorMode mode, LossKind loss_kind) {
    const int n = model.sites();
    if (!validate_scan_coverage(order, model.width, model.height))
        throw std::invalid_argument("exhaustive_optimal_filter_loss: order not coverage-valid");
    const double delta = model.channel.delta;

    std::vector<int> site_of_step(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t)
        site_of_step[static_cast<std::size_t>(t)] =
            order[static_cast<std::size_t>(t)].row * model.width + order[static_cast<std::size_t>(t)].col;

    // tabs[t][yp*2 + b]: joint mass of (conditioning observations = yp bits
    // in visiting order, clean symbol at step t's site = b).
    std::vector<std::vector<double>> tabs(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        int cond = (mode == EstimatorMode::filter) ? t + 1 : t;
        tabs[static_cast<std::size_t>(t)].assign((std::size_t{1} << cond) * 2, 0.0);
    }

    std::vector<double> w;
    w.reserve(std::size_t{1} << n);
    for (std::size_t x = 0; x < model.probs.size(); ++x) {
        double px = model.probs[x];
        if (px == 0.0) continue;
        w.assign(1, px);
        for (int t = 0; t < n; ++t) {
            int site = site_of_step[static_cast<std::size_t>(t)];
            int xb = static_cast<int>((x >> site) & 1);
            if (mode == EstimatorMode::predictor) {
                auto& tab = tabs[static_cast<std::size_t>(t)];
                for (std::size_t yp = 0; yp < w.size(); ++yp) tab[yp * 2 + static_cast<std::size_t>(xb)] += w[yp];
            }
            // Extend the prefix-weight vector with this step's observation.
            std::size_t sz = w.size();
            w.resize(sz * 2);
            double w0 = bsc_w(0, xb, delta), w1 = bsc_w(1, xb, delta);
            for (std::size_t yp = sz; yp-- > 0;) {
                double base = w[yp];
                w[2 * yp] = base * w0;
                w[2 * yp + 1] = base * w1;
            }
            if (mode == EstimatorMode::filter) {
                auto& tab = tabs[static_cast<std::size_t>(t)];
                for (std::size_t yp = 0; yp < w.size(); ++yp) tab[yp * 2 + static_cast<std::size_t>(xb)] += w[yp];
            }
        }
    }

    double total = 0.0;
    for (int t = 0; t < n; ++t) {
        const auto& tab = tabs[static_cast<std::size_t>(t)];
        for (std::size_t yp = 0; yp < tab.size() / 2; ++yp)
            total += step_bayes_loss(tab[yp * 2], tab[yp * 2 + 1], loss_kind);
    }
    return total;
}

namespace {

// Expected Bayes step loss of estimating the symbol at `target` given the
// observations over `cond_mask` (bitmask of site indices).
double subset_step_loss(const JointModel& model, unsigned cond_mask, int target,
                        LossKind loss_kind) {
    const double delta = model.channel.delta;
    std::vector<int> cond_sites;
    for (int i = 0; i < model.sites(); ++i)
        if (cond_mask & (1u << i)) cond_sites.push_back(i);
    std::vector<double> tab((std::size_t{1} << cond_sites.size()) * 2, 0.0);
    std::vector<double> w;
    for (std::size_t x = 0; x < model.probs.size(); ++x) {
        double px = model.probs[x];
        if (px == 0.0) continue;
        w.assign(1, px);
        for (int site : cond_sites) {
            int xb = static_cast<int>((x >> site) & 1);
            std::size_t sz = w.size();
            w.resize(sz * 2);
            double w0 = bsc_w(0, xb, delta), w1 = bsc_w(1, xb, delta);
            for (std::size_t yp = sz; yp-- > 0;) {
                double base = w[yp];
                w[2 * yp] = base * w0;
                w[2 * yp + 1] = base * w1;
            }
        }
        int tb = static_cast<int>((x >> target) & 1);
        for (std::size_t yp = 0; yp < w.size(); ++yp) tab[yp * 2 + static_cast<std::size_t>(tb)] += w[yp];
    }
    double total = 0.0;
    for (std::size_t yp = 0; yp < tab.size() / 2; ++yp)
        total += step_bayes_loss(tab[yp * 2], tab[yp * 2 + 1], loss_kind);
    return total;
}

}  // namespace

BestOrderResult exhaustive_best_order(const JointModel& model, EstimatorMode mode,
                                      LossKind loss_kind) {
    const int n = model.sites();
    if (n > kBestOrderCap)
        throw SizeCapExceeded("exhaustive_best_order: site count exceeds the cap (8)");
    const unsigned full = (1u << n) - 1;

    // step_cost[S][s]: loss of visiting s when S was visited before it.
    std::vector<std::vector<double>> step_cost(full + 1, std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (unsigned S = 0; S <= full; ++S)
        for (int s = 0; s < n; ++s) {
            if (S & (1u << s)) continue;
            unsigned cond = (mode == EstimatorMode::filter) ? (S | (1u << s)) : S;
            step_cost[S][static_cast<std::size_t>(s)] = subset_step_loss(model, cond, s, loss_kind);
        }

    // Suffix DP: best[R] = min cost of finishing when R remains unvisited.
    std::vector<double> best(full + 1, 0.0);
    for (unsigned R = 1; R <= full; ++R) {
        double v = std::numeric_limits<double>::infinity();
        unsigned visited = full & ~R;
        for (int s = 0; s < n; ++s) {
            if (!(R & (1u << s))) continue;
            double c = step_cost[visited][static_cast<std::size_t>(s)] + best[R & ~(1u << s)];
            v = std::min(v, c);
        }
        best[R] = v;
    }

    // Walk forward, lexicographically-first site among exact minimizers.
    BestOrderResult result;
    result.value = best[full];
    unsigned R = full;
    while (R) {
        unsigned visited = full & ~R;
        int pick = -1;
        double want = best[R];
        for (int s = 0; s < n; ++s) {
            if (!(R & (1u << s))) continue;
            double c = step_cost[visited][static_cast<std::size_t>(s)] + best[R & ~(1u << s)];
            if (std::abs(c - want) <= 1e-13 * std::max(1.0, std::abs(want))) {
                pick = s;
                break;
            }
        }
        if (pick < 0) throw NumericalError("exhaustive_best_order: DP reconstruction failed");
        result.order.push_back({pick / model.width, pick % model.width});
        R &= ~(1u << pick);
    }
    return result;
}

double exact_output_entropy_bits(const JointModel& model) {
    const int n = model.sites();
    const double delta = model.channel.delta;
    std::vector<double> py(std::size_t{1} << n, 0.0);
    for (std::size_t x = 0; x < model.probs.size(); ++x) {
        double px = model.probs[x];
        if (px == 0.0) continue;
        for (std::size_t y = 0; y < py.size(); ++y) {
            double p = px;
            std::size_t diff = x ^ y;
            for (int i = 0; i < n; ++i) p *= (diff >> i) & 1 ? delta : 1.0 - delta;
            py[y] += p;
        }
    }
    double h = 0.0;
    for (double p : py)
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

namespace {

struct AdaptiveContext {
    const JointModel* model;
    EstimatorMode mode;
    LossKind loss_kind;
    std::map<std::pair<unsigned, unsigned>, double> memo;  // (visited mask, y bits on visited)
};

// Mass-weighted remaining loss W(S, yS) = P(Y_S = yS) * E[best remaining
// loss | Y_S = yS]. The min over the next site commutes with the common
// P(yS) factor, so no conditioning divisions are needed:
//   W(S,yS) = min_s [ step_mass_loss(s | S,yS) + sum_{ys} W(S+s, yS+ys) ].
double adaptive_value(AdaptiveContext& ctx, unsigned visited, unsigned ybits) {
    const JointModel& m = *ctx.model;
    const int n = m.sites();
    const unsigned full = (1u << n) - 1;
    if (visited == full) return 0.0;
    auto key = std::make_pair(visited, ybits);
    auto it = ctx.memo.find(key);
    if (it != ctx.memo.end()) return it->second;

    const double delta = m.channel.delta;
    // out[b] = P(x_target = b, Y_visited = ybits [, Y_extra = extra bits]).
    auto joint_mass = [&](unsigned extra_mask, unsigned extra_y, int target, double out[2]) {
        out[0] = out[1] = 0.0;
        for (std::size_t x = 0; x < m.probs.size(); ++x) {
            double p = m.probs[x];
            if (p == 0.0) continue;
            for (int i = 0; i < n; ++i) {
                if (visited & (1u << i)) p *= bsc_w((ybits >> i) & 1, (x >> i) & 1, delta);
                if (extra_mask & (1u << i)) p *= bsc_w((extra_y >> i) & 1, (x >> i) & 1, delta);
            }
            out[(x >> target) & 1] += p;
        }
    };

    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < n; ++s) {
        if (visited & (1u << s)) continue;
        double value = 0.0;
        if (ctx.mode == EstimatorMode::predictor) {
            double mass[2];
            joint_mass(0, 0, s, mass);
            value += step_bayes_loss(mass[0], mass[1], ctx.loss_kind);
        }
        for (unsigned ys = 0; ys <= 1; ++ys) {
            double m2[2];
            joint_mass(1u << s, ys << s, s, m2);
            if (ctx.mode == EstimatorMode::filter)
                value += step_bayes_loss(m2[0], m2[1], ctx.loss_kind);
            if (m2[0] + m2[1] > 0.0)
                value += adaptive_value(ctx, visited | (1u << s), ybits | (ys << s));
        }
        best = std::min(best, value);
    }
    ctx.memo.emplace(key, best);
    return best;
}

}  // namespace

double exhaustive_best_adaptive_scan(const JointModel& model, EstimatorMode mode,
                                     LossKind loss_kind) {
    if (model.sites() > kAdaptiveCap)
        throw SizeCapExceeded("exhaustive_best_adaptive_scan: site count exceeds the cap (4)");
    AdaptiveContext ctx{&model, mode, loss_kind, {}};
    return adaptive_value(ctx, 0, 0);
}

std::vector<double> dense_gaussian_conditioning(const Eigen::MatrixXd& covariance, double sigma_n2,
                                                std::span<const Site> order, EstimatorMode mode,
                                                int width) {
    const int n = static_cast<int>(order.size());
    if (covariance.rows() > 256)
        throw SizeCapExceeded("dense_gaussian_conditioning: site count exceeds the cap (256)");
    if (!(sigma_n2 > 0.0))
        throw std::invalid_argument("dense_gaussian_conditioning: sigma_n2 must be > 0");
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t)
        idx[static_cast<std::size_t>(t)] = order[static_cast<std::size_t>(t)].row * width +
                                           order[static_cast<std::size_t>(t)].col;
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        const int target = idx[static_cast<std::size_t>(t)];
        const int cond = (mode == EstimatorMode::filter) ? t + 1 : t;
        if (cond == 0) {
            out[static_cast<std::size_t>(t)] = covariance(target, target);
            continue;
        }
        Eigen::MatrixXd syy(cond, cond);
        Eigen::VectorXd sxy(cond);
        for (int a = 0; a < cond; ++a) {
            sxy(a) = covariance(idx[static_cast<std::size_t>(a)], target);
            for (int b = 0; b < cond; ++b) {
                syy(a, b) = covariance(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
                if (a == b) syy(a, b) += sigma_n2;
            }
        }
        Eigen::LLT<Eigen::MatrixXd> llt(syy);
        if (llt.info() != Eigen::Success)
            throw NumericalError("dense_gaussian_conditioning: singular observation covariance");
        out[static_cast<std::size_t>(t)] = covariance(target, target) - sxy.dot(llt.solve(sxy));
    }
    return out;
}

double gaussian_conditional_variance(const Eigen::MatrixXd& joint_cov, int target,
                                     std::span<const int> conditioning) {
    const int m = static_cast<int>(conditioning.size());
    if (m == 0) return joint_cov(target, target);
    Eigen::MatrixXd scc(m, m);
    Eigen::VectorXd stc(m);
    for (int a = 0; a < m; ++a) {
        stc(a) = joint_cov(conditioning[static_cast<std::size_t>(a)], target);
        for (int b = 0; b < m; ++b)
            scc(a, b) = joint_cov(conditioning[static_cast<std::size_t>(a)], conditioning[static_cast<std::size_t>(b)]);
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(scc);
    if (ldlt.info() != Eigen::Success)
        throw NumericalError("gaussian_conditional_variance: factorization failed");
    return joint_cov(target, target) - stc.dot(ldlt.solve(stc));
}

}  // namespace fieldscan::oracle
