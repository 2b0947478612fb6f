#include "fieldscan/scanners.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "fieldscan/errors.hpp"
#include "fieldscan/rng.hpp"

namespace fieldscan {

ScanHistory::ScanHistory(int width, int height)
    : width_(width), height_(height),
      revealed_(static_cast<std::size_t>(width) * height, 0),
      value_(static_cast<std::size_t>(width) * height, 0.0) {
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("ScanHistory: dimensions must be positive");
    order_.reserve(revealed_.size());
    observations_.reserve(revealed_.size());
}

void ScanHistory::push(Site site, double observation) {
    std::int64_t i = site_index(site);
    order_.push_back(site);
    observations_.push_back(observation);
    revealed_[static_cast<std::size_t>(i)] = 1;
    value_[static_cast<std::size_t>(i)] = observation;
}

namespace {

class FixedOrderScanner : public Scanner {
  public:
    FixedOrderScanner(std::string name, std::vector<Site> order)
        : name_(std::move(name)), order_(std::move(order)) {}

    Site next_site(const ScanHistory& history) override {
        auto t = static_cast<std::size_t>(history.steps());
        if (t >= order_.size())
            throw ExhaustedScan(name_ + ": next_site called after scan completion");
        return order_[t];
    }
    std::string name() const override { return name_; }

  private:
    std::string name_;
    std::vector<Site> order_;
};

std::vector<Site> raster_order(int w, int h) {
    std::vector<Site> order;
    order.reserve(static_cast<std::size_t>(w) * h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) order.push_back({r, c});
    return order;
}

std::vector<Site> snake_order(int w, int h) {
    std::vector<Site> order;
    order.reserve(static_cast<std::size_t>(w) * h);
    for (int r = 0; r < h; ++r) {
        if (r % 2 == 0)
            for (int c = 0; c < w; ++c) order.push_back({r, c});
        else
            for (int c = w - 1; c >= 0; --c) order.push_back({r, c});
    }
    return order;
}

// Standard Hilbert curve index -> (x, y) on an n x n power-of-two square.
void hilbert_d2xy(std::int64_t n, std::int64_t t, std::int64_t& x, std::int64_t& y) {
    x = y = 0;
    for (std::int64_t s = 1; s < n; s <<= 1) {
        std::int64_t rx = 1 & (t / 2);
        std::int64_t ry = 1 & (t ^ rx);
        if (ry == 0) {
            if (rx == 1) {
                x = s - 1 - x;
                y = s - 1 - y;
            }
            std::swap(x, y);
        }
        x += s * rx;
        y += s * ry;
        t /= 4;
    }
}

std::vector<Site> hilbert_order(int w, int h) {
    std::int64_t n = 1;
    while (n < w || n < h) n <<= 1;
    std::vector<Site> order;
    order.reserve(static_cast<std::size_t>(w) * h);
    for (std::int64_t t = 0; t < n * n; ++t) {
        std::int64_t x, y;
        hilbert_d2xy(n, t, x, y);
        if (x < w && y < h) order.push_back({static_cast<int>(y), static_cast<int>(x)});
    }
    return order;
}

std::vector<Site> random_order(int w, int h, std::uint64_t seed) {
    std::vector<Site> order = raster_order(w, h);
    SequentialRng rng(seed, RngStream::scanner);
    for (std::size_t i = order.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(order[i - 1], order[j]);
    }
    return order;
}

std::vector<Site> ote_order(int w, int h, int k) {
    if (k < 1) throw std::invalid_argument("odds-then-evens: k must be >= 1");
    const std::int64_t n = static_cast<std::int64_t>(w) * h;
    std::vector<Site> order;
    order.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i)
        if (i % (k + 1) != k) order.push_back({static_cast<int>(i / w), static_cast<int>(i % w)});
    for (std::int64_t i = k; i < n; i += k + 1)
        order.push_back({static_cast<int>(i / w), static_cast<int>(i % w)});
    return order;
}

std::vector<Site> checkerboard_order(int w, int h) {
    std::vector<Site> order;
    order.reserve(static_cast<std::size_t>(w) * h);
    for (int pass = 0; pass < 2; ++pass)
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c)
                if ((r + c) % 2 == pass) order.push_back({r, c});
    return order;
}

class GreedyExtremeScanner : public Scanner {
  public:
    GreedyExtremeScanner(int width, int height) : width_(width), height_(height) {}

    Site next_site(const ScanHistory& history) override {
        if (history.steps() >= history.total_sites())
            throw ExhaustedScan("greedy: next_site called after scan completion");
        if (history.steps() == 0) return {0, 0};
        Site best{-1, -1};
        double best_score = -1.0;
        const int dr[4] = {-1, 1, 0, 0};
        const int dc[4] = {0, 0, -1, 1};
        for (const Site& v : history.order()) {
            double score = std::abs(history.value_at(history.site_index(v)) - 0.5);
            for (int d = 0; d < 4; ++d) {
                Site s{v.row + dr[d], v.col + dc[d]};
                if (s.row < 0 || s.row >= height_ || s.col < 0 || s.col >= width_) continue;
                if (history.revealed(history.site_index(s))) continue;
                if (score > best_score ||
                    (score == best_score &&
                     (s.row < best.row || (s.row == best.row && s.col < best.col)))) {
                    best = s;
                    best_score = score;
                }
            }
        }
        if (best.row >= 0) return best;
        // No unvisited neighbour of any visited site: lexicographically-first hole.
        for (int r = 0; r < height_; ++r)
            for (int c = 0; c < width_; ++c)
                if (!history.revealed(history.site_index({r, c}))) return {r, c};
        throw ExhaustedScan("greedy: no unvisited site");
    }
    bool data_dependent() const override { return true; }
    std::string name() const override { return "greedy"; }

  private:
    int width_;
    int height_;
};

}  // namespace

std::unique_ptr<Scanner> make_raster_scanner(int w, int h) {
    return std::make_unique<FixedOrderScanner>("raster", raster_order(w, h));
}
std::unique_ptr<Scanner> make_snake_scanner(int w, int h) {
    return std::make_unique<FixedOrderScanner>("snake", snake_order(w, h));
}
std::unique_ptr<Scanner> make_hilbert_scanner(int w, int h) {
    return std::make_unique<FixedOrderScanner>("hilbert", hilbert_order(w, h));
}
std::unique_ptr<Scanner> make_random_scanner(int w, int h, std::uint64_t seed) {
    return std::make_unique<FixedOrderScanner>("random:" + std::to_string(seed),
                                               random_order(w, h, seed));
}
std::unique_ptr<Scanner> make_odds_then_evens_scanner(int w, int h, int k) {
    return std::make_unique<FixedOrderScanner>("ote:" + std::to_string(k), ote_order(w, h, k));
}
std::unique_ptr<Scanner> make_checkerboard_scanner(int w, int h) {
    return std::make_unique<FixedOrderScanner>("checker", checkerboard_order(w, h));
}
std::unique_ptr<Scanner> make_greedy_extreme_scanner(int w, int h) {
    return std::make_unique<GreedyExtremeScanner>(w, h);
}
std::unique_ptr<Scanner> make_fixed_order_scanner(int w, int h, std::vector<Site> order) {
    if (!validate_scan_coverage(order, w, h))
        throw std::invalid_argument("fixed-order scanner: order is not a coverage-valid permutation");
    return std::make_unique<FixedOrderScanner>("fixed", std::move(order));
}

std::unique_ptr<Scanner> make_scanner(const std::string& spec, int width, int height) {
    auto colon = spec.find(':');
    std::string kind = spec.substr(0, colon);
    std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (kind == "raster") return make_raster_scanner(width, height);
    if (kind == "snake") return make_snake_scanner(width, height);
    if (kind == "hilbert") return make_hilbert_scanner(width, height);
    if (kind == "checker") return make_checkerboard_scanner(width, height);
    if (kind == "greedy") return make_greedy_extreme_scanner(width, height);
    if (kind == "random")
        return make_random_scanner(width, height, arg.empty() ? 0 : std::stoull(arg));
    if (kind == "ote")
        return make_odds_then_evens_scanner(width, height, arg.empty() ? 1 : std::stoi(arg));
    throw std::invalid_argument("unknown scanner spec: " + spec);
}

std::vector<Site> scan_order(Scanner& scanner, const Field& noisy) {
    ScanHistory history(noisy.width(), noisy.height());
    std::vector<Site> order;
    order.reserve(static_cast<std::size_t>(noisy.size()));
    for (std::int64_t t = 0; t < noisy.size(); ++t) {
        Site s = scanner.next_site(history);
        order.push_back(s);
        history.push(s, noisy(s));
    }
    return order;
}

}  // namespace fieldscan
