#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fieldscan/core.hpp"

namespace fieldscan {

// Observation history handed to scanners and estimators. Scanners and
// estimators only ever see noisy observations of already-visited sites;
// clean values are structurally out of reach.
class ScanHistory {
  public:
    ScanHistory(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }
    std::int64_t total_sites() const { return static_cast<std::int64_t>(width_) * height_; }
    std::int64_t steps() const { return static_cast<std::int64_t>(order_.size()); }

    const std::vector<Site>& order() const { return order_; }
    const std::vector<double>& observations() const { return observations_; }

    bool revealed(std::int64_t site_index) const { return revealed_[static_cast<std::size_t>(site_index)]; }
    double value_at(std::int64_t site_index) const { return value_[static_cast<std::size_t>(site_index)]; }
    std::int64_t site_index(Site s) const { return static_cast<std::int64_t>(s.row) * width_ + s.col; }

    void push(Site site, double observation);

  private:
    int width_;
    int height_;
    std::vector<Site> order_;
    std::vector<double> observations_;
    std::vector<std::uint8_t> revealed_;
    std::vector<double> value_;
};

// Scan-order policy: maps the observation history to the next unvisited
// site. Single-run, single-owner state machine; make one per trial.
class Scanner {
  public:
    virtual ~Scanner() = default;
    virtual Site next_site(const ScanHistory& history) = 0;
    virtual bool data_dependent() const { return false; }
    virtual std::string name() const = 0;
};

std::unique_ptr<Scanner> make_raster_scanner(int width, int height);
std::unique_ptr<Scanner> make_snake_scanner(int width, int height);
// Hilbert order on the enclosing power-of-two square with out-of-bounds
// sites skipped; unit l1 adjacency holds on power-of-two squares.
std::unique_ptr<Scanner> make_hilbert_scanner(int width, int height);
std::unique_ptr<Scanner> make_random_scanner(int width, int height, std::uint64_t seed);
// First pass visits row-extended indices i with i % (k+1) != k (k scanned,
// one skipped), second pass fills the holes; both passes in raster order.
std::unique_ptr<Scanner> make_odds_then_evens_scanner(int width, int height, int k);
// 2-D checkerboard variant: (row+col) even first, then odd.
std::unique_ptr<Scanner> make_checkerboard_scanner(int width, int height);
// Data-dependent example policy: next site is the unvisited 4-neighbour of
// the visited site with the most extreme observation (|y - 1/2|), ties and
// isolation broken lexicographically.
std::unique_ptr<Scanner> make_greedy_extreme_scanner(int width, int height);
// Wraps an explicit order (must be coverage-valid).
std::unique_ptr<Scanner> make_fixed_order_scanner(int width, int height, std::vector<Site> order);

// Spec strings: raster | snake | hilbert | random:SEED | ote:K | checker | greedy
std::unique_ptr<Scanner> make_scanner(const std::string& spec, int width, int height);

// Materializes the full visiting order of `scanner` on the given noisy
// field (observations are fed back so data-dependent policies resolve).
std::vector<Site> scan_order(Scanner& scanner, const Field& noisy);

}  // namespace fieldscan
