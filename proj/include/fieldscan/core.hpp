#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fieldscan/errors.hpp"

namespace fieldscan {

enum class Alphabet { binary, real };

struct Site {
    int row = 0;
    int col = 0;
    friend bool operator==(const Site&, const Site&) = default;
};

// Rectangular 2-D data array, row-major, (row, col) addressing. Binary
// symbols are stored as 0.0/1.0 doubles so filtering decisions and soft
// predictions share one trace type. Immutable by convention after fill.
class Field {
  public:
    Field(int width, int height, Alphabet alphabet, double fill = 0.0);
    Field(int width, int height, Alphabet alphabet, std::vector<double> values);

    int width() const { return width_; }
    int height() const { return height_; }
    Alphabet alphabet() const { return alphabet_; }
    std::int64_t size() const { return static_cast<std::int64_t>(width_) * height_; }

    std::int64_t index(Site s) const { return static_cast<std::int64_t>(s.row) * width_ + s.col; }
    Site site(std::int64_t index) const {
        return {static_cast<int>(index / width_), static_cast<int>(index % width_)};
    }
    bool in_bounds(Site s) const {
        return s.row >= 0 && s.row < height_ && s.col >= 0 && s.col < width_;
    }

    double operator()(Site s) const { return values_[index(s)]; }
    double at_index(std::int64_t i) const { return values_[i]; }
    double& at_index(std::int64_t i) { return values_[i]; }
    void set(Site s, double v) { values_[index(s)] = v; }

    const std::vector<double>& values() const { return values_; }

    // Throws std::invalid_argument on a binary field holding non-{0,1} values.
    void validate() const;

  private:
    int width_;
    int height_;
    Alphabet alphabet_;
    std::vector<double> values_;
};

enum class LossKind { hamming, squared };

LossKind parse_loss_kind(const std::string& name);
std::string loss_kind_name(LossKind kind);

// Instantaneous loss l(x, xhat). Hamming requires binary arguments.
double loss(LossKind kind, double x, double xhat);

// Ordered record of one scan: visited sites, observations, estimates,
// per-step and cumulative losses. cumulative is maintained with compensated
// summation so it matches sum(step_losses) to 1e-12 relative even for long
// real-valued runs.
struct ScanTrace {
    std::vector<Site> order;
    std::vector<double> observations;
    std::vector<double> estimates;
    std::vector<double> step_losses;
    double cumulative = 0.0;

    std::int64_t steps() const { return static_cast<std::int64_t>(order.size()); }
};

// Incremental trace construction with Neumaier-compensated accumulation.
class TraceBuilder {
  public:
    explicit TraceBuilder(std::int64_t expected_steps = 0);
    void add(Site site, double observation, double estimate, double step_loss);
    ScanTrace finish();

  private:
    ScanTrace trace_;
    double compensation_ = 0.0;
};

// Sum of step losses (compensated); empty trace -> 0.
double cumulative_loss(const ScanTrace& trace);
double normalized_loss(const ScanTrace& trace);

// True iff `order` visits each of the width*height sites exactly once.
bool validate_scan_coverage(std::span<const Site> order, int width, int height);

// Field text format: first line "width height bin|real", then height lines
// of width whitespace-separated values. Binary round-trips bit-exactly;
// reals are written with 17 significant digits.
void write_field(const Field& field, std::ostream& out);
void write_field(const Field& field, const std::string& path);
Field read_field(std::istream& in);
Field read_field(const std::string& path);

}  // namespace fieldscan
