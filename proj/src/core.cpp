#include "fieldscan/core.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace fieldscan {

Field::Field(int width, int height, Alphabet alphabet, double fill)
    : width_(width), height_(height), alphabet_(alphabet),
      values_(static_cast<std::size_t>(width) * height, fill) {
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("Field: dimensions must be positive");
}

Field::Field(int width, int height, Alphabet alphabet, std::vector<double> values)
    : width_(width), height_(height), alphabet_(alphabet), values_(std::move(values)) {
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("Field: dimensions must be positive");
    if (values_.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("Field: values length must equal width*height");
}

void Field::validate() const {
    if (alphabet_ == Alphabet::binary) {
        for (double v : values_)
            if (v != 0.0 && v != 1.0)
                throw std::invalid_argument("Field: binary field holds a non-{0,1} value");
    } else {
        for (double v : values_)
            if (!std::isfinite(v))
                throw std::invalid_argument("Field: real field holds a non-finite value");
    }
}

LossKind parse_loss_kind(const std::string& name) {
    if (name == "hamming") return LossKind::hamming;
    if (name == "squared") return LossKind::squared;
    throw std::invalid_argument("unknown loss kind: " + name);
}

std::string loss_kind_name(LossKind kind) {
    return kind == LossKind::hamming ? "hamming" : "squared";
}

double loss(LossKind kind, double x, double xhat) {
    switch (kind) {
        case LossKind::squared: {
            double d = x - xhat;
            return d * d;
        }
        case LossKind::hamming:
            if ((x != 0.0 && x != 1.0) || (xhat != 0.0 && xhat != 1.0))
                throw std::invalid_argument("hamming loss requires binary symbol and decision");
            return x == xhat ? 0.0 : 1.0;
    }
    throw std::invalid_argument("loss: bad kind");
}

TraceBuilder::TraceBuilder(std::int64_t expected_steps) {
    if (expected_steps > 0) {
        auto n = static_cast<std::size_t>(expected_steps);
        trace_.order.reserve(n);
        trace_.observations.reserve(n);
        trace_.estimates.reserve(n);
        trace_.step_losses.reserve(n);
    }
}

void TraceBuilder::add(Site site, double observation, double estimate, double step_loss) {
    trace_.order.push_back(site);
    trace_.observations.push_back(observation);
    trace_.estimates.push_back(estimate);
    trace_.step_losses.push_back(step_loss);
    // Neumaier update
    double sum = trace_.cumulative + step_loss;
    if (std::abs(trace_.cumulative) >= std::abs(step_loss))
        compensation_ += (trace_.cumulative - sum) + step_loss;
    else
        compensation_ += (step_loss - sum) + trace_.cumulative;
    trace_.cumulative = sum;
}

ScanTrace TraceBuilder::finish() {
    trace_.cumulative += compensation_;
    compensation_ = 0.0;
    return std::move(trace_);
}

double cumulative_loss(const ScanTrace& trace) {
    double sum = 0.0, comp = 0.0;
    for (double v : trace.step_losses) {
        double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    return sum + comp;
}

double normalized_loss(const ScanTrace& trace) {
    if (trace.order.empty()) return 0.0;
    return cumulative_loss(trace) / static_cast<double>(trace.order.size());
}

bool validate_scan_coverage(std::span<const Site> order, int width, int height) {
    const std::int64_t n = static_cast<std::int64_t>(width) * height;
    if (static_cast<std::int64_t>(order.size()) != n) return false;
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(n), 0);
    for (const Site& s : order) {
        if (s.row < 0 || s.row >= height || s.col < 0 || s.col >= width) return false;
        std::int64_t i = static_cast<std::int64_t>(s.row) * width + s.col;
        if (seen[static_cast<std::size_t>(i)]) return false;
        seen[static_cast<std::size_t>(i)] = 1;
    }
    return true;
}

void write_field(const Field& field, std::ostream& out) {
    out << field.width() << ' ' << field.height() << ' '
        << (field.alphabet() == Alphabet::binary ? "bin" : "real") << '\n';
    char buf[64];
    for (int r = 0; r < field.height(); ++r) {
        for (int c = 0; c < field.width(); ++c) {
            if (c) out << ' ';
            double v = field({r, c});
            if (field.alphabet() == Alphabet::binary) {
                out << (v == 0.0 ? '0' : '1');
            } else {
                std::snprintf(buf, sizeof buf, "%.17g", v);
                out << buf;
            }
        }
        out << '\n';
    }
}

void write_field(const Field& field, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("write_field: cannot open " + path);
    write_field(field, out);
}

Field read_field(std::istream& in) {
    int width = 0, height = 0;
    std::string alpha;
    if (!(in >> width >> height >> alpha))
        throw std::invalid_argument("read_field: bad header");
    Alphabet alphabet;
    if (alpha == "bin")
        alphabet = Alphabet::binary;
    else if (alpha == "real")
        alphabet = Alphabet::real;
    else
        throw std::invalid_argument("read_field: unknown alphabet '" + alpha + "'");
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("read_field: non-positive dimensions");
    std::vector<double> values(static_cast<std::size_t>(width) * height);
    for (auto& v : values)
        if (!(in >> v)) throw std::invalid_argument("read_field: truncated value list");
    Field f(width, height, alphabet, std::move(values));
    f.validate();
    return f;
}

Field read_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("read_field: cannot open " + path);
    return read_field(in);
}

}  // namespace fieldscan
