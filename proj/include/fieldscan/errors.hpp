#pragma once

#include <stdexcept>
#include <string>

namespace fieldscan {

// Scanner asked for a site after every site was visited.
struct ExhaustedScan : std::logic_error {
    explicit ExhaustedScan(const std::string& what) : std::logic_error(what) {}
};

// A requested rate/level lies outside the range a bound can certify.
struct NoFeasibleBound : std::runtime_error {
    explicit NoFeasibleBound(const std::string& what) : std::runtime_error(what) {}
};

// Exact-enumeration oracles refuse instances above their hard size caps.
struct SizeCapExceeded : std::invalid_argument {
    explicit SizeCapExceeded(const std::string& what) : std::invalid_argument(what) {}
};

// Invalid model object (non-PSD covariance, bad probability table, ...).
struct ModelError : std::runtime_error {
    explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

// Spectral density vanishes on a non-null set; log-integral diverges.
struct DegenerateSpectrum : std::runtime_error {
    explicit DegenerateSpectrum(const std::string& what) : std::runtime_error(what) {}
};

// Quadrature / factorization failed to reach its accuracy target.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Experiment configuration references unknown components or bad values.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fieldscan
