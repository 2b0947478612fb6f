#pragma once

#include <cstdint>
#include <string>

#include "fieldscan/core.hpp"

namespace fieldscan {

// Memoryless corruption: BSC with crossover delta < 1/2 on binary fields,
// AWGN with per-site variance sigma_n^2 on real (or binary-valued-as-real)
// fields. Immutable value object.
struct Channel {
    enum class Kind { bsc, awgn };
    Kind kind = Kind::bsc;
    double delta = 0.0;           // bsc only
    double noise_variance = 0.0;  // awgn only

    static Channel bsc(double delta);
    static Channel awgn(double noise_variance);
};

Channel parse_channel(const std::string& kind, double param);

// Per-site noise is derived by hashing (seed, site index), so the output is
// independent of evaluation order and deterministic across platforms.
Field corrupt(const Channel& channel, const Field& clean, std::uint64_t seed);

// h(y) = (y - delta) / (1 - 2 delta); satisfies E[h(Y) | X=x] = x.
double unbiased_estimate_bsc(double y, double delta);

enum class ModifiedLossKind { hamming_bsc, squared_additive };

// Modified loss rho with E{rho(Y,F) | sigma(X)} = l(X,F):
//   squared_additive: (y-F)^2 - sigma_v^2
//   hamming_bsc:      (l_H(y,F) - delta) / (1 - 2 delta)
double modified_loss(ModifiedLossKind kind, double y, double f, double param);

}  // namespace fieldscan
