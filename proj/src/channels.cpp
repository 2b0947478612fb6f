#include "fieldscan/channels.hpp"

#include <cmath>

#include "fieldscan/rng.hpp"

namespace fieldscan {

Channel Channel::bsc(double delta) {
    if (!(delta >= 0.0 && delta < 0.5))
        throw std::invalid_argument("Channel::bsc: delta must lie in [0, 0.5)");
    Channel c;
    c.kind = Kind::bsc;
    c.delta = delta;
    return c;
}

Channel Channel::awgn(double noise_variance) {
    if (!(noise_variance >= 0.0))
        throw std::invalid_argument("Channel::awgn: noise variance must be >= 0");
    Channel c;
    c.kind = Kind::awgn;
    c.noise_variance = noise_variance;
    return c;
}

Channel parse_channel(const std::string& kind, double param) {
    if (kind == "bsc") return Channel::bsc(param);
    if (kind == "awgn") return Channel::awgn(param);
    throw std::invalid_argument("unknown channel kind: " + kind);
}

Field corrupt(const Channel& channel, const Field& clean, std::uint64_t seed) {
    CounterRng rng(seed, RngStream::channel);
    if (channel.kind == Channel::Kind::bsc) {
        if (clean.alphabet() != Alphabet::binary)
            throw std::invalid_argument("corrupt: BSC requires a binary field");
        Field out(clean.width(), clean.height(), Alphabet::binary, clean.values());
        const std::int64_t n = clean.size();
        for (std::int64_t i = 0; i < n; ++i) {
            if (rng.uniform(static_cast<std::uint64_t>(i)) < channel.delta)
                out.at_index(i) = 1.0 - out.at_index(i);
        }
        return out;
    }
    // AWGN: output alphabet is real regardless of the input alphabet.
    Field out(clean.width(), clean.height(), Alphabet::real, clean.values());
    const double sigma = std::sqrt(channel.noise_variance);
    const std::int64_t n = clean.size();
    for (std::int64_t i = 0; i < n; ++i)
        out.at_index(i) += sigma * rng.normal(static_cast<std::uint64_t>(i));
    return out;
}

double unbiased_estimate_bsc(double y, double delta) {
    if (!(delta >= 0.0 && delta < 0.5))
        throw std::invalid_argument("unbiased_estimate_bsc: channel not invertible (delta >= 1/2)");
    return (y - delta) / (1.0 - 2.0 * delta);
}

double modified_loss(ModifiedLossKind kind, double y, double f, double param) {
    switch (kind) {
        case ModifiedLossKind::squared_additive: {
            double d = y - f;
            return d * d - param;
        }
        case ModifiedLossKind::hamming_bsc: {
            if (!(param >= 0.0 && param < 0.5))
                throw std::invalid_argument("modified_loss: delta must lie in [0, 0.5)");
            double lh = (y == f) ? 0.0 : 1.0;
            return (lh - param) / (1.0 - 2.0 * param);
        }
    }
    throw std::invalid_argument("modified_loss: bad kind");
}

}  // namespace fieldscan
