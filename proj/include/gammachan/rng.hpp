#pragma once

#include <cstdint>

namespace gammachan {

// Counter-based generator: every output is a hash of (key, counter), the key
// being derived from (seed, stream). Streams are independent and a batch is
// reproducible from (seed, stream) alone, regardless of what other streams do.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64();
    double uniform();   // (0, 1)
    double normal();    // N(0, 1), Box-Muller with pair cache
    double gamma(double shape, double rate);  // shape > 0, rate > 0

private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

}  // namespace gammachan
