#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace stance {

// std::uniform_int_distribution and std::shuffle are implementation-defined, so
// sampling is done by hand on top of the (fully specified) mt19937_64 stream.
// This keeps partitions and upsampling byte-identical across standard libraries.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound);

    /// Fisher-Yates permutation of [0, n).
    std::vector<std::size_t> permutation(std::size_t n);

private:
    std::mt19937_64 engine_;
};

} // namespace stance
