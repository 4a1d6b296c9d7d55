#pragma once

#include <cstddef>
#include <cstdint>

namespace itr {

struct TreeConfig {
    int max_depth = 2;
    // A split is admissible only if both children hold strictly more rows than this.
    std::size_t min_obs = 5;
    // Splits must improve the objective by strictly more than this.
    double min_gain = 1e-9;

    void validate() const;
};

struct SgdConfig {
    double learning_rate = 0.01;
    int iterations = 1000;  // passes over the shuffled rows
    std::size_t batch_size = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

}  // namespace itr
