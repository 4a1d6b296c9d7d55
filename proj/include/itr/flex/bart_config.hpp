#pragma once

#include <cstddef>

namespace itr {

struct BartConfig {
    int num_trees = 200;
    double base = 0.95;  // alpha: split probability at the root
    double power = 2.0;  // beta: decay with depth
    double k = 2.0;      // leaf prior sd is 3 / (k sqrt(m)) on the latent scale
    int iterations = 1100;
    int burn_in = 100;
    double p_grow = 0.28;
    double p_prune = 0.28;
    double p_change = 0.44;
    // Proposals that leave a leaf with fewer rows than this are rejected.
    std::size_t min_leaf_obs = 5;

    static BartConfig paper() { return {}; }
    // Smaller ensemble and chain for replicate studies on a workstation.
    static BartConfig desk();

    int retained() const noexcept { return iterations - burn_in; }
    void validate() const;

    friend bool operator==(const BartConfig&, const BartConfig&) = default;
};

// alpha (1 + depth)^(-beta)
double split_prior_prob(double base, double power, int depth);
inline double split_prior_prob(const BartConfig& c, int depth) {
    return split_prior_prob(c.base, c.power, depth);
}

}  // namespace itr
