#include "itr/flex/bart_config.hpp"

#include <cmath>

#include "itr/core/error.hpp"

namespace itr {

BartConfig BartConfig::desk() {
    BartConfig c;
    c.num_trees = 50;
    c.iterations = 600;
    c.burn_in = 100;
    return c;
}

void BartConfig::validate() const {
    if (num_trees < 1) throw ParameterError("BART needs at least one tree");
    if (!(base > 0.0 && base < 1.0)) throw ParameterError("BART base must lie in (0, 1)");
    if (!(power >= 0.0)) throw ParameterError("BART power must be >= 0");
    if (!(k > 0.0) || !std::isfinite(k)) throw ParameterError("BART k must be > 0");
    if (burn_in < 0) throw ParameterError("BART burn-in must be >= 0");
    if (iterations <= burn_in) throw ParameterError("BART iterations must exceed burn-in");
    if (!(p_grow > 0.0 && p_prune > 0.0 && p_change >= 0.0) ||
        std::abs(p_grow + p_prune + p_change - 1.0) > 1e-9)
        throw ParameterError("BART move probabilities must be positive and sum to 1");
    if (min_leaf_obs < 1) throw ParameterError("BART min_leaf_obs must be >= 1");
}

double split_prior_prob(double base, double power, int depth) {
    return base * std::pow(1.0 + depth, -power);
}

}  // namespace itr
