#include "itr/simple/config.hpp"

#include <cmath>

#include "itr/core/error.hpp"

namespace itr {

void TreeConfig::validate() const {
    if (max_depth < 1) throw ParameterError("tree max_depth must be >= 1");
    if (min_obs < 1) throw ParameterError("tree min_obs must be >= 1");
    if (!(min_gain >= 0.0)) throw ParameterError("tree min_gain must be >= 0");
}

void SgdConfig::validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
        throw ParameterError("SGD learning rate must be > 0");
    if (iterations < 1) throw ParameterError("SGD iterations must be >= 1");
    if (batch_size < 1) throw ParameterError("SGD batch size must be >= 1");
}

}  // namespace itr
