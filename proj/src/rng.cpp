#include "plsavw/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace plsavw {

std::vector<double> Rng::simplex(std::size_t dim) {
    // Normalized unit exponentials, i.e. a uniform point on the simplex.
    std::vector<double> out(dim);
    double total = 0.0;
    for (auto& v : out) {
        double u = uniform01();
        v = -std::log1p(-u);
        total += v;
    }
    for (auto& v : out)
        v /= total;
    return out;
}

std::size_t Rng::sample_discrete(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights)
        total += w;
    if (total <= 0.0)
        throw std::invalid_argument("sample_discrete: weights sum to zero");
    double r = uniform01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (r < acc)
            return i;
    }
    return weights.size() - 1;
}

}  // namespace plsavw
