#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace plsavw {

/// Deterministic random helpers on top of mt19937_64. Distributions are
/// hand-rolled so sequences do not depend on the standard library vendor.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform draw in [0, 1).
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n).
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(uniform01() * static_cast<double>(n));
    }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Uniform draw from the probability simplex of the given dimension.
    std::vector<double> simplex(std::size_t dim);

    /// Index sampled from an (unnormalized) nonnegative weight vector.
    std::size_t sample_discrete(const std::vector<double>& weights);

private:
    std::mt19937_64 engine_;
};

}  // namespace plsavw
