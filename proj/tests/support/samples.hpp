#pragma once

#include "delayoc/model.hpp"

#include <random>
#include <vector>

namespace delayoc::testing {

// Uniform random evaluation points for derivative checks, fixed seed.
inline std::vector<SamplePoint> randomSamples(const ProblemDef& prob, int count, unsigned seed = 7,
                                              double lo = -1.0, double hi = 1.0)
{
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> d(lo, hi), time(0.0, prob.horizonGuess());
    auto vec = [&](int n) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = d(gen);
        return v;
    };
    std::vector<SamplePoint> out;
    for (int i = 0; i < count; ++i) out.push_back({time(gen), vec(prob.n), vec(prob.n), vec(prob.m), vec(prob.m)});
    return out;
}

}  // namespace delayoc::testing
