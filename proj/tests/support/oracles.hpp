#pragma once

#include "delayoc/solve.hpp"

#include <vector>

namespace delayoc::testing {

struct CollocationResult {
    double cost = 0.0;
    NodeMatrix controls;      // one row per control interval
    int iterations = 0;
    double gradientNorm = 0.0;
};

// Direct method for the undelayed problem, written without any of the
// library's integrators: piecewise-constant controls, classical RK4 on the
// state augmented with the running cost, central-difference gradient,
// Barzilai-Borwein steps with backtracking.
CollocationResult directCollocation(const ProblemDef& prob, int controlIntervals, int substeps = 4,
                                    int maxIter = 4000, double gradTol = 1e-8);

// Central differences with step h * max(1, |z_j|) per column.
Mat centralJacobian(const ResidualFn& F, const Vec& z, double h = 1e-5);

}  // namespace delayoc::testing
