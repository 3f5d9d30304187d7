#pragma once

#include "delayoc/integrate.hpp"

#include <functional>
#include <string>

namespace delayoc {

enum class SolveMode { Newton, Picard };

struct SolverConfig {
    int intervals = 50;            // N, even; the grid has N + 1 nodes
    double newtonTol = 1e-10;      // on the infinity norm of the residual
    int newtonMaxIter = 1500;
    double innerEps = 1e-8;        // C0 tolerance of the outer adjoint/state iteration
    int innerMaxIter = 50;
    double fdStep = 1e-7;          // relative forward-difference step
    SolveMode mode = SolveMode::Newton;
    bool parallelJacobian = false; // OpenMP column evaluation; bitwise identical to serial

    void validate() const;
};

enum class NewtonStatus { Converged, Stalled, MaxIter, NonFinite };
const char* toString(NewtonStatus s);

struct NewtonReport {
    int iterations = 0;
    double finalResidualNorm = 0.0;
    NewtonStatus status = NewtonStatus::Stalled;
    int residualEvaluations = 0;
};

using ResidualFn = std::function<Vec(const Vec&)>;

/// The shooting unknown at one delay pair: adjoint guess values at every node,
/// plus the horizon when the final time is free. The residual is the defect
/// between the adjoint produced by one (forward, backward) sweep pair and the
/// guess, with the terminal block replaced by the boundary conditions.
class ShootingState {
public:
    ShootingState(const ProblemDef& prob, DelayPair tau, int intervals, DenseTrajectory prevX);

    int size() const;
    int intervals() const { return N_; }
    const ProblemDef& problem() const { return *prob_; }
    DelayPair tau() const { return tau_; }
    const DenseTrajectory& prevX() const { return prevX_; }

    /// Samples `p` at the nodes of the grid on [0, T].
    Vec pack(const DenseTrajectory& p, double T) const;
    double horizon(const Vec& z) const;
    Grid gridFor(const Vec& z) const;
    /// Adjoint guess with node values from z and finite-difference slopes.
    DenseTrajectory adjointGuess(const Vec& z) const;
    Vec terminalAdjoint(const Vec& z) const;

    /// Throws SweepError (or Error for an invalid horizon) on failure.
    Vec residual(const Vec& z) const;
    /// Non-throwing wrapper: failures become NaN vectors.
    ResidualFn residualFn() const;

    /// Final sweeps at z, packaged as an extremal with its cost.
    Extremal rebuild(const Vec& z) const;

private:
    const ProblemDef* prob_;
    DelayPair tau_;
    int N_;
    DenseTrajectory prevX_;
};

/// Forward-difference Jacobian, one column at a time (serial reference).
Mat fdJacobian(const ResidualFn& F, const Vec& z, double fdStep);
Mat fdJacobian(const ResidualFn& F, const Vec& z, const Vec& Fz, double fdStep);
/// Same columns evaluated concurrently with OpenMP. F must be safe to call
/// from several threads.
Mat fdJacobianParallel(const ResidualFn& F, const Vec& z, const Vec& Fz, double fdStep);

struct NewtonResult {
    Vec z;
    NewtonReport report;
};

/// Damped Newton: dense LU with partial pivoting on a fresh finite-difference
/// Jacobian each iteration, step halving (at most 8 times) until the residual
/// infinity norm decreases.
NewtonResult newtonSolve(const ResidualFn& F, Vec z0, const SolverConfig& cfg);

struct PicardReport {
    int iterations = 0;
    double lastDifference = 0.0;
    bool converged = false;
    bool diverged = false;
};

struct PicardResult {
    Extremal extremal;
    PicardReport report;
};

/// Plain successive substitution of the sweep pair, refreshing both the
/// adjoint guess and the previous state each pass. Requires a fixed horizon and
/// a free endpoint.
PicardResult picardIterate(const ShootingState& s, const DenseTrajectory& p0,
                           const SolverConfig& cfg);

struct SolveStats {
    int newtonIterations = 0;
    int outerIterations = 0;
    double residualNorm = 0.0;
    NewtonStatus status = NewtonStatus::Converged;
};

struct SolveResult {
    Extremal extremal;
    SolveStats stats;
};

class SolveFailure : public Error {
public:
    SolveFailure(const std::string& what, SolveStats stats) : Error(what), stats_(stats) {}
    const SolveStats& stats() const { return stats_; }

private:
    SolveStats stats_;
};

/// Solves the delayed boundary-value system at `tau`, seeded by the adjoint
/// `initGuess` and the previous state `prevX`. Throws SolveFailure unless the
/// result is converged.
SolveResult solveAtDelay(const ProblemDef& prob, DelayPair tau, const DenseTrajectory& initGuess,
                         const DenseTrajectory& prevX, const SolverConfig& cfg);

}  // namespace delayoc
