#pragma once

#include "delayoc/solve.hpp"

#include <optional>
#include <vector>

namespace delayoc {

/// Step control for the march along s * target, s in [0, 1].
struct ContinuationConfig {
    double initialStepFraction = 1.0;
    double minStepFraction = 1e-4;
    double growFactor = 2.0;
    int growThreshold = 5;         // grow after a step needing at most this many Newton iterations
    int kMax = 100;                // corrector calls

    void validate() const;
};

struct TraceRecord {
    DelayPair tau;
    int newtonIterations = 0;
    double residualNorm = 0.0;
    double cost = 0.0;
    bool stepAccepted = false;
};

struct ContinuationTrace {
    std::vector<TraceRecord> records;

    /// Accepted steps, i.e. solved intermediate problems (the continuation iteration count).
    int accepted() const;
    int attempts() const { return static_cast<int>(records.size()); }
};

struct ContinuationResult {
    Extremal extremal;
    ContinuationTrace trace;
};

class ContinuationAborted : public Error {
public:
    ContinuationAborted(const std::string& what, Extremal lastGood, ContinuationTrace trace)
        : Error(what), lastGood_(std::move(lastGood)), trace_(std::move(trace))
    {}
    const Extremal& lastGood() const { return lastGood_; }
    const ContinuationTrace& trace() const { return trace_; }

private:
    Extremal lastGood_;
    ContinuationTrace trace_;
};

/// Direct solve used only to seed the undelayed shooting problem: classical
/// Runge-Kutta with piecewise-linear controls, gradient descent on the exact
/// discrete gradient.
struct DirectSeedConfig {
    int controlRefinement = 4;   // control intervals per solver interval
    int substeps = 2;            // Runge-Kutta steps per control interval
    int adjointRefinement = 4;   // fine intervals per control interval for the adjoint sweep
    int maxIter = 20000;
    double gradTol = 1e-8;       // stop when the largest gradient entry is below this
    double ladderRatio = 1.41;   // grid coarsening factor between successive shooting solves

    void validate() const;
};

/// Cost of the Runge-Kutta transcription on `grid` with control node values U
/// (one row per node) and its exact gradient.
double directCostGradient(const ProblemDef& prob, const Grid& grid, int substeps,
                          const NodeMatrix& U, NodeMatrix& grad);

/// Adjoint of the direct solution, from one backward sweep with p(T) = 0 on a
/// refined grid, sampled at the nodes of the `intervals` grid. Fixed-horizon,
/// free-endpoint problems only.
DenseTrajectory directSeedAdjoint(const ProblemDef& prob, int intervals,
                                  const DirectSeedConfig& dcfg = {});

/// Even grid sizes from intervals * controlRefinement down to `intervals`.
std::vector<int> seedLadder(int intervals, const DirectSeedConfig& dcfg = {});

/// Undelayed shooting solves along seedLadder, the finest seeded by
/// directSeedAdjoint and each coarser one by its predecessor's adjoint.
SolveResult solveFromDirectSeed(const ProblemDef& prob, const SolverConfig& cfg,
                                const DirectSeedConfig& dcfg = {});

enum class BootstrapSeed { Zero, Supplied, Direct };
const char* toString(BootstrapSeed seed);

struct BootstrapResult {
    Extremal extremal;
    SolveStats stats;
    BootstrapSeed seed = BootstrapSeed::Zero;
};

/// Undelayed solve with the previous state set to the constant initial value.
/// Seeded by `initialAdjoint` when given; otherwise by p = 0, falling back to
/// solveFromDirectSeed when that does not converge.
BootstrapResult solveUndelayed(const ProblemDef& prob, const SolverConfig& cfg,
                               const std::optional<DenseTrajectory>& initialAdjoint = std::nullopt);

/// Marches the delay from the start extremal's tau to `target` along a straight
/// segment, warm-starting each corrector with the previous adjoint and state.
ContinuationResult continueFrom(const ProblemDef& prob, const Extremal& start, DelayPair target,
                                const SolverConfig& cfg, const ContinuationConfig& ccfg);

/// Bootstrap at tau = 0, then continueFrom(...) to `target`.
ContinuationResult continuationRun(const ProblemDef& prob, DelayPair target, const SolverConfig& cfg,
                                   const ContinuationConfig& ccfg);

struct ProbeEntry {
    DelayPair tau;
    double stateDistance = 0.0;     // node sup-norm of x_tau - x_0
    double adjointDistance = 0.0;   // node sup-norm of p_tau - p_0
    double cost = 0.0;
};

/// Solves at each delay (continuing from the undelayed solution) and reports
/// the distance of the state and adjoint to the undelayed ones.
std::vector<ProbeEntry> continuityProbe(const ProblemDef& prob, const std::vector<DelayPair>& taus,
                                        const SolverConfig& cfg,
                                        const ContinuationConfig& ccfg = {});

}  // namespace delayoc
