#include "delayoc/homotopy.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace delayoc {

void ContinuationConfig::validate() const
{
    if (!(minStepFraction > 0) || !(minStepFraction < initialStepFraction) ||
        !(initialStepFraction <= 1.0) || !(growFactor >= 1.0) || growThreshold < 0 || kMax < 1)
        throw Error("continuation configuration: need 0 < minStep < initialStep <= 1, "
                    "growFactor >= 1 and kMax >= 1");
}

int ContinuationTrace::accepted() const
{
    return static_cast<int>(std::count_if(records.begin(), records.end(),
                                          [](const TraceRecord& r) { return r.stepAccepted; }));
}

const char* toString(BootstrapSeed seed)
{
    switch (seed) {
    case BootstrapSeed::Zero: return "zero";
    case BootstrapSeed::Supplied: return "supplied";
    case BootstrapSeed::Direct: return "direct";
    }
    return "?";
}

BootstrapResult solveUndelayed(const ProblemDef& prob, const SolverConfig& cfg,
                               const std::optional<DenseTrajectory>& initialAdjoint)
{
    const Grid grid(0.0, prob.horizonGuess(), cfg.intervals);
    const DenseTrajectory x0 =
        DenseTrajectory::constant(grid, prob.historyState(0.0), prob.stateHistory());
    auto attempt = [&](const DenseTrajectory& p0, BootstrapSeed seed) {
        SolveResult r = solveAtDelay(prob, DelayPair{}, p0, x0, cfg);
        return BootstrapResult{std::move(r.extremal), r.stats, seed};
    };

    if (initialAdjoint) {
        try {
            return attempt(*initialAdjoint, BootstrapSeed::Supplied);
        } catch (const SolveFailure& e) {
            throw SolveFailure(fmt::format("undelayed problem did not converge from the supplied "
                                           "adjoint guess ({}); supply a better initial adjoint file",
                                           e.what()),
                               e.stats());
        }
    }

    std::string zeroFailure;
    try {
        return attempt(DenseTrajectory::constant(grid, Vec::Zero(prob.n),
                                                 History::zero(prob.n, -prob.maxDelay)),
                       BootstrapSeed::Zero);
    } catch (const SolveFailure& e) {
        zeroFailure = e.what();
    }
    try {
        SolveResult r = solveFromDirectSeed(prob, cfg);
        return {std::move(r.extremal), r.stats, BootstrapSeed::Direct};
    } catch (const Error& e) {
        throw SolveFailure(fmt::format("undelayed problem did not converge from the zero adjoint "
                                       "guess ({}) nor from the direct-method seed ({}); supply an "
                                       "initial adjoint file",
                                       zeroFailure, e.what()),
                           SolveStats{0, 0, 0.0, NewtonStatus::Stalled});
    }
}

ContinuationResult continueFrom(const ProblemDef& prob, const Extremal& start, DelayPair target,
                                const SolverConfig& cfg, const ContinuationConfig& ccfg)
{
    ccfg.validate();
    if (target.state < 0 || target.control < 0 || target.state > prob.maxDelay + 1e-12 ||
        target.control > prob.maxDelay + 1e-12)
        throw Error(fmt::format("target delays ({}, {}) outside [0, {}]", target.state,
                                target.control, prob.maxDelay));

    ContinuationTrace trace;
    Extremal current = start;
    const DelayPair origin = start.tau;
    if (origin == target)
        return {std::move(current), std::move(trace)};

    auto along = [&](double s) {
        return DelayPair{origin.state + s * (target.state - origin.state),
                         origin.control + s * (target.control - origin.control)};
    };

    double s = 0.0;
    double step = ccfg.initialStepFraction;
    int calls = 0;
    while (s < 1.0) {
        if (calls >= ccfg.kMax)
            throw ContinuationAborted(fmt::format("continuation stopped after {} corrector calls at "
                                                  "tau = ({}, {})",
                                                  calls, current.tau.state, current.tau.control),
                                      current, trace);
        const double next = (s + step >= 1.0 - 1e-12) ? 1.0 : s + step;
        const DelayPair tau = next == 1.0 ? target : along(next);
        ++calls;
        try {
            SolveResult r = solveAtDelay(prob, tau, current.p, current.x, cfg);
            trace.records.push_back(
                {tau, r.stats.newtonIterations, r.stats.residualNorm, r.extremal.cost, true});
            current = std::move(r.extremal);
            s = next;
            if (r.stats.newtonIterations <= ccfg.growThreshold)
                step = std::min(1.0, step * ccfg.growFactor);
        } catch (const SolveFailure& e) {
            trace.records.push_back(
                {tau, e.stats().newtonIterations, e.stats().residualNorm, 0.0, false});
            step *= 0.5;
            if (step < ccfg.minStepFraction)
                throw ContinuationAborted(fmt::format("step fell below {} after failure at tau = "
                                                      "({}, {}): {}",
                                                      ccfg.minStepFraction, tau.state, tau.control,
                                                      e.what()),
                                          current, trace);
        }
    }
    return {std::move(current), std::move(trace)};
}

ContinuationResult continuationRun(const ProblemDef& prob, DelayPair target, const SolverConfig& cfg,
                                   const ContinuationConfig& ccfg)
{
    const BootstrapResult boot = solveUndelayed(prob, cfg);
    return continueFrom(prob, boot.extremal, target, cfg, ccfg);
}

std::vector<ProbeEntry> continuityProbe(const ProblemDef& prob, const std::vector<DelayPair>& taus,
                                        const SolverConfig& cfg, const ContinuationConfig& ccfg)
{
    const Extremal base = solveUndelayed(prob, cfg).extremal;
    std::vector<ProbeEntry> out;
    out.reserve(taus.size());
    for (const DelayPair& tau : taus) {
        const ContinuationResult r = continueFrom(prob, base, tau, cfg, ccfg);
        out.push_back({tau, supNormDiff(r.extremal.x, base.x), supNormDiff(r.extremal.p, base.p),
                       r.extremal.cost});
    }
    return out;
}

}  // namespace delayoc
