#include "delayoc/solve.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace delayoc {

namespace {

/// Node-sampled C0 distance between trajectories that may live on different grids.
double nodeDistance(const DenseTrajectory& a, const DenseTrajectory& b)
{
    if (a.grid() == b.grid())
        return supNormDiff(a, b);
    double worst = 0.0;
    const Grid& g = a.grid();
    for (int k = 0; k <= g.intervals(); ++k)
        worst = std::max(worst, (a.nodeValue(k) - b.eval(g.node(k))).cwiseAbs().maxCoeff());
    return worst;
}

}  // namespace

PicardResult picardIterate(const ShootingState& s, const DenseTrajectory& p0, const SolverConfig& cfg)
{
    const ProblemDef& prob = s.problem();
    if (prob.freeTime() || !prob.terminal.isFree())
        throw Error("picard: only fixed-horizon, free-endpoint problems are supported");

    const Grid grid(0.0, prob.horizonGuess(), s.intervals());
    const Vec pT = Vec::Zero(prob.n);
    const History adjointHistory = History::zero(prob.n, -prob.maxDelay);

    DenseTrajectory pbar = s.adjointGuess(s.pack(p0, grid.T()));
    DenseTrajectory prevX = s.prevX();

    PicardReport rep;
    double lastDiff = std::numeric_limits<double>::infinity();
    int growth = 0;

    for (int i = 0; i < cfg.innerMaxIter; ++i) {
        const SweepInputs in{prob, s.tau(), grid, prevX};
        StateSweep fwd = forwardStateSweep(in, pbar);
        DenseTrajectory p = backwardAdjointSweep(in, fwd.x, fwd.u, pT);

        const double diff = std::max(supNormDiff(p, pbar), nodeDistance(fwd.x, prevX));
        rep.iterations = i + 1;
        rep.lastDifference = diff;

        if (diff < cfg.innerEps) {
            rep.converged = true;
            const double cost = costOfRun(prob, s.tau(), fwd.x, fwd.u);
            return {Extremal{s.tau(), grid.T(), std::move(fwd.x), std::move(p), std::move(fwd.u), cost},
                    rep};
        }
        growth = diff > lastDiff ? growth + 1 : 0;
        if (growth >= 3 || !std::isfinite(diff)) {
            rep.diverged = true;
            break;
        }
        lastDiff = diff;

        pbar = DenseTrajectory::fromNodes(grid, p.values(), adjointHistory);
        prevX = std::move(fwd.x);
    }
    throw SolveFailure(fmt::format("picard iteration {} after {} passes (last C0 change {:.3e})",
                                   rep.diverged ? "diverged" : "did not converge", rep.iterations,
                                   rep.lastDifference),
                       SolveStats{0, rep.iterations, rep.lastDifference, NewtonStatus::Stalled});
}

SolveResult solveAtDelay(const ProblemDef& prob, DelayPair tau, const DenseTrajectory& initGuess,
                         const DenseTrajectory& prevX, const SolverConfig& cfg)
{
    cfg.validate();
    SolveStats stats;

    if (cfg.mode == SolveMode::Picard) {
        const ShootingState state(prob, tau, cfg.intervals, prevX);
        PicardResult r = picardIterate(state, initGuess, cfg);
        stats.outerIterations = r.report.iterations;
        stats.residualNorm = r.report.lastDifference;
        return {std::move(r.extremal), stats};
    }

    DenseTrajectory prev = prevX;
    DenseTrajectory lastP = initGuess;
    Vec z = ShootingState(prob, tau, cfg.intervals, prev).pack(initGuess, initGuess.grid().T());

    for (int outer = 0; outer < cfg.innerMaxIter; ++outer) {
        const ShootingState state(prob, tau, cfg.intervals, prev);
        NewtonResult nr = newtonSolve(state.residualFn(), std::move(z), cfg);
        z = std::move(nr.z);
        stats.newtonIterations += nr.report.iterations;
        stats.outerIterations = outer + 1;
        stats.residualNorm = nr.report.finalResidualNorm;
        stats.status = nr.report.status;
        if (nr.report.status != NewtonStatus::Converged)
            throw SolveFailure(fmt::format("newton {} at tau = ({}, {}) after {} iterations, "
                                           "|F| = {:.3e}",
                                           toString(nr.report.status), tau.state, tau.control,
                                           nr.report.iterations, nr.report.finalResidualNorm),
                               stats);

        Extremal ex = state.rebuild(z);
        const double dx = nodeDistance(ex.x, prev);
        const double dp = nodeDistance(ex.p, lastP);
        if (dx < cfg.innerEps && dp < cfg.innerEps)
            return {std::move(ex), stats};
        prev = ex.x;
        lastP = ex.p;
    }
    throw SolveFailure(fmt::format("state/adjoint iteration did not settle within {} passes at "
                                   "tau = ({}, {})",
                                   cfg.innerMaxIter, tau.state, tau.control),
                       stats);
}

}  // namespace delayoc
