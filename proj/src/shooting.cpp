#include "delayoc/solve.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace delayoc {

void SolverConfig::validate() const
{
    if (intervals < 1 || !(newtonTol > 0) || newtonMaxIter < 1 || !(innerEps > 0) ||
        innerMaxIter < 1 || !(fdStep > 0))
        throw Error("solver configuration: all tolerances, steps and limits must be positive");
    if (intervals % 2 != 0)
        throw Error(fmt::format("solver configuration: the cost quadrature needs an even number of "
                                "intervals, got {}",
                                intervals));
}

const char* toString(NewtonStatus s)
{
    switch (s) {
    case NewtonStatus::Converged: return "converged";
    case NewtonStatus::Stalled: return "stalled";
    case NewtonStatus::MaxIter: return "max-iterations";
    case NewtonStatus::NonFinite: return "non-finite";
    }
    return "unknown";
}

ShootingState::ShootingState(const ProblemDef& prob, DelayPair tau, int intervals,
                             DenseTrajectory prevX)
    : prob_(&prob), tau_(tau), N_(intervals), prevX_(std::move(prevX))
{
    if (N_ < 1)
        throw Error("shooting: need at least one interval");
    if (tau.state < 0 || tau.control < 0 || tau.state > prob.maxDelay + 1e-12 ||
        tau.control > prob.maxDelay + 1e-12)
        throw Error(fmt::format("shooting: delays ({}, {}) outside [0, {}]", tau.state, tau.control,
                                prob.maxDelay));
    for (const auto& f : prob.terminal.fixed)
        if (f.index < 0 || f.index >= prob.n)
            throw Error(fmt::format("shooting: fixed terminal component {} out of range", f.index));
}

int ShootingState::size() const { return prob_->n * (N_ + 1) + (prob_->freeTime() ? 1 : 0); }

Vec ShootingState::pack(const DenseTrajectory& p, double T) const
{
    const int n = prob_->n;
    if (p.dim() != n)
        throw Error("shooting: adjoint guess has the wrong dimension");
    Vec z(size());
    const Grid& pg = p.grid();
    for (int k = 0; k <= N_; ++k) {
        Vec pk;
        if (pg.intervals() == N_)
            pk = p.nodeValue(k);
        else
            pk = p.eval(pg.t0() + (pg.T() - pg.t0()) * k / N_);
        z.segment(k * n, n) = pk;
    }
    if (prob_->freeTime())
        z[size() - 1] = T;
    return z;
}

double ShootingState::horizon(const Vec& z) const
{
    return prob_->freeTime() ? z[size() - 1] : prob_->horizonGuess();
}

Grid ShootingState::gridFor(const Vec& z) const { return Grid(0.0, horizon(z), N_); }

DenseTrajectory ShootingState::adjointGuess(const Vec& z) const
{
    const int n = prob_->n;
    NodeMatrix values(N_ + 1, n);
    for (int k = 0; k <= N_; ++k)
        values.row(k) = z.segment(k * n, n).transpose();
    return DenseTrajectory::fromNodes(gridFor(z), std::move(values),
                                      History::zero(n, -prob_->maxDelay));
}

Vec ShootingState::terminalAdjoint(const Vec& z) const
{
    const int n = prob_->n;
    Vec pT = Vec::Zero(n);
    for (const auto& f : prob_->terminal.fixed)
        pT[f.index] = z[N_ * n + f.index];
    return pT;
}

Vec ShootingState::residual(const Vec& z) const
{
    if (z.size() != size())
        throw Error("shooting: unknown vector has the wrong size");
    const ProblemDef& prob = *prob_;
    const int n = prob.n;
    const Grid grid = gridFor(z);
    const DenseTrajectory pbar = adjointGuess(z);
    const SweepInputs in{prob, tau_, grid, prevX_};

    const StateSweep fwd = forwardStateSweep(in, pbar);
    const Vec pT = terminalAdjoint(z);
    const DenseTrajectory p = backwardAdjointSweep(in, fwd.x, fwd.u, pT);

    Vec F(size());
    for (int k = 0; k < N_; ++k)
        F.segment(k * n, n) = p.nodeValue(k) - z.segment(k * n, n);

    const Vec xT = fwd.x.nodeValue(N_);
    for (int i = 0; i < n; ++i) {
        const auto target = prob.terminal.target(i);
        F[N_ * n + i] = target ? xT[i] - *target : z[N_ * n + i];
    }
    if (prob.freeTime()) {
        const double T = grid.T();
        F[size() - 1] = hamiltonian(prob, T, xT, fwd.x.eval(T - tau_.state), pT, fwd.u.nodeValue(N_),
                                    fwd.u.eval(T - tau_.control));
    }
    return F;
}

ResidualFn ShootingState::residualFn() const
{
    return [this](const Vec& z) -> Vec {
        try {
            return residual(z);
        } catch (const Error&) {
            return Vec::Constant(size(), std::numeric_limits<double>::quiet_NaN());
        }
    };
}

Extremal ShootingState::rebuild(const Vec& z) const
{
    const Grid grid = gridFor(z);
    const DenseTrajectory pbar = adjointGuess(z);
    const SweepInputs in{*prob_, tau_, grid, prevX_};
    StateSweep fwd = forwardStateSweep(in, pbar);
    DenseTrajectory p = backwardAdjointSweep(in, fwd.x, fwd.u, terminalAdjoint(z));
    const double cost = costOfRun(*prob_, tau_, fwd.x, fwd.u);
    return {tau_, grid.T(), std::move(fwd.x), std::move(p), std::move(fwd.u), cost};
}

}  // namespace delayoc
