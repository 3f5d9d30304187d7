#pragma once

#include "delayoc/model.hpp"

namespace delayoc {

/// A sweep hit a non-finite value.
class SweepError : public Error {
public:
    SweepError(const std::string& what, double time) : Error(what), time_(time) {}
    double time() const { return time_; }

private:
    double time_;
};

/// Shared inputs of one (forward, backward) sweep pair.
struct SweepInputs {
    const ProblemDef& prob;
    DelayPair tau;
    Grid grid;
    /// Previous iterate's state; read for state arguments ahead of the
    /// integration front (advanced arguments of the feedback law).
    const DenseTrajectory& prevX;
};

struct StateSweep {
    DenseTrajectory x;
    DenseTrajectory u;
};

/// Piecewise-linear dense output (forward differences), used for controls so
/// that the in-sweep and final representations coincide.
DenseTrajectory piecewiseLinear(Grid grid, NodeMatrix values, History history);

/// Heun integration of the delayed state equation under the feedback law.
///
/// At every stage the control is recomputed from the feedback with
///  - state arguments at or behind the integration front taken from the
///    in-progress solution (or the state history),
///  - state arguments ahead of the front taken from `in.prevX`,
///  - adjoint arguments taken from `pbar`,
///  - delayed controls taken from the in-progress samples (or the control history).
/// Controls are stored at nodes using the corrected state.
StateSweep forwardStateSweep(const SweepInputs& in, const DenseTrajectory& pbar);

/// Heun integration of the adjoint equation backward from p(T) = pT.
///
/// The advanced term -dH/dy(t + tau1, ...) is switched on for t <= T - tau1 and
/// reads p(t + tau1) from the already integrated part of the sweep.
DenseTrajectory backwardAdjointSweep(const SweepInputs& in, const DenseTrajectory& x,
                                     const DenseTrajectory& u, const Vec& pT);

/// Simpson quadrature of the cost rate sampled at the grid nodes.
double costOfRun(const ProblemDef& prob, DelayPair tau, const DenseTrajectory& x,
                 const DenseTrajectory& u);

/// Right-hand side of the adjoint equation at time t given full trajectories.
Vec adjointRate(const ProblemDef& prob, DelayPair tau, double T, double t,
                const DenseTrajectory& x, const DenseTrajectory& p, const DenseTrajectory& u);

/// Largest midpoint defect |q'(m) - rhs(m)| / (1 + |q(m)|) over all intervals
/// and components, where q is the dense output and m an interval midpoint.
struct MidpointDefects {
    double state = 0.0;
    double adjoint = 0.0;
};
MidpointDefects midpointDefects(const ProblemDef& prob, const Extremal& ex);

/// Largest |u_k - feedback(x, p)(t_k)| over nodes and components.
double feedbackResampleError(const ProblemDef& prob, const Extremal& ex);

}  // namespace delayoc
