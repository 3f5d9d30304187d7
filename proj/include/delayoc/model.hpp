#pragma once

#include "delayoc/traj.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace delayoc {

/// Constant delays: `state` acts on x (tau^1), `control` on u (tau^2).
struct DelayPair {
    double state = 0.0;
    double control = 0.0;

    DelayPair scaled(double s) const { return {state * s, control * s}; }
    double norm() const;
    bool operator==(const DelayPair&) const = default;
};

/// Everything a closed-form maximizer of the delayed Hamiltonian couple may read.
/// The cost multiplier is fixed at -1.
struct FeedbackContext {
    double t = 0.0;
    double T = 0.0;
    DelayPair tau;
    Vec x;             // x(t)
    Vec xLag;          // x(t - tau1)
    Vec xAdvMixed;     // x(t + tau2 - tau1)
    Vec xAdv;          // x(t + tau2)
    Vec p;             // p(t)
    Vec pAdv;          // p(t + tau2)
    double indicatorAdv = 1.0;   // 1 iff t <= T - tau2
};

using DynamicsFn =
    std::function<Vec(double t, const Vec& x, const Vec& y, const Vec& u, const Vec& v)>;
using CostRateFn =
    std::function<double(double t, const Vec& x, const Vec& y, const Vec& u, const Vec& v)>;
using JacobianFn =
    std::function<Mat(double t, const Vec& x, const Vec& y, const Vec& u, const Vec& v)>;
using GradientFn = DynamicsFn;
using FeedbackFn = std::function<Vec(const FeedbackContext&)>;

struct FixedTime {
    double T;
};
struct FreeTime {
    double initialGuess;
};
using Horizon = std::variant<FixedTime, FreeTime>;

struct FixedComponent {
    int index;
    double value;
};

/// Free endpoint when `fixed` is empty.
struct TerminalSpec {
    std::vector<FixedComponent> fixed;

    bool isFree() const { return fixed.empty(); }
    std::optional<double> target(int component) const;
};

struct ControlBox {
    Vec lower;
    Vec upper;
};

/// A delayed optimal control problem. Every callable must be pure.
struct ProblemDef {
    std::string name;
    int n = 0;
    int m = 0;
    double maxDelay = 0.0;

    DynamicsFn dynamics;
    CostRateFn costRate;
    JacobianFn dfdx;
    JacobianFn dfdy;
    GradientFn dcdx;
    GradientFn dcdy;
    FeedbackFn feedback;

    std::function<Vec(double)> historyState;     // on [-maxDelay, 0]
    std::function<Vec(double)> historyControl;   // on [-maxDelay, 0)

    Horizon horizon = FixedTime{1.0};
    TerminalSpec terminal;
    std::optional<ControlBox> controlBox;

    double horizonGuess() const;
    bool freeTime() const { return std::holds_alternative<FreeTime>(horizon); }
    History stateHistory() const { return {historyState, -maxDelay}; }
    History controlHistory() const { return {historyControl, -maxDelay}; }
};

/// A converged solution at one delay pair.
struct Extremal {
    DelayPair tau;
    double T = 0.0;
    DenseTrajectory x;
    DenseTrajectory p;
    DenseTrajectory u;
    double cost = 0.0;
};

/// <p, f> - f0.
double hamiltonian(const ProblemDef& prob, double t, const Vec& x, const Vec& y, const Vec& p,
                   const Vec& u, const Vec& v);

/// dH/dx = dfdx^T p - dcdx
Vec hamiltonianDx(const ProblemDef& prob, double t, const Vec& x, const Vec& y, const Vec& p,
                  const Vec& u, const Vec& v);
/// dH/dy = dfdy^T p - dcdy
Vec hamiltonianDy(const ProblemDef& prob, double t, const Vec& x, const Vec& y, const Vec& p,
                  const Vec& u, const Vec& v);

/// Indicator of [0, T - delay], tolerant to rounding at the switch. The left
/// limit gives closed-right semantics; the right limit is off at T - delay.
bool activeBefore(double t, double T, double delay, double h, Side side = Side::Left);

struct SamplePoint {
    double t = 0.0;
    Vec x, y, u, v;
};

struct DerivativeReport {
    bool passed = true;
    double maxRelError = 0.0;
    std::string worstPartial;     // "dfdx(1,0)", "dcdy(2)", ...
    int worstSample = -1;
};

/// Compares the supplied partials against central differences of dynamics and
/// costRate. Passes iff the worst relative error is <= tolerance.
DerivativeReport validateDerivatives(const ProblemDef& prob, const std::vector<SamplePoint>& samples,
                                     double tolerance = 1e-6);

/// Gradient with respect to the control candidate w of
///   H(t, x(t), x(t-tau1), p(t), w, u(t-tau2))
///   + 1[t <= T - tau2] H(t+tau2, x(t+tau2), x(t+tau2-tau1), p(t+tau2), u(t+tau2), w)
/// by central differences. Zero at an interior maximizer.
Vec maximizedHamiltonianGradient(const ProblemDef& prob, const Extremal& ex, double t);

/// Max over nodes of |maximizedHamiltonianGradient|.
double stationarityDefect(const ProblemDef& prob, const Extremal& ex);

/// Builds the feedback context at time t from full trajectories.
FeedbackContext feedbackContextFrom(const Extremal& ex, double t);

}  // namespace delayoc
