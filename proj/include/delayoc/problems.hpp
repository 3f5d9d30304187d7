#pragma once

#include "delayoc/model.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace delayoc {

/// Scalar benchmark: minimize int_0^3 x^2 + u^2 subject to
/// x'(t) = x(t - tau1) u(t - tau2), x = 1 on [-tau1, 0], u = 0 on [-tau2, 0).
ProblemDef builtinOCP1();

/// Two-stage stirred tank reactor with a transport delay between the tanks
/// (state delay only; tau2 is ignored by the dynamics).
ProblemDef builtinOCP2();

/// Looks up "ocp1" / "ocp2".
std::optional<ProblemDef> builtinProblem(std::string_view name);
std::vector<std::string> builtinNames();

namespace reference {

/// Closed-form optimal control and state of OCP1 at tau = (1, 2).
double ocp1Control(double t);
double ocp1State(double t);
/// Exact optimal cost of OCP1 at tau = (1, 2): 2 + tanh(1).
double ocp1ExactCost();
inline constexpr double kOcp1ReportedCost = 2.76173;
inline constexpr double kOcp1ReportedControlError = 0.024e-2;
inline constexpr double kOcp1ReportedStateError = 0.031e-2;

struct Ocp2Row {
    double tau;
    double cost;
    int continuationIterations;
    double seconds;
};

/// Published OCP2 cost table (T = 2, N = 50).
std::span<const Ocp2Row> ocp2Table();
std::optional<Ocp2Row> ocp2Lookup(double tau);

/// Relative sup-norm node errors, max |err| / max |reference|.
struct AnalyticErrors {
    double control = 0.0;
    double state = 0.0;
};

/// Errors against the closed forms, for the problems and delays that have
/// them (OCP1 at tau = (1, 2) with T = 3).
std::optional<AnalyticErrors> analyticErrors(std::string_view problem, const Extremal& ex);

}  // namespace reference

}  // namespace delayoc
