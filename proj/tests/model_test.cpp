#include "delayoc/model.hpp"
#include "delayoc/problems.hpp"

#include "support/samples.hpp"
#include "support/test_problems.hpp"

#include <doctest.h>

using namespace delayoc;

TEST_CASE("hamiltonian is <p, f> minus the running cost")
{
    const ProblemDef p = builtinOCP1();
    const Vec x = Vec::Constant(1, 0.5), y = Vec::Constant(1, 2.0), adj = Vec::Constant(1, -3.0);
    const Vec u = Vec::Constant(1, 0.25), v = Vec::Constant(1, 0.75);
    // f = y v = 1.5, f0 = x^2 + u^2 = 0.3125
    CHECK(hamiltonian(p, 0.0, x, y, adj, u, v) == doctest::Approx(-3.0 * 1.5 - 0.3125));
    CHECK(hamiltonianDy(p, 0.0, x, y, adj, u, v)[0] == doctest::Approx(-3.0 * 0.75));
    CHECK(hamiltonianDx(p, 0.0, x, y, adj, u, v)[0] == doctest::Approx(-1.0));
    CHECK_THROWS_AS(hamiltonian(p, 0.0, Vec::Zero(2), y, adj, u, v), Error);
}

TEST_CASE("indicator limits at the switching time")
{
    const double h = 0.05;
    CHECK(activeBefore(1.0, 3.0, 2.0, h, Side::Left));
    CHECK_FALSE(activeBefore(1.0, 3.0, 2.0, h, Side::Right));
    CHECK(activeBefore(0.95, 3.0, 2.0, h, Side::Right));
    CHECK_FALSE(activeBefore(1.05, 3.0, 2.0, h, Side::Left));
    CHECK(activeBefore(1.0 + 1e-14, 3.0, 2.0, h, Side::Left));
}

TEST_CASE("builtin partial derivatives agree with central differences")
{
    for (const ProblemDef& p : {builtinOCP1(), builtinOCP2()}) {
        CAPTURE(p.name);
        const DerivativeReport r = validateDerivatives(p, testing::randomSamples(p, 40), 1e-6);
        CHECK(r.passed);
        CHECK(r.maxRelError <= 1e-6);
    }
    const ProblemDef reg = testing::laggedRegulator();
    CHECK(validateDerivatives(reg, testing::randomSamples(reg, 20)).passed);
}

TEST_CASE("a wrong partial is caught and named")
{
    ProblemDef p = builtinOCP1();
    p.dfdy = [](double, const Vec&, const Vec&, const Vec&, const Vec& v) {
        return Mat::Constant(1, 1, 2.0 * v[0]);
    };
    const DerivativeReport r = validateDerivatives(p, testing::randomSamples(p, 10));
    CHECK_FALSE(r.passed);
    CHECK(r.worstPartial.rfind("dfdy", 0) == 0);
    CHECK(r.worstSample >= 0);
}

TEST_CASE("problem registry")
{
    CHECK(builtinProblem("ocp1")->n == 1);
    CHECK(builtinProblem("ocp2")->n == 4);
    CHECK(builtinProblem("ocp2")->m == 2);
    CHECK_FALSE(builtinProblem("nosuch"));
    CHECK(builtinNames().size() == 2);
    CHECK(builtinOCP1().horizonGuess() == 3.0);
    CHECK(builtinOCP2().horizonGuess() == 2.0);
}

TEST_CASE("closed-form references")
{
    CHECK(reference::ocp1ExactCost() == doctest::Approx(2.7615941559557653).epsilon(1e-15));
    CHECK(reference::ocp1State(0.0) == 1.0);
    CHECK(reference::ocp1Control(1.5) == 0.0);
    // Control is continuous and vanishes where it stops acting.
    CHECK(reference::ocp1Control(1.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(reference::ocp2Lookup(0.4)->cost == 0.02459);
    CHECK_FALSE(reference::ocp2Lookup(0.3));
    CHECK(reference::ocp2Table().size() == 10);
}

TEST_CASE("terminal specification")
{
    const ProblemDef p = testing::delayedTransfer();
    CHECK_FALSE(p.terminal.isFree());
    CHECK(*p.terminal.target(0) == 1.0);
    CHECK_FALSE(builtinOCP1().terminal.target(0));
    CHECK(testing::freeTimeTransfer().freeTime());
}
