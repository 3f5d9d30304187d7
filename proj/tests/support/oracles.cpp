#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace delayoc::testing {

namespace {

class Shooter {
public:
    Shooter(const ProblemDef& prob, int intervals, int substeps)
        : prob_(prob), M_(intervals), S_(substeps), T_(prob.horizonGuess()),
          x0_(prob.historyState(0.0)), starts_(intervals + 1), costs_(intervals + 1, 0.0)
    {}

    // Full pass, recording the state and the accumulated cost at every
    // control-interval boundary so that perturbed passes can restart there.
    double run(const NodeMatrix& U)
    {
        starts_[0] = x0_;
        costs_[0] = 0.0;
        for (int j = 0; j < M_; ++j) {
            Vec x = starts_[j];
            costs_[j + 1] = costs_[j] + interval(j, U.row(j).transpose(), x);
            starts_[j + 1] = x;
        }
        return costs_[M_];
    }

    // Cost with control j replaced by w, everything else as in the last run().
    double rerunFrom(int j, const Vec& w, const NodeMatrix& U) const
    {
        Vec x = starts_[j];
        double J = costs_[j] + interval(j, w, x);
        for (int i = j + 1; i < M_; ++i) J += interval(i, U.row(i).transpose(), x);
        return J;
    }

private:
    // Undelayed problem: lagged arguments coincide with the current ones.
    Vec rate(double t, const Vec& x, const Vec& u, double& c) const
    {
        c = prob_.costRate(t, x, x, u, u);
        return prob_.dynamics(t, x, x, u, u);
    }

    double interval(int j, const Vec& u, Vec& x) const
    {
        const double H = T_ / M_, h = H / S_;
        double J = 0.0;
        for (int s = 0; s < S_; ++s) {
            const double t = j * H + s * h;
            double c1, c2, c3, c4;
            const Vec k1 = rate(t, x, u, c1);
            const Vec k2 = rate(t + h / 2, x + h / 2 * k1, u, c2);
            const Vec k3 = rate(t + h / 2, x + h / 2 * k2, u, c3);
            const Vec k4 = rate(t + h, x + h * k3, u, c4);
            x += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
            J += h / 6 * (c1 + 2 * c2 + 2 * c3 + c4);
        }
        return J;
    }

    const ProblemDef& prob_;
    int M_, S_;
    double T_;
    Vec x0_;
    std::vector<Vec> starts_;
    std::vector<double> costs_;
};

double gradient(Shooter& sh, const NodeMatrix& U, NodeMatrix& g)
{
    const double J = sh.run(U);
    for (Eigen::Index j = 0; j < U.rows(); ++j)
        for (Eigen::Index i = 0; i < U.cols(); ++i) {
            const double step = 1e-6 * std::max(1.0, std::abs(U(j, i)));
            Vec w = U.row(j).transpose();
            w[i] += step;
            const double up = sh.rerunFrom(static_cast<int>(j), w, U);
            w[i] -= 2 * step;
            const double down = sh.rerunFrom(static_cast<int>(j), w, U);
            g(j, i) = (up - down) / (2 * step);
        }
    return J;
}

}  // namespace

CollocationResult directCollocation(const ProblemDef& prob, int controlIntervals, int substeps,
                                    int maxIter, double gradTol)
{
    if (prob.freeTime() || !prob.terminal.isFree())
        throw std::invalid_argument("directCollocation: fixed horizon, free endpoint only");

    Shooter sh(prob, controlIntervals, substeps);
    NodeMatrix U = NodeMatrix::Zero(controlIntervals, prob.m);
    NodeMatrix g(controlIntervals, prob.m), gPrev, Uprev;
    double J = gradient(sh, U, g);
    double alpha = 1e-2;

    CollocationResult res;
    for (int it = 0; it < maxIter; ++it) {
        res.gradientNorm = g.cwiseAbs().maxCoeff();
        res.iterations = it;
        if (res.gradientNorm <= gradTol) break;

        if (it > 0) {
            const NodeMatrix s = U - Uprev, y = g - gPrev;
            const double sy = (s.array() * y.array()).sum();
            if (sy > 0) alpha = (s.array() * s.array()).sum() / sy;
        }
        Uprev = U;
        gPrev = g;

        // Armijo on the steepest-descent direction.
        const double gg = (g.array() * g.array()).sum();
        double a = alpha;
        NodeMatrix trial;
        double Jt = 0.0;
        for (int k = 0; k < 60; ++k, a *= 0.5) {
            trial = U - a * g;
            Jt = sh.run(trial);
            if (std::isfinite(Jt) && Jt <= J - 1e-4 * a * gg) break;
        }
        U = trial;
        J = gradient(sh, U, g);
    }
    res.cost = J;
    res.controls = U;
    return res;
}

Mat centralJacobian(const ResidualFn& F, const Vec& z, double h)
{
    const Vec F0 = F(z);
    Mat J(F0.size(), z.size());
    for (Eigen::Index j = 0; j < z.size(); ++j) {
        const double step = h * std::max(1.0, std::abs(z[j]));
        Vec zp = z, zm = z;
        zp[j] += step;
        zm[j] -= step;
        J.col(j) = (F(zp) - F(zm)) / (2 * step);
    }
    return J;
}

}  // namespace delayoc::testing
