#include "delayoc/solve.hpp"

#include <Eigen/LU>

#include <cmath>

namespace delayoc {

namespace {

constexpr int kMaxHalvings = 8;

double infNorm(const Vec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

/// Solves J dz = -F; returns false if J is numerically singular even after one
/// diagonal perturbation.
bool newtonDirection(Mat J, const Vec& F, Vec& dz)
{
    for (int attempt = 0; attempt < 2; ++attempt) {
        Eigen::PartialPivLU<Mat> lu(J);
        const bool singular = lu.rcond() < 1e-15;
        if (!singular) {
            dz = lu.solve(-F);
            if (dz.allFinite())
                return true;
        }
        const double scale = J.cwiseAbs().maxCoeff();
        J.diagonal().array() += 1e-12 * (scale > 0 ? scale : 1.0);
    }
    return false;
}

}  // namespace

NewtonResult newtonSolve(const ResidualFn& F, Vec z, const SolverConfig& cfg)
{
    NewtonReport rep;
    Vec f = F(z);
    ++rep.residualEvaluations;
    if (!f.allFinite() || !z.allFinite()) {
        rep.status = NewtonStatus::NonFinite;
        rep.finalResidualNorm = std::nan("");
        return {std::move(z), rep};
    }
    double norm = infNorm(f);

    while (norm > cfg.newtonTol) {
        if (rep.iterations >= cfg.newtonMaxIter) {
            rep.status = NewtonStatus::MaxIter;
            rep.finalResidualNorm = norm;
            return {std::move(z), rep};
        }

        Mat J;
        try {
            J = cfg.parallelJacobian ? fdJacobianParallel(F, z, f, cfg.fdStep)
                                     : fdJacobian(F, z, f, cfg.fdStep);
        } catch (const Error&) {
            rep.status = NewtonStatus::NonFinite;
            rep.finalResidualNorm = norm;
            return {std::move(z), rep};
        }
        rep.residualEvaluations += static_cast<int>(z.size());

        Vec dz;
        if (!newtonDirection(std::move(J), f, dz)) {
            rep.status = NewtonStatus::Stalled;
            rep.finalResidualNorm = norm;
            return {std::move(z), rep};
        }

        bool accepted = false;
        double lambda = 1.0;
        for (int halving = 0; halving <= kMaxHalvings; ++halving, lambda *= 0.5) {
            Vec trial = z + lambda * dz;
            Vec ft = F(trial);
            ++rep.residualEvaluations;
            if (!ft.allFinite())
                continue;
            const double tn = infNorm(ft);
            if (tn < norm) {
                z = std::move(trial);
                f = std::move(ft);
                norm = tn;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            rep.status = NewtonStatus::Stalled;
            rep.finalResidualNorm = norm;
            return {std::move(z), rep};
        }
        ++rep.iterations;
    }

    rep.status = NewtonStatus::Converged;
    rep.finalResidualNorm = norm;
    return {std::move(z), rep};
}

}  // namespace delayoc
