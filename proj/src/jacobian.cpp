#include "delayoc/solve.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace delayoc {

namespace {

double columnStep(double zj, double fdStep) { return fdStep * std::max(1.0, std::abs(zj)); }

[[noreturn]] void badColumn(Eigen::Index j)
{
    throw Error(fmt::format("finite-difference Jacobian: column {} is not finite", j));
}

}  // namespace

Mat fdJacobian(const ResidualFn& F, const Vec& z, double fdStep)
{
    return fdJacobian(F, z, F(z), fdStep);
}

Mat fdJacobian(const ResidualFn& F, const Vec& z, const Vec& Fz, double fdStep)
{
    const Eigen::Index D = z.size();
    Mat J(Fz.size(), D);
    Vec zp = z;
    for (Eigen::Index j = 0; j < D; ++j) {
        const double delta = columnStep(z[j], fdStep);
        zp[j] = z[j] + delta;
        J.col(j) = (F(zp) - Fz) / delta;
        zp[j] = z[j];
        if (!J.col(j).allFinite())
            badColumn(j);
    }
    return J;
}

Mat fdJacobianParallel(const ResidualFn& F, const Vec& z, const Vec& Fz, double fdStep)
{
    const Eigen::Index D = z.size();
    Mat J(Fz.size(), D);
    Eigen::Index firstBad = D;

#pragma omp parallel
    {
        Vec zp = z;
#pragma omp for schedule(dynamic)
        for (Eigen::Index j = 0; j < D; ++j) {
            const double delta = columnStep(z[j], fdStep);
            zp[j] = z[j] + delta;
            Vec col;
            try {
                col = (F(zp) - Fz) / delta;
            } catch (...) {
                col = Vec::Constant(Fz.size(), std::nan(""));
            }
            zp[j] = z[j];
            J.col(j) = col;
            if (!col.allFinite()) {
#pragma omp critical
                firstBad = std::min(firstBad, j);
            }
        }
    }
    if (firstBad < D)
        badColumn(firstBad);
    return J;
}

}  // namespace delayoc
