#include "subembed/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "subembed/errors.hpp"
#include "subembed/kernels.hpp"
#include "subembed/parallel.hpp"
#include "subembed/rng.hpp"

namespace subembed {

Eigen::MatrixXd restrict_to(const RandomMatrix& gamma, const Subspace& w) {
    if (w.ambient_dim() != gamma.cols)
        throw DimensionError("subspace ambient dimension " + std::to_string(w.ambient_dim()) +
                             " does not match matrix columns " + std::to_string(gamma.cols));
    Eigen::MatrixXd c(static_cast<Eigen::Index>(gamma.rows), static_cast<Eigen::Index>(w.dim()));
    kernels::gemm_rc(gamma.entries.data(), gamma.rows, gamma.cols, w.basis().data(), w.dim(), c.data());
    return c;
}

Eigen::VectorXd apply(const RandomMatrix& gamma, const Eigen::VectorXd& x) {
    if (static_cast<std::size_t>(x.size()) != gamma.cols) throw DimensionError("apply: vector length mismatch");
    Eigen::VectorXd y(static_cast<Eigen::Index>(gamma.rows));
    kernels::gemv(gamma.entries.data(), gamma.rows, gamma.cols, x.data(), y.data());
    return y;
}

Extremes subspace_extremes(const RandomMatrix& gamma, const Subspace& w) {
    const Eigen::MatrixXd c = restrict_to(gamma, w);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(c);
    const auto& sv = svd.singularValues();
    Extremes e;
    e.sigma_max = sv.size() > 0 ? sv(0) : 0.0;
    if (gamma.rows < w.dim()) {
        e.sigma_min = 0.0;
    } else {
        e.sigma_min = sv(sv.size() - 1);
        const double noise = static_cast<double>(std::max(gamma.rows, w.dim())) *
                             std::numeric_limits<double>::epsilon() * e.sigma_max;
        if (e.sigma_min <= noise) e.sigma_min = 0.0;
    }
    return e;
}

DistortionReport family_distortion(const RandomMatrix& gamma, const SubspaceFamily& family, unsigned parallelism) {
    DistortionReport report;
    report.per_subspace.resize(family.size());
    parallel_for(family.size(), parallelism, [&](std::size_t i) {
        report.per_subspace[i] = subspace_extremes(gamma, family[i].direction);
    });
    report.family_sigma_min = std::numeric_limits<double>::infinity();
    report.family_sigma_max = 0.0;
    for (const auto& e : report.per_subspace) {
        report.family_sigma_min = std::min(report.family_sigma_min, e.sigma_min);
        report.family_sigma_max = std::max(report.family_sigma_max, e.sigma_max);
    }
    report.achieved_distortion = report.family_sigma_min > 0.0
                                     ? report.family_sigma_max / report.family_sigma_min
                                     : std::numeric_limits<double>::infinity();
    return report;
}

ScaleChoice choose_scale(const DistortionReport& report, double D) {
    if (!(D >= 1.0)) throw InputError("distortion D must be >= 1, got " + std::to_string(D));
    ScaleChoice choice;
    choice.D = D;
    choice.feasible = report.family_sigma_min > 0.0 && report.family_sigma_max <= D * report.family_sigma_min;
    if (choice.feasible) choice.L = report.family_sigma_max;
    return choice;
}

PointwiseCheck verify_pointwise(const RandomMatrix& gamma, const SubspaceFamily& family, const ScaleChoice& scale,
                                std::size_t pairs, std::uint64_t seed) {
    if (!scale.feasible || !scale.L) throw InputError("verify_pointwise needs a feasible scale choice");
    if (family.ambient_dim() != gamma.cols) throw DimensionError("family and matrix dimensions differ");
    constexpr double kSlack = 1e-9;
    const double upper = *scale.L;
    const double lower = upper / scale.D;
    PointwiseCheck out;
    out.pairs = pairs;
    Engine engine = make_engine(seed);
    std::uniform_int_distribution<std::size_t> pick(0, family.size() - 1);
    std::normal_distribution<double> normal;
    for (std::size_t t = 0; t < pairs; ++t) {
        const AffineSubspace& member = family[pick(engine)];
        const Eigen::MatrixXd& b = member.direction.basis();
        Eigen::VectorXd cx(b.cols()), cy(b.cols());
        for (Eigen::Index j = 0; j < b.cols(); ++j) {
            cx(j) = normal(engine);
            cy(j) = normal(engine);
        }
        const Eigen::VectorXd x = member.base_point + b * cx;
        const Eigen::VectorXd y = member.base_point + b * cy;
        const double dist = (x - y).norm();
        if (dist == 0.0) continue;
        const double image = (apply(gamma, x) - apply(gamma, y)).norm();
        const double lo_ratio = image / (lower * dist);
        const double hi_ratio = image / (upper * dist);
        out.worst_lower_ratio = std::min(out.worst_lower_ratio, lo_ratio);
        out.worst_upper_ratio = std::max(out.worst_upper_ratio, hi_ratio);
        if (lo_ratio < 1.0 - kSlack || hi_ratio > 1.0 + kSlack) ++out.violations;
    }
    return out;
}

}  // namespace subembed
