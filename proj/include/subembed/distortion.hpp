#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "subembed/ensembles.hpp"
#include "subembed/geometry.hpp"

namespace subembed {

struct Extremes {
    double sigma_min = 0.0;
    double sigma_max = 0.0;
};

struct DistortionReport {
    std::vector<Extremes> per_subspace;
    double family_sigma_min = 0.0;
    double family_sigma_max = 0.0;
    // family_sigma_max / family_sigma_min, or +infinity on rank collapse.
    double achieved_distortion = std::numeric_limits<double>::infinity();

    bool rank_collapse() const { return !(family_sigma_min > 0.0); }
};

struct ScaleChoice {
    bool feasible = false;
    std::optional<double> L;
    double D = 1.0;
};

// Gamma restricted to W as the m x k matrix Gamma * basis (column-major).
Eigen::MatrixXd restrict_to(const RandomMatrix& gamma, const Subspace& w);

// Smallest and largest singular values of Gamma * basis(W), i.e. the extremes
// of |Gamma x| over unit x in W. When m < dim W the minimum is exactly 0, and
// singular values at the level of rounding noise are reported as 0 too.
Extremes subspace_extremes(const RandomMatrix& gamma, const Subspace& w);

// Affine members are reduced to their direction spaces first.
DistortionReport family_distortion(const RandomMatrix& gamma, const SubspaceFamily& family,
                                   unsigned parallelism = 1);

// Feasible iff sigma_max <= D * sigma_min over the family; then L = sigma_max.
ScaleChoice choose_scale(const DistortionReport& report, double D);

struct PointwiseCheck {
    std::size_t pairs = 0;
    std::size_t violations = 0;
    double worst_lower_ratio = std::numeric_limits<double>::infinity();  // min |G(x-y)| / (L/D |x-y|)
    double worst_upper_ratio = 0.0;                                      // max |G(x-y)| / (L |x-y|)
};

// Draws random member pairs x, y (affine points) and counts violations of
// (L/D)|x-y| <= |Gx - Gy| <= L|x-y| beyond a relative slack of 1e-9.
PointwiseCheck verify_pointwise(const RandomMatrix& gamma, const SubspaceFamily& family, const ScaleChoice& scale,
                                std::size_t pairs, std::uint64_t seed);

// Gamma * x for a vector of length gamma.cols.
Eigen::VectorXd apply(const RandomMatrix& gamma, const Eigen::VectorXd& x);

}  // namespace subembed
