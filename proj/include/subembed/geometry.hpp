#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace subembed {

// Linear subspace of R^n stored by an orthonormal basis (n x k, column-major
// so each basis vector is contiguous).
class Subspace {
public:
    // Takes a basis that is already orthonormal to within 1e-10; throws
    // DimensionError otherwise. Use orthonormalize() for arbitrary spans.
    explicit Subspace(Eigen::MatrixXd basis);

    std::size_t ambient_dim() const { return static_cast<std::size_t>(basis_.rows()); }
    std::size_t dim() const { return static_cast<std::size_t>(basis_.cols()); }
    const Eigen::MatrixXd& basis() const { return basis_; }
    const double* column(std::size_t j) const { return basis_.data() + j * ambient_dim(); }

    Eigen::MatrixXd projector() const { return basis_ * basis_.transpose(); }

private:
    Eigen::MatrixXd basis_;
};

struct AffineSubspace {
    Eigen::VectorXd base_point;
    Subspace direction;

    explicit AffineSubspace(Subspace dir);
    AffineSubspace(Eigen::VectorXd base, Subspace dir);

    bool is_linear() const { return base_point.isZero(0.0); }
};

class SubspaceFamily {
public:
    // Requires at least one member and a shared ambient dimension.
    explicit SubspaceFamily(std::vector<AffineSubspace> members);
    static SubspaceFamily linear(std::vector<Subspace> members);

    std::size_t size() const { return members_.size(); }
    std::size_t ambient_dim() const { return members_.front().direction.ambient_dim(); }
    std::size_t max_dim() const;
    const std::vector<AffineSubspace>& members() const { return members_; }
    const AffineSubspace& operator[](std::size_t i) const { return members_[i]; }

private:
    std::vector<AffineSubspace> members_;
};

inline constexpr double kRankTolerance = 1e-10;

// Orthonormal basis for the numerical column span; singular values below
// 1e-10 * sigma_max are discarded.
Subspace orthonormalize(const Eigen::MatrixXd& spanning_vectors);

// Span of a k-column standard Gaussian matrix (Haar distributed).
Subspace random_subspace(std::size_t n, std::size_t k, std::uint64_t seed);

Subspace sparse_subspace(std::size_t n, const std::vector<std::size_t>& support);

// max over unit v in V of the distance from v to the unit sphere of W.
// Asymmetric when dim V != dim W.
double grassmann_distance(const Subspace& v, const Subspace& w);

struct EpsilonNet {
    double epsilon = 0.0;
    std::size_t dim = 0;
    std::vector<double> points;  // row-major, size() x dim

    std::size_t size() const { return dim == 0 ? 0 : points.size() / dim; }
    const double* point(std::size_t i) const { return points.data() + i * dim; }
};

struct NetOptions {
    double cardinality_budget = 1e6;
    std::size_t probes = 100000;
    std::size_t max_verify_rounds = 3;
};

// (3/epsilon)^k, the covering-number bound for the unit sphere of R^k.
double net_cardinality_bound(std::size_t k, double epsilon);

// Randomized maximal epsilon-separated set on S^{k-1}, verified as an
// epsilon-cover by random probes. Separation keeps the size below
// (1 + 2/epsilon)^k <= (3/epsilon)^k.
EpsilonNet epsilon_net(std::size_t k, double epsilon, std::uint64_t seed, const NetOptions& options = {});

// Largest distance from any of `probes` random unit vectors to the net.
double net_covering_radius_estimate(const EpsilonNet& net, std::size_t probes, std::uint64_t seed);

// Replaces every member by its direction space.
SubspaceFamily reduce_affine(const SubspaceFamily& family);

inline constexpr std::size_t kDefaultFamilyBudget = 1'000'000;

// All spans of W_l + W_l' for l <= l' (the diagonal gives W_l itself).
SubspaceFamily cross_family(const SubspaceFamily& family, std::size_t budget = kDefaultFamilyBudget);

// Random unit vector in R^n.
Eigen::VectorXd random_unit_vector(std::size_t n, std::uint64_t seed);

}  // namespace subembed
