#include "subembed/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "subembed/errors.hpp"
#include "subembed/kernels.hpp"
#include "subembed/rng.hpp"

namespace subembed {

Subspace::Subspace(Eigen::MatrixXd basis) : basis_(std::move(basis)) {
    if (basis_.cols() < 1 || basis_.rows() < basis_.cols())
        throw DimensionError("subspace needs 1 <= k <= n, got k=" + std::to_string(basis_.cols()) +
                             ", n=" + std::to_string(basis_.rows()));
    const Eigen::MatrixXd gram = basis_.transpose() * basis_;
    const double defect = (gram - Eigen::MatrixXd::Identity(basis_.cols(), basis_.cols())).cwiseAbs().maxCoeff();
    if (!(defect <= kRankTolerance))
        throw DimensionError("basis columns are not orthonormal (defect " + std::to_string(defect) + ")");
}

AffineSubspace::AffineSubspace(Subspace dir)
    : base_point(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dir.ambient_dim()))), direction(std::move(dir)) {}

AffineSubspace::AffineSubspace(Eigen::VectorXd base, Subspace dir) : base_point(std::move(base)), direction(std::move(dir)) {
    if (static_cast<std::size_t>(base_point.size()) != direction.ambient_dim())
        throw DimensionError("base point length does not match the ambient dimension");
}

SubspaceFamily::SubspaceFamily(std::vector<AffineSubspace> members) : members_(std::move(members)) {
    if (members_.empty()) throw InputError("a subspace family needs at least one member");
    const std::size_t n = members_.front().direction.ambient_dim();
    for (std::size_t i = 1; i < members_.size(); ++i)
        if (members_[i].direction.ambient_dim() != n)
            throw DimensionError("family member " + std::to_string(i) + " has ambient dimension " +
                                 std::to_string(members_[i].direction.ambient_dim()) + ", expected " +
                                 std::to_string(n));
}

SubspaceFamily SubspaceFamily::linear(std::vector<Subspace> members) {
    std::vector<AffineSubspace> affine;
    affine.reserve(members.size());
    for (auto& s : members) affine.emplace_back(std::move(s));
    return SubspaceFamily(std::move(affine));
}

std::size_t SubspaceFamily::max_dim() const {
    std::size_t k = 0;
    for (const auto& m : members_) k = std::max(k, m.direction.dim());
    return k;
}

Subspace orthonormalize(const Eigen::MatrixXd& spanning_vectors) {
    if (spanning_vectors.cols() == 0 || spanning_vectors.rows() == 0)
        throw DegenerateInputError("orthonormalize needs at least one spanning vector");
    if (!spanning_vectors.allFinite()) throw InputError("spanning vectors contain non-finite entries");
    if (spanning_vectors.colwise().norm().maxCoeff() <= 1e-12)
        throw DegenerateInputError("all spanning vectors are numerically zero");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(spanning_vectors, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double cutoff = kRankTolerance * sv(0);
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > cutoff) ++rank;
    return Subspace(svd.matrixU().leftCols(rank));
}

Subspace random_subspace(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 1 || k > n)
        throw DimensionError("random_subspace needs 1 <= k <= n, got k=" + std::to_string(k) + ", n=" +
                             std::to_string(n));
    Engine engine = make_engine(seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
    for (Eigen::Index j = 0; j < g.cols(); ++j)
        for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = normal(engine);
    // A Householder QR of a Gaussian matrix spans a Haar-distributed subspace.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(g.rows(), g.cols());
    return Subspace(std::move(q));
}

Subspace sparse_subspace(std::size_t n, const std::vector<std::size_t>& support) {
    if (support.empty()) throw InputError("sparse_subspace needs a nonempty support");
    Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(support.size()));
    std::vector<bool> seen(n, false);
    for (std::size_t j = 0; j < support.size(); ++j) {
        const std::size_t idx = support[j];
        if (idx >= n) throw InputError("support index " + std::to_string(idx) + " out of range for n=" + std::to_string(n));
        if (seen[idx]) throw InputError("duplicate support index " + std::to_string(idx));
        seen[idx] = true;
        basis(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(j)) = 1.0;
    }
    return Subspace(std::move(basis));
}

double grassmann_distance(const Subspace& v, const Subspace& w) {
    if (v.ambient_dim() != w.ambient_dim())
        throw DimensionError("grassmann_distance: ambient dimensions differ");
    // Some unit v is orthogonal to W whenever dim V > dim W.
    double cos_min = 0.0;
    if (v.dim() <= w.dim()) {
        const Eigen::MatrixXd cross = w.basis().transpose() * v.basis();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross);
        cos_min = std::min(1.0, svd.singularValues().minCoeff());
    }
    return std::sqrt(std::max(0.0, 2.0 - 2.0 * cos_min));
}

Eigen::VectorXd random_unit_vector(std::size_t n, std::uint64_t seed) {
    Engine engine = make_engine(seed);
    std::normal_distribution<double> normal;
    Eigen::VectorXd x(static_cast<Eigen::Index>(n));
    double norm2 = 0.0;
    while (norm2 == 0.0) {
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = normal(engine);
        norm2 = x.squaredNorm();
    }
    return x / std::sqrt(norm2);
}

double net_cardinality_bound(std::size_t k, double epsilon) {
    return std::pow(3.0 / epsilon, static_cast<double>(k));
}

namespace {

// Largest inner product between x and any net point.
double best_cosine(const EpsilonNet& net, const double* x, std::vector<double>& scratch) {
    const std::size_t size = net.size();
    if (size == 0) return -2.0;
    scratch.resize(size);
    kernels::gemv(net.points.data(), size, net.dim, x, scratch.data());
    return *std::max_element(scratch.begin(), scratch.end());
}

}  // namespace

EpsilonNet epsilon_net(std::size_t k, double epsilon, std::uint64_t seed, const NetOptions& options) {
    if (k < 1) throw InputError("epsilon_net needs k >= 1");
    if (!(epsilon > 0.0) || epsilon > 1.0) throw InputError("epsilon_net needs 0 < epsilon <= 1");
    const double bound = net_cardinality_bound(k, epsilon);
    if (bound > options.cardinality_budget)
        throw ResourceError("epsilon-net bound (3/eps)^k = " + std::to_string(bound) +
                            " exceeds the cardinality budget " + std::to_string(options.cardinality_budget));

    EpsilonNet net;
    net.epsilon = epsilon;
    net.dim = k;
    // |x - y| > eps  <=>  <x, y> < 1 - eps^2 / 2 on the unit sphere.
    const double separation_cos = 1.0 - 0.5 * epsilon * epsilon;
    std::vector<double> scratch;

    auto try_add = [&](const Eigen::VectorXd& x) {
        if (best_cosine(net, x.data(), scratch) < separation_cos) {
            net.points.insert(net.points.end(), x.data(), x.data() + k);
            return true;
        }
        return false;
    };

    // Packing phase: stop once a long run of candidates is already covered.
    std::uint64_t counter = 0;
    std::size_t misses = 0;
    while (misses < std::max<std::size_t>(1000, 10 * net.size())) {
        if (try_add(random_unit_vector(k, derive(seed, counter++))))
            misses = 0;
        else
            ++misses;
    }

    // Verification: uncovered probes are themselves eps-separated from the
    // net, so adding them keeps it a packing.
    for (std::size_t round = 0; round < options.max_verify_rounds; ++round) {
        const std::uint64_t probe_seed = derive(seed ^ stream::probe, round);
        bool covered = true;
        for (std::size_t i = 0; i < options.probes; ++i)
            if (try_add(random_unit_vector(k, derive(probe_seed, i)))) covered = false;
        if (covered) return net;
    }
    throw ResourceError("epsilon_net: covering check still failing after " +
                        std::to_string(options.max_verify_rounds) + " verification rounds");
}

double net_covering_radius_estimate(const EpsilonNet& net, std::size_t probes, std::uint64_t seed) {
    std::vector<double> scratch;
    double worst = 0.0;
    for (std::size_t i = 0; i < probes; ++i) {
        const Eigen::VectorXd x = random_unit_vector(net.dim, derive(seed, i));
        const double c = std::min(1.0, best_cosine(net, x.data(), scratch));
        worst = std::max(worst, std::sqrt(std::max(0.0, 2.0 - 2.0 * c)));
    }
    return worst;
}

SubspaceFamily reduce_affine(const SubspaceFamily& family) {
    std::vector<AffineSubspace> linear;
    linear.reserve(family.size());
    for (const auto& m : family.members()) linear.emplace_back(m.direction);
    return SubspaceFamily(std::move(linear));
}

SubspaceFamily cross_family(const SubspaceFamily& family, std::size_t budget) {
    const std::size_t p = family.size();
    if (p * (p + 1) / 2 > budget)
        throw ResourceError("cross family would have " + std::to_string(p * (p + 1) / 2) +
                            " members, above the budget of " + std::to_string(budget));
    std::vector<AffineSubspace> out;
    out.reserve(p * (p + 1) / 2);
    const std::size_t n = family.ambient_dim();
    for (std::size_t a = 0; a < p; ++a) {
        const Subspace& wa = family[a].direction;
        out.emplace_back(wa);
        for (std::size_t b = a + 1; b < p; ++b) {
            const Subspace& wb = family[b].direction;
            Eigen::MatrixXd joined(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(wa.dim() + wb.dim()));
            joined << wa.basis(), wb.basis();
            out.emplace_back(orthonormalize(joined));
        }
    }
    return SubspaceFamily(std::move(out));
}

}  // namespace subembed
