#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "quivermap/common.hpp"

namespace qm {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// ---------------------------------------------------------------------------
// Deterministic random numbers.
//
// std::mt19937_64 is specified bit-exactly by the standard; the distributions
// are not, so the gaussian transform is done by hand to keep seeded output
// identical across standard libraries.
// ---------------------------------------------------------------------------

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform01() {
        // 53-bit mantissa, in (0,1].
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    }

    double gauss() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    /// Standard complex gaussian, E|z|^2 = 1.
    cplx cgauss() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-std::log(u1));
        return {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
    }

    std::uint64_t next() { return engine_(); }

    /// Independent stream derived from a seed and a stream index
    /// (splitmix64 finalizer), so per-arrow sampling does not depend on
    /// iteration order.
    static Rng derive(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return Rng(z ^ (z >> 31));
    }

private:
    std::mt19937_64 engine_;
};

inline Mat gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    Mat out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = rng.cgauss();
    return out;
}

// ---------------------------------------------------------------------------
// Small dense helpers.
// ---------------------------------------------------------------------------

inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// Twist slice k of an n_h x (n_t * m) arrow matrix; columns are ordered
/// (tail index, twist index), i.e. column (a, k) sits at a*m + k.
inline Mat twist_slice(const Mat& phi, int k, int m) {
    const Eigen::Index nt = phi.cols() / m;
    Mat out(phi.rows(), nt);
    for (Eigen::Index a = 0; a < nt; ++a) out.col(a) = phi.col(a * m + k);
    return out;
}

inline void set_twist_slice(Mat& phi, int k, int m, const Mat& slice) {
    for (Eigen::Index a = 0; a < slice.cols(); ++a) phi.col(a * m + k) = slice.col(a);
}

inline Mat hermitian_part(const Mat& a) { return 0.5 * (a + a.adjoint()); }

/// Real Frobenius pairing Re tr(a^* b).
inline double frob_inner(const Mat& a, const Mat& b) {
    return (a.adjoint() * b).trace().real();
}

/// exp(h) for hermitian h via its spectral decomposition.
inline Mat hermitian_exp(const Mat& h) {
    if (h.rows() == 0) return h;
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    return es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() *
           es.eigenvectors().adjoint();
}

// ---------------------------------------------------------------------------
// Subspaces, represented by matrices with orthonormal columns.
// ---------------------------------------------------------------------------

/// Orthonormal basis of the column space, rank decided at rtol relative to
/// the largest singular value.
inline Mat column_space(const Mat& m, double rtol = tol::rank) {
    if (m.cols() == 0 || m.rows() == 0) return Mat(m.rows(), 0);
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) <= 0.0) return Mat(m.rows(), 0);
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > rtol * sv(0)) ++r;
    return svd.matrixU().leftCols(r);
}

/// Orthonormal basis of the null space.
inline Mat kernel_basis(const Mat& m, double rtol = tol::rank) {
    if (m.cols() == 0) return Mat(0, 0);
    if (m.rows() == 0) return Mat::Identity(m.cols(), m.cols());
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > rtol * smax && smax > 0.0) ++r;
    return svd.matrixV().rightCols(m.cols() - r);
}

inline Mat subspace_sum(const Mat& u, const Mat& w, double rtol = tol::rank) {
    if (u.cols() == 0) return w;
    if (w.cols() == 0) return u;
    Mat joined(u.rows(), u.cols() + w.cols());
    joined << u, w;
    return column_space(joined, rtol);
}

inline Mat subspace_intersection(const Mat& u, const Mat& w, double rtol = tol::rank) {
    if (u.cols() == 0 || w.cols() == 0) return Mat(u.rows(), 0);
    // x = u a = w b  <=>  [u, -w] [a; b] = 0.
    Mat joined(u.rows(), u.cols() + w.cols());
    joined << u, -w;
    Mat null = kernel_basis(joined, rtol);
    if (null.cols() == 0) return Mat(u.rows(), 0);
    return column_space(u * null.topRows(u.cols()), rtol);
}

/// Largest principal-angle deviation between equal-dimension subspaces:
/// 0 when equal, 1 when some direction is orthogonal.
inline double subspace_distance(const Mat& u, const Mat& w) {
    if (u.cols() != w.cols()) return 1.0;
    if (u.cols() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(u.adjoint() * w);
    const double smin = svd.singularValues().minCoeff();
    return 1.0 - std::min(1.0, smin);
}

inline bool subspace_equal(const Mat& u, const Mat& w, double tolerance = tol::subspace_eq) {
    return u.cols() == w.cols() && subspace_distance(u, w) <= tolerance;
}

inline double orthonormality_residual(const Mat& u) {
    if (u.cols() == 0) return 0.0;
    return (u.adjoint() * u - Mat::Identity(u.cols(), u.cols())).norm();
}

}  // namespace qm
