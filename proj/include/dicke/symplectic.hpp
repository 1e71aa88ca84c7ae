#pragma once

// Symplectic linear algebra on quadrature space with ordering (q1, p1, q2, p2, ...).

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "dicke/errors.hpp"

namespace dicke::symplectic {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Symplectic eigenvalues below this are treated as zero (units of the input matrix).
inline constexpr double kGapFloor = 1e-10;
inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr double kPairingTolerance = 1e-8;

/// Direct sum of n copies of [[0, 1], [-1, 0]].
inline Matrix symplectic_form(int n) {
    if (n < 1) {
        throw Error(ErrorCode::InvalidArgument, "symplectic_form needs n >= 1, got " + std::to_string(n));
    }
    Matrix omega = Matrix::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        omega(2 * i, 2 * i + 1) = 1.0;
        omega(2 * i + 1, 2 * i) = -1.0;
    }
    return omega;
}

namespace detail {

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline void require_even_square(const Matrix& k) {
    if (k.rows() != k.cols() || k.rows() == 0 || k.rows() % 2 != 0) {
        throw Error(ErrorCode::InvalidArgument,
                    "expected an even-dimensional square matrix, got " + std::to_string(k.rows()) + "x" +
                        std::to_string(k.cols()));
    }
}

inline void require_symmetric(const Matrix& k) {
    const double scale = std::max(1.0, max_abs(k));
    const double asym = max_abs(k - k.transpose());
    if (!(asym <= kSymmetryTolerance * scale)) {
        throw Error(ErrorCode::NonSymmetric, "max |K - K^T| = " + std::to_string(asym));
    }
}

struct SpectralRoot {
    Matrix root;
    double minEigenvalue;
    double scale;
};

// Symmetric square root. Eigenvalues that are negative only at roundoff level are clamped to zero.
inline SpectralRoot psd_sqrt(const Matrix& k) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(k);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorCode::NumericalFailure, "symmetric eigensolver did not converge");
    }
    Vector ev = es.eigenvalues();
    const double scale = std::max(ev.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    const double minEv = ev.minCoeff();
    if (minEv < -1e-12 * scale) {
        throw Error(ErrorCode::NonPositiveDefinite, "matrix has eigenvalue " + std::to_string(minEv));
    }
    ev = ev.cwiseMax(0.0).cwiseSqrt();
    return {es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose(), minEv, scale};
}

inline Eigen::Matrix2d rotation(double angle) {
    Eigen::Matrix2d r;
    r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return r;
}

} // namespace detail

/// Moduli of the eigenvalues of Omega*K, one per mode, sorted descending.
/// K must be symmetric positive semi-definite.
inline Vector symplectic_eigenvalues(const Matrix& k) {
    detail::require_even_square(k);
    detail::require_symmetric(k);
    const int n = static_cast<int>(k.rows() / 2);

    // sqrt(K) Omega sqrt(K) is antisymmetric and similar to Omega K; its singular values are the
    // symplectic eigenvalues, each appearing twice.
    const auto sr = detail::psd_sqrt(k);
    const Matrix a = sr.root * symplectic_form(n) * sr.root;
    Eigen::JacobiSVD<Matrix> svd(a);
    const Vector s = svd.singularValues();
    const double scale = std::max(s(0), std::numeric_limits<double>::min());

    Vector nu(n);
    for (int i = 0; i < n; ++i) {
        if (std::abs(s(2 * i) - s(2 * i + 1)) > kPairingTolerance * scale) {
            throw Error(ErrorCode::NumericalFailure, "unpaired symplectic spectrum at index " + std::to_string(i));
        }
        nu(i) = 0.5 * (s(2 * i) + s(2 * i + 1));
    }
    return nu;
}

struct WilliamsonDecomposition {
    Matrix M;   ///< symplectic, K = M V M^T
    Vector nu;  ///< symplectic eigenvalues, descending, matching the column pairs of M

    Matrix V() const {
        Vector d(2 * nu.size());
        for (Eigen::Index i = 0; i < nu.size(); ++i) {
            d(2 * i) = nu(i);
            d(2 * i + 1) = nu(i);
        }
        return d.asDiagonal();
    }
};

/// Williamson normal form K = M diag(nu1, nu1, ..., nun, nun) M^T with M Omega M^T = Omega.
///
/// The antisymmetric matrix A = K^{1/2} Omega K^{1/2} is brought to real Schur form
/// O^T A O = (+) [[0, nu_i], [-nu_i, 0]]; then M = K^{1/2} O V^{-1/2}. Each 2x2 Schur block is one
/// conjugate pair +-i nu of Omega K, and the orthogonality of O keeps degenerate pairs independent.
inline WilliamsonDecomposition williamson(const Matrix& k) {
    detail::require_even_square(k);
    detail::require_symmetric(k);
    const int dim = static_cast<int>(k.rows());
    const int n = dim / 2;

    Eigen::SelfAdjointEigenSolver<Matrix> es(k);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorCode::NumericalFailure, "symmetric eigensolver did not converge");
    }
    const Vector ev = es.eigenvalues();
    const double scale = ev.cwiseAbs().maxCoeff();
    if (!(ev.minCoeff() > 64.0 * std::numeric_limits<double>::epsilon() * scale)) {
        throw Error(ErrorCode::NonPositiveDefinite, "smallest eigenvalue " + std::to_string(ev.minCoeff()));
    }
    const Matrix root = es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
    Matrix a = root * symplectic_form(n) * root;
    a = 0.5 * (a - a.transpose()).eval();

    Eigen::RealSchur<Matrix> schur(a);
    if (schur.info() != Eigen::Success) {
        throw Error(ErrorCode::NumericalFailure, "real Schur decomposition did not converge");
    }
    const Matrix& t = schur.matrixT();
    Matrix o = schur.matrixU();
    const double tScale = std::max(detail::max_abs(t), std::numeric_limits<double>::min());

    std::vector<std::pair<double, int>> pairs;  // (nu, first column)
    for (int i = 0; i < dim;) {
        const bool block = i + 1 < dim && t(i + 1, i) != 0.0;
        if (!block) {
            // A lone real eigenvalue means the pair +-i nu collapsed onto the real axis.
            throw Error(ErrorCode::NearSingular, "symplectic eigenvalue indistinguishable from zero");
        }
        const double b = t(i, i + 1);
        const double c = t(i + 1, i);
        if (std::abs(t(i, i)) > kPairingTolerance * tScale || std::abs(t(i + 1, i + 1)) > kPairingTolerance * tScale ||
            b * c >= 0.0 || std::abs(std::abs(b) - std::abs(c)) > kPairingTolerance * tScale) {
            throw Error(ErrorCode::NumericalFailure, "Schur block is not a conjugate imaginary pair");
        }
        if (b < 0.0) {
            o.col(i).swap(o.col(i + 1));
        }
        pairs.emplace_back(std::sqrt(-b * c), i);
        i += 2;
    }

    std::stable_sort(pairs.begin(), pairs.end(), [](const auto& l, const auto& r) { return l.first > r.first; });

    WilliamsonDecomposition out;
    out.nu.resize(n);
    Matrix ordered(dim, dim);
    Vector invRoot(dim);
    for (int p = 0; p < n; ++p) {
        out.nu(p) = pairs[p].first;
        ordered.col(2 * p) = o.col(pairs[p].second);
        ordered.col(2 * p + 1) = o.col(pairs[p].second + 1);
        invRoot(2 * p) = invRoot(2 * p + 1) = 1.0 / std::sqrt(pairs[p].first);
    }
    if (out.nu(n - 1) < kGapFloor) {
        throw Error(ErrorCode::NearSingular, "symplectic eigenvalue " + std::to_string(out.nu(n - 1)) +
                                                 " below gap floor");
    }
    out.M = root * ordered * invRoot.asDiagonal();
    return out;
}

/// Inverse of a symplectic matrix, Omega M^T Omega^T.
inline Matrix symplectic_inverse(const Matrix& m) {
    const Matrix omega = symplectic_form(static_cast<int>(m.rows() / 2));
    return omega * m.transpose() * omega.transpose();
}

/// Canonical three-mode form of 2C reachable by local symplectic maps:
///
///     | a1  0   c3+ 0   c2+ 0   |
///     | 0   a1  0   c3- 0   c2- |
///     | c3+ 0   a2  0   c1+ 0   |
///     | 0   c3- 0   a2  0   c1- |
///     | c2+ 0   c1+ 0   a3  0   |
///     | 0   c2- 0   c1- 0   a3  |
///
/// Index i of cPlus/cMinus labels the pair of modes that excludes mode i.
struct StandardFormCM {
    std::array<double, 3> a{};
    std::array<double, 3> cPlus{};
    std::array<double, 3> cMinus{};
    Matrix transform;  ///< local symplectic L with L (2C) L^T = assembled()

    Matrix assembled() const {
        Matrix s = Matrix::Zero(6, 6);
        for (int i = 0; i < 3; ++i) {
            s(2 * i, 2 * i) = s(2 * i + 1, 2 * i + 1) = a[static_cast<std::size_t>(i)];
        }
        for (int p = 0; p < 3; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                const auto r = static_cast<std::size_t>(3 - p - q);
                s(2 * p, 2 * q) = s(2 * q, 2 * p) = cPlus[r];
                s(2 * p + 1, 2 * q + 1) = s(2 * q + 1, 2 * p + 1) = cMinus[r];
            }
        }
        return s;
    }
};

namespace detail {

inline constexpr std::array<std::pair<int, int>, 3> kModePairs{{{0, 1}, {0, 2}, {1, 2}}};

inline bool offdiagonal_blocks_diagonal(const Matrix& s, double tol) {
    for (auto [p, q] : kModePairs) {
        if (std::abs(s(2 * p, 2 * q + 1)) > tol || std::abs(s(2 * p + 1, 2 * q)) > tol) {
            return false;
        }
    }
    return true;
}

inline Matrix local_direct_sum(const std::array<Eigen::Matrix2d, 3>& blocks) {
    Matrix l = Matrix::Zero(6, 6);
    for (int i = 0; i < 3; ++i) {
        l.block<2, 2>(2 * i, 2 * i) = blocks[static_cast<std::size_t>(i)];
    }
    return l;
}

// Rotation R minimizing the off-diagonal entries of X R^T summed over the given blocks.
// Each entry is p cos t + q sin t, so the objective is c0 + c1 cos 2t + s1 sin 2t.
inline Eigen::Matrix2d aligning_rotation(std::initializer_list<Eigen::Matrix2d> blocks) {
    double c1 = 0.0;
    double s1 = 0.0;
    for (const auto& x : blocks) {
        const std::array<std::pair<double, double>, 2> terms{{{x(0, 1), x(0, 0)}, {x(1, 0), -x(1, 1)}}};
        for (auto [p, q] : terms) {
            c1 += 0.5 * (p * p - q * q);
            s1 += p * q;
        }
    }
    if (c1 == 0.0 && s1 == 0.0) {
        return Eigen::Matrix2d::Identity();
    }
    return rotation(0.5 * (std::atan2(s1, c1) + std::numbers::pi));
}

} // namespace detail

/// Brings a three-mode covariance matrix C (vacuum = I/2) to standard form.
///
/// Each single-mode block of 2C is first normalized to a_i * I (identity when the block already is
/// proportional to I). If the off-diagonal blocks are then diagonal or anti-diagonal in one of the
/// three recognized patterns, quarter-turn rotations on selected modes finish the job. Otherwise
/// residual local rotations are fitted: an SVD fixes two modes and the third follows from a
/// least-squares angle. With pure = true the result must also satisfy det(assembled) = 1.
inline StandardFormCM standard_form(const Matrix& cov, bool pure) {
    if (cov.rows() != 6 || cov.cols() != 6) {
        throw Error(ErrorCode::NotThreeMode, "expected a 6x6 covariance matrix, got " + std::to_string(cov.rows()) +
                                                 "x" + std::to_string(cov.cols()));
    }
    detail::require_symmetric(cov);
    const Matrix twoC = 2.0 * cov;
    const double scale = std::max(1.0, detail::max_abs(twoC));
    const double tol = 1e-8 * scale;

    StandardFormCM out;
    std::array<Eigen::Matrix2d, 3> local;
    for (int i = 0; i < 3; ++i) {
        const Eigen::Matrix2d c = twoC.block<2, 2>(2 * i, 2 * i);
        const double det = c.determinant();
        if (!(det > 0.0) || c(0, 0) <= 0.0) {
            throw Error(ErrorCode::NonPhysical, "single-mode block " + std::to_string(i) + " is not positive definite");
        }
        const double ai = std::sqrt(det);
        out.a[static_cast<std::size_t>(i)] = ai;
        auto& s = local[static_cast<std::size_t>(i)];
        if ((c - ai * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, ai)) {
            s.setIdentity();
        } else {
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(c);
            s = std::sqrt(ai) * es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                es.eigenvectors().transpose();
        }
    }
    Matrix l = detail::local_direct_sum(local);
    Matrix f = l * twoC * l.transpose();

    const Eigen::Matrix2d one = Eigen::Matrix2d::Identity();
    const Eigen::Matrix2d omega2 = symplectic_form(1);
    const std::array<std::array<Eigen::Matrix2d, 3>, 4> swaps{{
        {one, one, one},
        {one, omega2, omega2},
        {omega2, omega2, one},
        {one, omega2, one},
    }};

    bool found = false;
    for (const auto& sw : swaps) {
        const Matrix t = detail::local_direct_sum(sw);
        const Matrix g = t * f * t.transpose();
        if (detail::offdiagonal_blocks_diagonal(g, tol)) {
            l = t * l;
            f = g;
            found = true;
            break;
        }
    }

    if (!found) {
        for (auto [p, q] : detail::kModePairs) {
            const int r = 3 - p - q;
            const Eigen::Matrix2d b = f.block<2, 2>(2 * p, 2 * q);
            Eigen::JacobiSVD<Eigen::Matrix2d> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
            const Eigen::Vector2d sv = svd.singularValues();
            if (sv(0) <= tol || sv(0) - sv(1) <= 1e-6 * sv(0)) {
                continue;  // rotation not determined by this block
            }
            Eigen::Matrix2d u = svd.matrixU();
            Eigen::Matrix2d v = svd.matrixV();
            if (u.determinant() < 0.0) u.col(1) *= -1.0;
            if (v.determinant() < 0.0) v.col(1) *= -1.0;

            std::array<Eigen::Matrix2d, 3> rot;
            rot[static_cast<std::size_t>(p)] = u.transpose();
            rot[static_cast<std::size_t>(q)] = v.transpose();
            rot[static_cast<std::size_t>(r)] = detail::aligning_rotation(
                {Eigen::Matrix2d(u.transpose() * f.block<2, 2>(2 * p, 2 * r)),
                 Eigen::Matrix2d(v.transpose() * f.block<2, 2>(2 * q, 2 * r))});
            const Matrix t = detail::local_direct_sum(rot);
            const Matrix g = t * f * t.transpose();
            if (detail::offdiagonal_blocks_diagonal(g, tol)) {
                l = t * l;
                f = g;
                found = true;
                break;
            }
        }
    }
    if (!found) {
        throw Error(ErrorCode::PatternFailure, "no local rotation brings the off-diagonal blocks to diagonal form");
    }

    for (auto [p, q] : detail::kModePairs) {
        const auto r = static_cast<std::size_t>(3 - p - q);
        out.cPlus[r] = f(2 * p, 2 * q);
        out.cMinus[r] = f(2 * p + 1, 2 * q + 1);
    }
    out.transform = l;

    if (pure) {
        const double det = out.assembled().determinant();
        if (std::abs(det - 1.0) > 1e-7) {
            throw Error(ErrorCode::NotPure, "standard form has det = " + std::to_string(det));
        }
    }
    return out;
}

} // namespace dicke::symplectic
