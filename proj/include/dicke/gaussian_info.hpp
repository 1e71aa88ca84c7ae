#pragma once

// Correlation measures for Gaussian states of the three parties x, y (optical modes) and j (atoms).
// Entropies are Renyi-2 in nats; covariance matrices use the convention vacuum = I/2.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dicke/errors.hpp"
#include "dicke/symplectic.hpp"

namespace dicke::info {

using symplectic::Matrix;

enum class Mode { x, y, j };
using ModeList = std::vector<Mode>;

constexpr std::string_view to_string(Mode m) {
    switch (m) {
    case Mode::x: return "x";
    case Mode::y: return "y";
    case Mode::j: return "j";
    }
    return "?";
}

inline constexpr double kPurityTolerance = 1e-7;
inline constexpr double kBranchTieTolerance = 1e-10;

class CovarianceMatrix {
public:
    CovarianceMatrix(ModeList modes, Matrix entries) : modes_(std::move(modes)), entries_(std::move(entries)) {
        const auto n = static_cast<Eigen::Index>(modes_.size());
        if (n == 0 || entries_.rows() != 2 * n || entries_.cols() != 2 * n) {
            throw Error(ErrorCode::InvalidArgument, "covariance matrix shape does not match mode labels");
        }
        for (std::size_t a = 0; a < modes_.size(); ++a) {
            for (std::size_t b = a + 1; b < modes_.size(); ++b) {
                if (modes_[a] == modes_[b]) {
                    throw Error(ErrorCode::InvalidArgument, "duplicate mode label " + std::string(to_string(modes_[a])));
                }
            }
        }
        symplectic::detail::require_symmetric(entries_);
    }

    static CovarianceMatrix vacuum(ModeList modes) {
        const auto dim = static_cast<Eigen::Index>(2 * modes.size());
        return {std::move(modes), 0.5 * Matrix::Identity(dim, dim)};
    }

    const ModeList& modes() const noexcept { return modes_; }
    const Matrix& entries() const noexcept { return entries_; }
    int mode_count() const noexcept { return static_cast<int>(modes_.size()); }

    std::optional<int> index_of(Mode m) const {
        const auto it = std::find(modes_.begin(), modes_.end(), m);
        if (it == modes_.end()) return std::nullopt;
        return static_cast<int>(it - modes_.begin());
    }

private:
    ModeList modes_;
    Matrix entries_;
};

/// Principal submatrix on the kept modes, in the order they appear in c.
inline CovarianceMatrix reduce(const CovarianceMatrix& c, const ModeList& keep) {
    if (keep.empty()) {
        throw Error(ErrorCode::InvalidArgument, "reduce needs at least one mode");
    }
    for (Mode m : keep) {
        if (!c.index_of(m)) {
            throw Error(ErrorCode::UnknownMode, "mode " + std::string(to_string(m)) + " not present");
        }
    }
    ModeList kept;
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < c.modes().size(); ++i) {
        if (std::find(keep.begin(), keep.end(), c.modes()[i]) != keep.end()) {
            kept.push_back(c.modes()[i]);
            rows.push_back(static_cast<Eigen::Index>(2 * i));
            rows.push_back(static_cast<Eigen::Index>(2 * i + 1));
        }
    }
    return {std::move(kept), c.entries()(rows, rows)};
}

inline double det_2c(const CovarianceMatrix& c) { return (2.0 * c.entries()).determinant(); }

inline bool is_pure(const CovarianceMatrix& c) { return std::abs(det_2c(c) - 1.0) <= kPurityTolerance; }

inline void require_pure(const CovarianceMatrix& c) {
    const double det = det_2c(c);
    if (std::abs(det - 1.0) > kPurityTolerance) {
        throw Error(ErrorCode::NotPure, "det(2C) = " + std::to_string(det));
    }
}

/// Smallest symplectic eigenvalue of 2C; at least 1 for a physical state.
inline double min_symplectic_eigenvalue_2c(const CovarianceMatrix& c) {
    const auto nu = symplectic::symplectic_eigenvalues(2.0 * c.entries());
    return nu(nu.size() - 1);
}

/// S = 1/2 ln det(2C).
inline double renyi2_entropy(const CovarianceMatrix& c) {
    const double det = det_2c(c);
    if (!(det >= 1.0 - kPurityTolerance)) {
        throw Error(ErrorCode::NonPhysical, "det(2C) = " + std::to_string(det) + " < 1");
    }
    return 0.5 * std::log(det);
}

inline double entropy_of(const CovarianceMatrix& c, const ModeList& part) { return renyi2_entropy(reduce(c, part)); }

/// I(A:B) = S(A) + S(B) - S(AB).
inline double mutual_information(const CovarianceMatrix& c, const ModeList& a, const ModeList& b) {
    if (a.empty() || b.empty()) {
        throw Error(ErrorCode::InvalidArgument, "mutual information needs two nonempty parties");
    }
    ModeList ab = a;
    for (Mode m : b) {
        if (std::find(a.begin(), a.end(), m) != a.end()) {
            throw Error(ErrorCode::InvalidArgument, "parties overlap on mode " + std::string(to_string(m)));
        }
        ab.push_back(m);
    }
    return entropy_of(c, a) + entropy_of(c, b) - entropy_of(c, ab);
}

/// Entanglement of formation across side : rest for a pure global state, which is the
/// entropy of either side.
inline double eof_pure_bipartition(const CovarianceMatrix& c, const ModeList& side) {
    require_pure(c);
    return entropy_of(c, side);
}

enum class EofBranch { Separable, Intermediate, Asymmetric };

struct PairEntanglement {
    double value = 0.0;  ///< 1/2 ln g
    double g = 1.0;
    EofBranch branch = EofBranch::Separable;
    bool nearBoundary = false;  ///< a_k within tie tolerance of a branch boundary
};

/// Gaussian Renyi-2 entanglement of formation between modes i and j of a pure three-mode state,
/// from the local invariants a = sqrt(det 2C_local) of the three modes.
inline PairEntanglement renyi2_eof_from_invariants(double ai, double aj, double ak) {
    const double ai2 = ai * ai;
    const double aj2 = aj * aj;
    const double ak2 = ak * ak;
    const double sum = ai2 + aj2;
    const double diff = ai2 - aj2;

    const double upper = std::sqrt(std::max(sum - 1.0, 0.0));
    const double alpha =
        std::sqrt((2.0 * sum + diff * diff + std::abs(diff) * std::sqrt(diff * diff + 8.0 * sum)) / (2.0 * sum));

    PairEntanglement out;
    out.nearBoundary =
        std::abs(ak - upper) <= kBranchTieTolerance || std::abs(ak - alpha) <= kBranchTieTolerance;

    if (!out.nearBoundary && ak >= upper) {
        out.branch = EofBranch::Separable;
        out.g = 1.0;
    } else if (out.nearBoundary || ak > alpha) {
        out.branch = EofBranch::Intermediate;
        const std::array<double, 3> a{ai, aj, ak};
        double delta = 1.0;
        double deltaScale = 1.0;
        for (double s2 : {1.0, -1.0}) {
            for (double s3 : {1.0, -1.0}) {
                const double v = a[0] + s2 * a[1] + s3 * a[2];
                const double term = v * v - 1.0;
                delta *= term;
                deltaScale *= 1.0 + std::abs(term);
            }
        }
        if (delta < 0.0) {
            if (delta < -1e-12 * deltaScale) {
                throw Error(ErrorCode::NonPhysical, "negative discriminant " + std::to_string(delta));
            }
            delta = 0.0;
        }
        const double a1s = a[0] * a[0];
        const double a2s = a[1] * a[1];
        const double a3s = a[2] * a[2];
        const double beta = 2.0 * (a1s + a2s + a3s) + 2.0 * (a1s * a2s + a1s * a3s + a2s * a3s) -
                            (a1s * a1s + a2s * a2s + a3s * a3s) - std::sqrt(delta) - 1.0;
        out.g = beta / (8.0 * ak2);
    } else {
        out.branch = EofBranch::Asymmetric;
        out.g = (diff * diff) / ((ak2 - 1.0) * (ak2 - 1.0));
    }
    out.value = 0.5 * std::log(out.g);
    return out;
}

namespace detail {

inline std::array<int, 3> require_three_modes(const CovarianceMatrix& c, Mode i, Mode j) {
    if (c.mode_count() != 3) {
        throw Error(ErrorCode::NotThreeMode, "expected three modes, got " + std::to_string(c.mode_count()));
    }
    if (i == j) {
        throw Error(ErrorCode::InvalidArgument, "pair modes must differ");
    }
    const auto ii = c.index_of(i);
    const auto jj = c.index_of(j);
    if (!ii || !jj) {
        throw Error(ErrorCode::UnknownMode, "pair mode not present");
    }
    return {*ii, *jj, 3 - *ii - *jj};
}

} // namespace detail

/// E(i:j) for two of the three modes of a pure state, via the standard form.
inline PairEntanglement eof_two_of_three(const CovarianceMatrix& c, Mode i, Mode j) {
    const auto idx = detail::require_three_modes(c, i, j);
    require_pure(c);
    const auto sf = symplectic::standard_form(c.entries(), true);
    const auto at = [&](int k) { return sf.a[static_cast<std::size_t>(k)]; };
    return renyi2_eof_from_invariants(at(idx[0]), at(idx[1]), at(idx[2]));
}

/// E(i : jk) - E(i : j) - E(i : k), anchored at i; nonnegative by monogamy.
inline double tripartite_residual(const CovarianceMatrix& c, Mode anchor, std::pair<Mode, Mode> pair) {
    if (anchor == pair.first || anchor == pair.second) {
        throw Error(ErrorCode::InvalidArgument, "anchor must not belong to the pair");
    }
    const double whole = eof_pure_bipartition(c, {anchor});
    return whole - eof_two_of_three(c, anchor, pair.first).value - eof_two_of_three(c, anchor, pair.second).value;
}

struct CorrelationReport {
    double sX = 0, sY = 0, sJ = 0, sXY = 0, sXJ = 0, sYJ = 0;
    double iXY_J = 0, iXJ_Y = 0, iYJ_X = 0;
    double iX_Y = 0, iX_J = 0, iY_J = 0;
    // Entanglement measures need a pure global state; left empty otherwise.
    std::optional<double> eX_J, eY_J, eX_Y;
    std::optional<double> tripartiteXYJ;  ///< S(j) - E(x:j) - E(y:j): residual anchored at j
    std::optional<double> tripartiteJYX;  ///< S(x) - E(x:y) - E(x:j): residual anchored at x
    bool diverged = false;
};

/// All entropies, mutual informations, pair entanglements and monogamy residuals of a
/// three-party state over {x, y, j}.
inline CorrelationReport correlation_report(const CovarianceMatrix& c) {
    for (Mode m : {Mode::x, Mode::y, Mode::j}) {
        if (!c.index_of(m) || c.mode_count() != 3) {
            throw Error(ErrorCode::NotThreeMode, "report needs exactly the modes x, y, j");
        }
    }
    using enum Mode;
    CorrelationReport r;
    r.sX = entropy_of(c, {x});
    r.sY = entropy_of(c, {y});
    r.sJ = entropy_of(c, {j});
    r.sXY = entropy_of(c, {x, y});
    r.sXJ = entropy_of(c, {x, j});
    r.sYJ = entropy_of(c, {y, j});
    const double sAll = renyi2_entropy(c);
    r.iXY_J = r.sXY + r.sJ - sAll;
    r.iXJ_Y = r.sXJ + r.sY - sAll;
    r.iYJ_X = r.sYJ + r.sX - sAll;
    r.iX_Y = r.sX + r.sY - r.sXY;
    r.iX_J = r.sX + r.sJ - r.sXJ;
    r.iY_J = r.sY + r.sJ - r.sYJ;

    if (is_pure(c)) {
        // One standard form serves all three pairs.
        const auto sf = symplectic::standard_form(c.entries(), true);
        const auto a = [&](Mode m) { return sf.a[static_cast<std::size_t>(*c.index_of(m))]; };
        const double exj = renyi2_eof_from_invariants(a(x), a(j), a(y)).value;
        const double eyj = renyi2_eof_from_invariants(a(y), a(j), a(x)).value;
        const double exy = renyi2_eof_from_invariants(a(x), a(y), a(j)).value;
        r.eX_J = exj;
        r.eY_J = eyj;
        r.eX_Y = exy;
        r.tripartiteXYJ = r.sJ - exj - eyj;
        r.tripartiteJYX = r.sX - exy - exj;
    }
    return r;
}

} // namespace dicke::info
