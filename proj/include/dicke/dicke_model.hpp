#pragma once

// Two-mode Dicke model in the thermodynamic limit:
//   H = w (ax+ ax + ay+ ay) + w0 Jz + lx/sqrt(2j) (ax+ + ax) Jx + ly/sqrt(2j) (ay+ + ay) Jy.
// Fluctuations are ordered (qx, px, qy, py, Q, P).

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "dicke/errors.hpp"
#include "dicke/gaussian_info.hpp"
#include "dicke/symplectic.hpp"

namespace dicke::model {

using symplectic::Matrix;

/// Offset (relative to lambda_c) used to approach the Goldstone line as a limit.
inline constexpr double kLimitEpsilon = 1e-6;

struct ModelParams {
    double omega = 1.0;
    double omega0 = 1.0;
    double lambdaX = 0.0;
    double lambdaY = 0.0;

    double lambdaC() const { return std::sqrt(omega * omega0); }

    void validate() const {
        if (!(omega > 0.0) || !(omega0 > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "frequencies must be positive");
        }
        if (!(lambdaX >= 0.0) || !(lambdaY >= 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "couplings must be nonnegative");
        }
    }
};

enum class Phase { Normal, SuperradiantX, SuperradiantY };

constexpr std::string_view to_string(Phase p) {
    switch (p) {
    case Phase::Normal: return "normal";
    case Phase::SuperradiantX: return "superradiant-x";
    case Phase::SuperradiantY: return "superradiant-y";
    }
    return "?";
}

struct ClassicalGroundState {
    Phase phase = Phase::Normal;
    double alphaX = 0.0;
    double alphaY = 0.0;
    double theta = std::numbers::pi;
    double phi = 0.0;
    double eGS = 0.0;  ///< energy per spin
};

/// lambda_x = lambda_y > lambda_c, where the U(1) symmetry is broken and nu3 = 0.
inline bool on_goldstone_line(const ModelParams& p) {
    return p.lambdaX == p.lambdaY && p.lambdaX > p.lambdaC();
}

namespace detail {

inline double superradiant_energy(double lambda, const ModelParams& p) {
    const double lc2 = p.omega * p.omega0;
    return -(lambda * lambda * lambda * lambda + lc2 * lc2) / (2.0 * lambda * lambda * p.omega);
}

} // namespace detail

/// Minimizer of the classical energy landscape over (alpha_x, alpha_y, theta, phi).
inline ClassicalGroundState classical_ground_state(const ModelParams& p) {
    p.validate();
    const double lc = p.lambdaC();
    const double lmax = std::max(p.lambdaX, p.lambdaY);
    ClassicalGroundState gs;
    if (lmax <= lc) {
        gs.eGS = -p.omega0;
        return gs;
    }
    if (on_goldstone_line(p)) {
        throw Error(ErrorCode::GoldstoneLine, "ground state is U(1)-degenerate at lambda_x = lambda_y > lambda_c");
    }
    const double ratio = lc * lc / (lmax * lmax);
    const double alpha = -(lmax / p.omega) * std::sqrt(1.0 - ratio * ratio);
    gs.theta = std::acos(-ratio);
    gs.eGS = detail::superradiant_energy(lmax, p);
    if (p.lambdaX > p.lambdaY) {
        gs.phase = Phase::SuperradiantX;
        gs.alphaX = alpha;
        gs.phi = 0.0;
    } else {
        gs.phase = Phase::SuperradiantY;
        gs.alphaY = alpha;
        gs.phi = 0.5 * std::numbers::pi;
    }
    return gs;
}

/// Ground-state energy per spin, continuous across the Goldstone line (evaluated there as a limit).
inline double ground_state_energy(const ModelParams& p) {
    p.validate();
    const double lmax = std::max(p.lambdaX, p.lambdaY);
    return lmax <= p.lambdaC() ? -p.omega0 : detail::superradiant_energy(lmax, p);
}

/// K in H2 = 1/2 r^T K r for the phase selected by the classical ground state.
inline Matrix fluctuation_matrix(const ModelParams& p) {
    const auto gs = classical_ground_state(p);
    const double w = p.omega;
    const double lc2 = p.omega * p.omega0;
    Matrix k = Matrix::Zero(6, 6);
    for (int i = 0; i < 4; ++i) k(i, i) = w;

    switch (gs.phase) {
    case Phase::Normal:
        k(4, 4) = k(5, 5) = lc2 / w;
        k(0, 4) = k(4, 0) = p.lambdaX;
        k(2, 5) = k(5, 2) = p.lambdaY;
        break;
    case Phase::SuperradiantX:
        k(4, 4) = k(5, 5) = p.lambdaX * p.lambdaX / w;
        k(0, 4) = k(4, 0) = -lc2 / p.lambdaX;
        k(2, 5) = k(5, 2) = p.lambdaY;
        break;
    case Phase::SuperradiantY:
        k(4, 4) = k(5, 5) = p.lambdaY * p.lambdaY / w;
        k(2, 4) = k(4, 2) = lc2 / p.lambdaY;
        k(0, 5) = k(5, 0) = p.lambdaX;
        break;
    }
    return k;
}

struct ExcitationSpectrum {
    std::array<double, 3> nu{};  ///< descending; nu[2] is the soft branch
    bool limitEvaluated = false; ///< point sat on the Goldstone line
};

/// Normal-mode gaps. On the Goldstone line the gapped branches are taken from both sides of the
/// line and the soft branch is reported as exactly zero.
inline ExcitationSpectrum excitation_gaps(const ModelParams& p) {
    p.validate();
    ExcitationSpectrum out;
    if (on_goldstone_line(p)) {
        ModelParams below = p;
        ModelParams above = p;
        below.lambdaY = p.lambdaY * (1.0 - kLimitEpsilon);
        above.lambdaY = p.lambdaY * (1.0 + kLimitEpsilon);
        const auto lo = symplectic::symplectic_eigenvalues(fluctuation_matrix(below));
        const auto hi = symplectic::symplectic_eigenvalues(fluctuation_matrix(above));
        const double tol = 1e-4 * std::max(1.0, lo(0));
        if (std::abs(lo(0) - hi(0)) > tol || std::abs(lo(1) - hi(1)) > tol) {
            throw Error(ErrorCode::NumericalFailure, "gapped branches disagree across the Goldstone line");
        }
        out.nu = {0.5 * (lo(0) + hi(0)), 0.5 * (lo(1) + hi(1)), 0.0};
        out.limitEvaluated = true;
        return out;
    }
    const auto nu = symplectic::symplectic_eigenvalues(fluctuation_matrix(p));
    out.nu = {nu(0), nu(1), nu(2)};
    return out;
}

/// C = 1/2 (M M^T)^{-1} from the Williamson decomposition of the fluctuation matrix.
/// Throws NearSingular on a critical line, where a gap closes and C diverges.
inline info::CovarianceMatrix ground_state_cm(const ModelParams& p) {
    const Matrix k = fluctuation_matrix(p);
    symplectic::WilliamsonDecomposition wd;
    try {
        wd = symplectic::williamson(k);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NonPositiveDefinite) {
            throw Error(ErrorCode::NearSingular, std::string("gap closes at this point (") + e.what() + ")");
        }
        throw;
    }
    const Matrix inv = symplectic::symplectic_inverse(wd.M);
    Matrix c = 0.5 * inv.transpose() * inv;
    c = 0.5 * (c + c.transpose()).eval();
    return {{info::Mode::x, info::Mode::y, info::Mode::j}, c};
}

struct GoldstoneOffset {
    ModelParams params;
    bool applied = false;
};

/// Moves points within epsilon * lambda_c of the Goldstone line to lambda_y = lambda_x (1 - epsilon).
inline GoldstoneOffset offset_from_goldstone_line(const ModelParams& p, double epsilon = kLimitEpsilon) {
    const double lc = p.lambdaC();
    GoldstoneOffset out{p, false};
    if (std::max(p.lambdaX, p.lambdaY) > lc && std::abs(p.lambdaX - p.lambdaY) <= epsilon * lc) {
        out.params.lambdaY = p.lambdaX * (1.0 - epsilon);
        out.applied = true;
    }
    return out;
}

enum class ScanAxis { LambdaX, LambdaY };

struct EnergyScanRow {
    double coupling = 0.0;
    double eGS = 0.0;
    double dE = 0.0;
    double d2E = 0.0;
    bool dEJump = false;   ///< first derivative discontinuous in this bin
    bool d2EJump = false;  ///< second derivative discontinuous in this bin
};

/// Finite-difference derivatives of the ground-state energy along one coupling axis, with a
/// detector for derivative discontinuities. The grid must be uniform and increasing.
///
/// A kink in E makes h * d2E at the crossing comparable to the jump in dE, while smooth stretches
/// keep it O(h); a step in d2E shows up as a change across a three-bin window that dwarfs the
/// bin-to-bin variation just outside the window.
inline std::vector<EnergyScanRow> gs_energy_derivative_scan(const ModelParams& base, ScanAxis axis,
                                                            const std::vector<double>& couplings) {
    const std::size_t n = couplings.size();
    if (n < 5) {
        throw Error(ErrorCode::InvalidArgument, "energy scan needs at least 5 points");
    }
    const double h = (couplings.back() - couplings.front()) / static_cast<double>(n - 1);
    if (!(h > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "energy scan grid must be increasing");
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(couplings[i] - couplings[i - 1] - h) > 1e-9 * std::max(1.0, std::abs(h))) {
            throw Error(ErrorCode::InvalidArgument, "energy scan grid must be uniform");
        }
    }

    std::vector<EnergyScanRow> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        ModelParams p = base;
        (axis == ScanAxis::LambdaX ? p.lambdaX : p.lambdaY) = couplings[i];
        rows[i].coupling = couplings[i];
        rows[i].eGS = ground_state_energy(p);
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        rows[i].dE = (rows[i + 1].eGS - rows[i - 1].eGS) / (2.0 * h);
        rows[i].d2E = (rows[i + 1].eGS - 2.0 * rows[i].eGS + rows[i - 1].eGS) / (h * h);
    }
    rows[0].dE = (rows[1].eGS - rows[0].eGS) / h;
    rows[n - 1].dE = (rows[n - 1].eGS - rows[n - 2].eGS) / h;
    rows[0].d2E = rows[1].d2E;
    rows[n - 1].d2E = rows[n - 2].d2E;

    const double scale = std::max(std::abs(base.omega0), std::abs(base.omega));
    const double floorFirst = 1e-9 * scale;
    const double floorSecond = 1e-6 * scale;
    const auto d2 = [&](std::ptrdiff_t i) {
        i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n) - 1);
        return rows[static_cast<std::size_t>(i)].d2E;
    };

    std::vector<double> firstJump(n, 0.0);
    std::vector<double> secondJump(n, 0.0);
    for (std::size_t u = 2; u + 2 < n; ++u) {
        const auto i = static_cast<std::ptrdiff_t>(u);
        const double jump = h * std::abs(d2(i));
        const double smooth = h * std::max(std::abs(d2(i - 2)), std::abs(d2(i + 2)));
        if (jump > 4.0 * smooth + floorFirst) firstJump[u] = jump;

        const double step = std::abs(d2(i + 2) - d2(i - 1));
        const double outside = std::max(std::abs(d2(i - 1) - d2(i - 2)), std::abs(d2(i + 3) - d2(i + 2)));
        if (step > 9.0 * outside + floorSecond) secondJump[u] = step;
    }

    // Keep one flag per crossing: the local maximum of each run of candidates.
    const auto mark = [&](const std::vector<double>& score, bool EnergyScanRow::*flag) {
        for (std::size_t i = 0; i < n;) {
            if (score[i] == 0.0) {
                ++i;
                continue;
            }
            std::size_t best = i;
            std::size_t k = i;
            for (; k < n && score[k] != 0.0; ++k) {
                if (score[k] > score[best]) best = k;
            }
            rows[best].*flag = true;
            i = k;
        }
    };
    mark(firstJump, &EnergyScanRow::dEJump);
    // A kink also spikes d2E; that spike is not a separate second-order signature.
    for (std::size_t i = 0; i < n; ++i) {
        if (firstJump[i] != 0.0) {
            for (std::size_t k = (i >= 3 ? i - 3 : 0); k < std::min(n, i + 4); ++k) secondJump[k] = 0.0;
        }
    }
    mark(secondJump, &EnergyScanRow::d2EJump);
    return rows;
}

} // namespace dicke::model
