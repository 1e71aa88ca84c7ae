#pragma once

// Finite-size exact diagonalization of the two-mode Dicke Hamiltonian in a truncated Fock basis
// |nx, ny> (x) |j, m>, used to check the thermodynamic-limit results at small j.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "dicke/dicke_model.hpp"
#include "dicke/errors.hpp"

namespace dicke::oracle {

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using symplectic::Matrix;

inline constexpr std::size_t kDefaultBudget = 200000;
inline constexpr std::size_t kDenseThreshold = 2000;

struct TruncationSpec {
    double j = 10.0;  ///< half-integer spin, N/2
    int nMax = 20;    ///< Fock cutoff per bosonic mode
    std::size_t budget = kDefaultBudget;

    int spin_dim() const { return static_cast<int>(std::lround(2.0 * j)) + 1; }
    std::size_t dimension() const {
        const auto b = static_cast<std::size_t>(nMax + 1);
        return b * b * static_cast<std::size_t>(spin_dim());
    }

    void validate() const {
        const double twoJ = 2.0 * j;
        if (!(j >= 0.5) || std::abs(twoJ - std::round(twoJ)) > 1e-12) {
            throw Error(ErrorCode::InvalidArgument, "j must be a positive half-integer, got " + std::to_string(j));
        }
        if (nMax < 1) {
            throw Error(ErrorCode::InvalidArgument, "Fock cutoff must be at least 1");
        }
        if (dimension() > budget) {
            throw Error(ErrorCode::BudgetExceeded, "Hilbert dimension " + std::to_string(dimension()) +
                                                       " exceeds budget " + std::to_string(budget));
        }
    }
};

enum class FieldMode { None, X, Y };

/// Matrix-free Hamiltonian, optionally with a symmetry-breaking term h * q on one mode.
class DickeHamiltonian {
public:
    DickeHamiltonian(const model::ModelParams& p, const TruncationSpec& t, double field = 0.0,
                     FieldMode fieldMode = FieldMode::None)
        : p_(p), j_(t.j), nb_(t.nMax + 1), ns_(t.spin_dim()), field_(field), fieldMode_(fieldMode) {
        p_.validate();
        t.validate();
        cx_ = p_.lambdaX / std::sqrt(2.0 * j_);
        cy_ = p_.lambdaY / std::sqrt(2.0 * j_);
    }

    std::size_t dim() const { return static_cast<std::size_t>(nb_) * nb_ * ns_; }

    void apply(const CVector& in, CVector& out) const {
        using namespace std::complex_literals;
        out.resize(in.size());
        const double jj = j_ * (j_ + 1.0);
        for (int nx = 0; nx < nb_; ++nx) {
            for (int ny = 0; ny < nb_; ++ny) {
                for (int mi = 0; mi < ns_; ++mi) {
                    const double m = mi - j_;
                    const auto s = index(nx, ny, mi);
                    std::complex<double> acc = (p_.omega * (nx + ny) + p_.omega0 * m) * in(s);
                    for (int dn : {-1, 1}) {
                        for (int dm : {-1, 1}) {
                            const int mt = mi + dm;
                            if (mt < 0 || mt >= ns_) continue;
                            const double spin = 0.5 * std::sqrt(jj - m * (m + dm));
                            // <m|Jy|m+dm> = i dm/2 sqrt(...)
                            const std::complex<double> jy = 1i * static_cast<double>(dm) * spin;
                            const int nxt = nx + dn;
                            if (nxt >= 0 && nxt < nb_) {
                                acc += cx_ * std::sqrt(static_cast<double>(std::max(nx, nxt))) * spin *
                                       in(index(nxt, ny, mt));
                            }
                            const int nyt = ny + dn;
                            if (nyt >= 0 && nyt < nb_) {
                                acc += cy_ * std::sqrt(static_cast<double>(std::max(ny, nyt))) * jy *
                                       in(index(nx, nyt, mt));
                            }
                        }
                    }
                    if (fieldMode_ != FieldMode::None && field_ != 0.0) {
                        const double h = field_ / std::sqrt(2.0);
                        for (int dn : {-1, 1}) {
                            if (fieldMode_ == FieldMode::X) {
                                const int nxt = nx + dn;
                                if (nxt >= 0 && nxt < nb_) {
                                    acc += h * std::sqrt(static_cast<double>(std::max(nx, nxt))) * in(index(nxt, ny, mi));
                                }
                            } else {
                                const int nyt = ny + dn;
                                if (nyt >= 0 && nyt < nb_) {
                                    acc += h * std::sqrt(static_cast<double>(std::max(ny, nyt))) * in(index(nx, nyt, mi));
                                }
                            }
                        }
                    }
                    out(s) = acc;
                }
            }
        }
    }

    CMatrix dense() const {
        const auto n = static_cast<Eigen::Index>(dim());
        CMatrix h(n, n);
        CVector e = CVector::Zero(n);
        CVector col(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            e(i) = 1.0;
            apply(e, col);
            h.col(i) = col;
            e(i) = 0.0;
        }
        return h;
    }

    std::size_t index(int nx, int ny, int mi) const {
        return (static_cast<std::size_t>(nx) * nb_ + static_cast<std::size_t>(ny)) * ns_ + static_cast<std::size_t>(mi);
    }

    int boson_dim() const { return nb_; }
    int spin_dim() const { return ns_; }
    double j() const { return j_; }

private:
    model::ModelParams p_;
    double j_;
    int nb_;
    int ns_;
    double cx_ = 0.0;
    double cy_ = 0.0;
    double field_;
    FieldMode fieldMode_;
};

struct LanczosOptions {
    int krylovSize = 120;
    int maxRestarts = 50;
    double tolerance = 1e-10;  ///< residual norm relative to max(1, |E|)
    unsigned seed = 20211u;
};

struct EigenPair {
    double value = 0.0;
    CVector vector;
    double residual = 0.0;
    int matvecs = 0;
};

/// Lowest eigenpair of a Hermitian operator by explicitly restarted Lanczos with full
/// reorthogonalization. The start vector is drawn from a fixed seed so runs are reproducible.
template <class Apply>
EigenPair lowest_eigenpair(std::size_t dim, const Apply& apply, const LanczosOptions& opt = {}) {
    const auto n = static_cast<Eigen::Index>(dim);
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> gauss;
    CVector start(n);
    for (Eigen::Index i = 0; i < n; ++i) start(i) = {gauss(rng), gauss(rng)};
    start.normalize();

    const int m = static_cast<int>(std::min<Eigen::Index>(opt.krylovSize, n));
    EigenPair out;
    CMatrix basis(n, m);
    CVector w(n);

    for (int restart = 0; restart <= opt.maxRestarts; ++restart) {
        std::vector<double> alpha;
        std::vector<double> beta;
        basis.col(0) = start;
        Eigen::VectorXd ritzVec;
        double theta = 0.0;
        int used = 0;
        bool converged = false;

        for (int k = 0; k < m; ++k) {
            apply(CVector(basis.col(k)), w);
            ++out.matvecs;
            const double a = basis.col(k).dot(w).real();
            alpha.push_back(a);
            for (int pass = 0; pass < 2; ++pass) {
                for (int i = 0; i <= k; ++i) {
                    w -= basis.col(i).dot(w) * basis.col(i);
                }
            }
            const double b = w.norm();
            used = k + 1;

            const bool lastStep = k + 1 == m || b < 1e-13;
            if (lastStep || (k + 1) % 10 == 0) {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
                Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(alpha.data(), used);
                Eigen::VectorXd e = Eigen::VectorXd::Zero(std::max(used - 1, 1));
                for (int i = 0; i + 1 < used; ++i) e(i) = beta[static_cast<std::size_t>(i)];
                tri.computeFromTridiagonal(d, e.head(std::max(used - 1, 0)));
                theta = tri.eigenvalues()(0);
                ritzVec = tri.eigenvectors().col(0);
                const double estimate = b * std::abs(ritzVec(used - 1));
                if (estimate < opt.tolerance * std::max(1.0, std::abs(theta)) || b < 1e-13) {
                    converged = true;
                }
            }
            if (converged || lastStep) break;
            basis.col(k + 1) = w / b;
            beta.push_back(b);
        }

        CVector x = basis.leftCols(used) * ritzVec.cast<std::complex<double>>();
        x.normalize();
        apply(x, w);
        ++out.matvecs;
        out.value = x.dot(w).real();
        out.residual = (w - out.value * x).norm();
        out.vector = x;
        if (converged && out.residual < 10.0 * opt.tolerance * std::max(1.0, std::abs(out.value))) {
            return out;
        }
        start = x;
    }
    throw Error(ErrorCode::NumericalFailure,
                "Lanczos did not converge, residual " + std::to_string(out.residual));
}

/// Ground state of a DickeHamiltonian: dense diagonalization below kDenseThreshold, Lanczos above.
inline EigenPair ground_state(const DickeHamiltonian& h, const LanczosOptions& opt = {}) {
    if (h.dim() < kDenseThreshold) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(h.dense());
        if (es.info() != Eigen::Success) {
            throw Error(ErrorCode::NumericalFailure, "dense Hermitian eigensolver failed");
        }
        EigenPair out;
        out.value = es.eigenvalues()(0);
        out.vector = es.eigenvectors().col(0);
        return out;
    }
    return lowest_eigenpair(h.dim(), [&h](const CVector& in, CVector& out) { h.apply(in, out); }, opt);
}

namespace detail {

// Quadrature operators on the product basis. Each returns O|psi>.
class Quadratures {
public:
    explicit Quadratures(const DickeHamiltonian& h) : h_(h) {}

    CVector boson(int which, bool momentum, const CVector& psi) const {
        using namespace std::complex_literals;
        CVector out = CVector::Zero(psi.size());
        const int nb = h_.boson_dim();
        const double r2 = 1.0 / std::sqrt(2.0);
        for (int nx = 0; nx < nb; ++nx) {
            for (int ny = 0; ny < nb; ++ny) {
                for (int mi = 0; mi < h_.spin_dim(); ++mi) {
                    const auto src = h_.index(nx, ny, mi);
                    const int n = which == 0 ? nx : ny;
                    // a+|n> = sqrt(n+1)|n+1>, a|n> = sqrt(n)|n-1>
                    if (n + 1 < nb) {
                        const auto dst = which == 0 ? h_.index(nx + 1, ny, mi) : h_.index(nx, ny + 1, mi);
                        const std::complex<double> c = momentum ? 1i * r2 : std::complex<double>(r2);
                        out(dst) += c * std::sqrt(n + 1.0) * psi(src);
                    }
                    if (n > 0) {
                        const auto dst = which == 0 ? h_.index(nx - 1, ny, mi) : h_.index(nx, ny - 1, mi);
                        const std::complex<double> c = momentum ? -1i * r2 : std::complex<double>(r2);
                        out(dst) += c * std::sqrt(static_cast<double>(n)) * psi(src);
                    }
                }
            }
        }
        return out;
    }

    /// (Jx, Jy, Jz) |psi>.
    std::array<CVector, 3> spin(const CVector& psi) const {
        using namespace std::complex_literals;
        const double j = h_.j();
        const double jj = j * (j + 1.0);
        std::array<CVector, 3> out{CVector::Zero(psi.size()), CVector::Zero(psi.size()), CVector::Zero(psi.size())};
        const int nb = h_.boson_dim();
        const int ns = h_.spin_dim();
        for (int nx = 0; nx < nb; ++nx) {
            for (int ny = 0; ny < nb; ++ny) {
                for (int mi = 0; mi < ns; ++mi) {
                    const double m = mi - j;
                    const auto src = h_.index(nx, ny, mi);
                    out[2](src) += m * psi(src);
                    if (mi + 1 < ns) {  // J+ component
                        const double c = std::sqrt(jj - m * (m + 1.0));
                        const auto dst = h_.index(nx, ny, mi + 1);
                        out[0](dst) += 0.5 * c * psi(src);
                        out[1](dst) += -0.5i * c * psi(src);
                    }
                    if (mi > 0) {  // J- component
                        const double c = std::sqrt(jj - m * (m - 1.0));
                        const auto dst = h_.index(nx, ny, mi - 1);
                        out[0](dst) += 0.5 * c * psi(src);
                        out[1](dst) += 0.5i * c * psi(src);
                    }
                }
            }
        }
        return out;
    }

private:
    const DickeHamiltonian& h_;
};

} // namespace detail

/// Symmetrized covariances of (qx, px, qy, py, Q, P) with first moments subtracted, where
/// Q and P are the transverse spin components in the frame of the classical spin direction
/// (theta, phi), scaled by 1/sqrt(j). Signs follow the fluctuation-matrix convention: in the normal
/// phase the x mode is rotated by pi, in the y-superradiant phase both optical modes are.
inline Matrix quadrature_cm(const DickeHamiltonian& h, const CVector& psi, const model::ClassicalGroundState& gs) {
    const detail::Quadratures ops(h);
    const auto [jx, jy, jz] = ops.spin(psi);
    const double ct = std::cos(gs.theta);
    const double st = std::sin(gs.theta);
    const double cp = std::cos(gs.phi);
    const double sp = std::sin(gs.phi);
    const double norm = 1.0 / std::sqrt(h.j());

    std::array<CVector, 6> o{
        ops.boson(0, false, psi),
        ops.boson(0, true, psi),
        ops.boson(1, false, psi),
        ops.boson(1, true, psi),
        norm * (ct * (cp * jx + sp * jy) - st * jz),
        norm * (-sp * jx + cp * jy),
    };

    std::array<double, 6> sign{1, 1, 1, 1, 1, 1};
    if (gs.phase == model::Phase::Normal) {
        sign[0] = sign[1] = -1;
    } else if (gs.phase == model::Phase::SuperradiantY) {
        sign[0] = sign[1] = sign[2] = sign[3] = -1;
    }

    std::array<double, 6> mean{};
    for (std::size_t a = 0; a < 6; ++a) mean[a] = psi.dot(o[a]).real();
    Matrix c(6, 6);
    for (std::size_t a = 0; a < 6; ++a) {
        for (std::size_t b = a; b < 6; ++b) {
            // <{Oa, Ob}>/2 = Re <Oa psi | Ob psi> for Hermitian Oa, Ob.
            const double v = (o[a].dot(o[b]).real() - mean[a] * mean[b]) * sign[a] * sign[b];
            c(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v;
            c(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = v;
        }
    }
    return c;
}

struct OracleOptions {
    /// Symmetry-breaking field on the superradiant mode; negative selects the default (1e-4 in the
    /// superradiant phases, none in the normal phase).
    double field = -1.0;
    bool checkCutoff = true;
    bool checkField = true;
    LanczosOptions lanczos{};
};

struct FiniteSizeResult {
    double groundEnergyPerSpin = 0.0;
    Matrix quadratureCM;
    bool convergedCutoff = false;
    double cutoffEnergyChange = 0.0;  ///< |E0(nMax + 2) - E0(nMax)|
    std::size_t dimension = 0;
    double field = 0.0;
    bool fieldIndependent = true;  ///< CM unchanged (1e-3 relative) when the field doubles
    model::Phase phase = model::Phase::Normal;
};

inline constexpr double kCutoffTolerance = 1e-8;
inline constexpr double kFieldTolerance = 1e-3;

namespace detail {

struct Solved {
    double energy;
    Matrix cm;
};

inline Solved solve(const model::ModelParams& p, const TruncationSpec& t, const model::ClassicalGroundState& gs,
                    double field, FieldMode mode, const LanczosOptions& opt) {
    const DickeHamiltonian h(p, t, field, mode);
    const auto gsPair = ground_state(h, opt);
    return {gsPair.value, quadrature_cm(h, gsPair.vector, gs)};
}

} // namespace detail

/// Lowest eigenstate of the finite-j Hamiltonian: energy per spin and quadrature covariances.
/// Points on the Goldstone line are rejected (the classical frame is undefined there).
inline FiniteSizeResult exact_ground_state(const model::ModelParams& p, const TruncationSpec& t,
                                           const OracleOptions& opt = {}) {
    t.validate();
    const auto gs = model::classical_ground_state(p);

    FieldMode mode = FieldMode::None;
    double field = 0.0;
    if (gs.phase != model::Phase::Normal) {
        mode = gs.phase == model::Phase::SuperradiantX ? FieldMode::X : FieldMode::Y;
        field = opt.field < 0.0 ? 1e-4 : opt.field;
    } else if (opt.field > 0.0) {
        mode = FieldMode::X;
        field = opt.field;
    }

    const auto base = detail::solve(p, t, gs, field, mode, opt.lanczos);
    FiniteSizeResult out;
    out.groundEnergyPerSpin = base.energy / t.j;
    out.quadratureCM = base.cm;
    out.dimension = t.dimension();
    out.field = field;
    out.phase = gs.phase;

    if (opt.checkCutoff) {
        TruncationSpec wider = t;
        wider.nMax += 2;
        if (wider.dimension() <= wider.budget) {
            const auto check = detail::solve(p, wider, gs, field, mode, opt.lanczos);
            out.cutoffEnergyChange = std::abs(check.energy - base.energy);
            out.convergedCutoff = out.cutoffEnergyChange < kCutoffTolerance;
        }
    }
    if (opt.checkField && field > 0.0) {
        const auto doubled = detail::solve(p, t, gs, 2.0 * field, mode, opt.lanczos);
        const double scale = std::max(1.0, base.cm.cwiseAbs().maxCoeff());
        out.fieldIndependent = (doubled.cm - base.cm).cwiseAbs().maxCoeff() <= kFieldTolerance * scale;
    }
    return out;
}

} // namespace dicke::oracle
