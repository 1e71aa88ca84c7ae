#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dicke/dicke_model.hpp"
#include "dicke/gaussian_info.hpp"
#include "test_support.hpp"

namespace {

using namespace dicke;
using namespace dicke::info;
using dicke::testing::throws_code;
using Matrix = Eigen::MatrixXd;
using enum Mode;

CovarianceMatrix ground(double lx, double ly) {
    model::ModelParams p;
    p.lambdaX = lx;
    p.lambdaY = ly;
    return model::ground_state_cm(p);
}

CovarianceMatrix vacuum3() { return CovarianceMatrix::vacuum({x, y, j}); }

// --- CovarianceMatrix --------------------------------------------------------------------------

TEST(CovarianceMatrixType, RejectsAsymmetricEntries) {
    Matrix c = 0.5 * Matrix::Identity(2, 2);
    c(0, 1) = 1e-3;
    EXPECT_TRUE(throws_code([&] { CovarianceMatrix({x}, c); }, ErrorCode::NonSymmetric));
}

TEST(CovarianceMatrixType, RejectsDuplicateModesAndWrongShape) {
    EXPECT_TRUE(throws_code([] { CovarianceMatrix({x, x}, 0.5 * Matrix::Identity(4, 4)); }, ErrorCode::InvalidArgument));
    EXPECT_TRUE(throws_code([] { CovarianceMatrix({x, y}, 0.5 * Matrix::Identity(6, 6)); }, ErrorCode::InvalidArgument));
}

// --- reduce ------------------------------------------------------------------------------------

TEST(Reduce, VacuumSingleMode) {
    const auto r = reduce(vacuum3(), {x});
    EXPECT_EQ(r.modes(), ModeList{x});
    EXPECT_EQ(r.entries(), Matrix(0.5 * Matrix::Identity(2, 2)));
}

TEST(Reduce, Composes) {
    const auto c = ground(1.2, 0.6);
    const auto twice = reduce(reduce(c, {x, y}), {x});
    EXPECT_EQ(twice.entries(), reduce(c, {x}).entries());
}

TEST(Reduce, SpinBlockIsTheLastTwoRowsAndColumns) {
    const auto c = ground(1.2, 0.6);
    const auto r = reduce(c, {j});
    EXPECT_EQ(r.entries(), Matrix(c.entries().block(4, 4, 2, 2)));
}

TEST(Reduce, PreservesSourceModeOrder) {
    const auto c = ground(1.2, 0.6);
    const auto r = reduce(c, {j, x});
    EXPECT_EQ(r.modes(), (ModeList{x, j}));
    EXPECT_EQ(Matrix(r.entries().block(0, 2, 2, 2)), Matrix(c.entries().block(0, 4, 2, 2)));
}

TEST(Reduce, UnknownModeIsReported) {
    const auto r = reduce(vacuum3(), {x, y});
    EXPECT_TRUE(throws_code([&] { reduce(r, {j}); }, ErrorCode::UnknownMode));
}

// --- entropy and mutual information -------------------------------------------------------------

TEST(Renyi2Entropy, VacuumIsZero) { EXPECT_DOUBLE_EQ(renyi2_entropy(CovarianceMatrix::vacuum({x})), 0.0); }

TEST(Renyi2Entropy, ThermalState) {
    const double nbar = 0.5;
    const CovarianceMatrix c({x}, (nbar + 0.5) * Matrix::Identity(2, 2));
    // det(2C) = (2 nbar + 1)^2, so S = ln(2 nbar + 1).
    EXPECT_NEAR(renyi2_entropy(c), std::log(2.0 * nbar + 1.0), 1e-14);
    EXPECT_NEAR(renyi2_entropy(c), 0.6931, 1e-4);
}

TEST(Renyi2Entropy, GlobalGroundStateIsPure) {
    for (auto [lx, ly] : {std::pair{0.5, 0.3}, {1.5, 0.5}, {0.2, 1.9}, {1.2, 0.6}, {0.99, 0.2}}) {
        EXPECT_NEAR(renyi2_entropy(ground(lx, ly)), 0.0, 1e-7) << lx << "," << ly;
    }
}

TEST(Renyi2Entropy, SubVacuumInputIsNonPhysical) {
    const CovarianceMatrix c({x}, 0.25 * Matrix::Identity(2, 2));
    EXPECT_TRUE(throws_code([&] { renyi2_entropy(c); }, ErrorCode::NonPhysical));
}

TEST(MutualInformation, VacuumHasNone) {
    const auto v = vacuum3();
    EXPECT_DOUBLE_EQ(mutual_information(v, {x, y}, {j}), 0.0);
    EXPECT_DOUBLE_EQ(mutual_information(v, {x}, {y}), 0.0);
}

TEST(MutualInformation, DecoupledGroundState) { EXPECT_NEAR(mutual_information(ground(0, 0), {x, y}, {j}), 0.0, 1e-14); }

TEST(MutualInformation, AdditivityInSuperradiantPhase) {
    const auto c = ground(1.5, 0.5);
    const double whole = mutual_information(c, {x, y}, {j});
    EXPECT_NEAR(whole, mutual_information(c, {x}, {j}) + mutual_information(c, {y}, {j}), 1e-8);
}

TEST(MutualInformation, ComplementaryBipartitionIsTwiceEntropy) {
    const auto c = ground(1.5, 0.5);
    EXPECT_NEAR(mutual_information(c, {x, y}, {j}), 2.0 * entropy_of(c, {j}), 1e-9);
}

TEST(MutualInformation, RejectsOverlappingParties) {
    EXPECT_TRUE(throws_code([] { mutual_information(vacuum3(), {x, y}, {y}); }, ErrorCode::InvalidArgument));
}

// --- entanglement of formation ------------------------------------------------------------------

TEST(EofPureBipartition, VacuumIsZero) { EXPECT_DOUBLE_EQ(eof_pure_bipartition(vacuum3(), {x}), 0.0); }

TEST(EofPureBipartition, HalfTheMutualInformation) {
    const auto c = ground(1.5, 0.5);
    EXPECT_NEAR(eof_pure_bipartition(c, {x}), 0.5 * mutual_information(c, {y, j}, {x}), 1e-9);
}

TEST(EofPureBipartition, GrowsTowardCriticality) {
    EXPECT_GT(eof_pure_bipartition(ground(1.01, 0.5), {j}), eof_pure_bipartition(ground(0.5, 0.5), {j}));
}

TEST(EofPureBipartition, MixedStateIsRejected) {
    const CovarianceMatrix thermal({x, y, j}, Matrix::Identity(6, 6));
    EXPECT_TRUE(throws_code([&] { eof_pure_bipartition(thermal, {x}); }, ErrorCode::NotPure));
}

TEST(EofTwoOfThree, VacuumIsSeparable) {
    for (auto [a, b] : {std::pair{x, y}, {x, j}, {y, j}}) {
        const auto e = eof_two_of_three(vacuum3(), a, b);
        EXPECT_DOUBLE_EQ(e.value, 0.0);
    }
}

TEST(EofTwoOfThree, OpticalModesAreNeverEntangled) {
    for (int ix = 0; ix <= 20; ++ix) {
        for (int iy = 0; iy <= 20; ++iy) {
            const double lx = 0.1 * ix;
            const double ly = 0.1 * iy;
            CovarianceMatrix c = vacuum3();
            try {
                model::ModelParams p;
                p.lambdaX = lx;
                p.lambdaY = ly;
                c = model::ground_state_cm(model::offset_from_goldstone_line(p).params);
            } catch (const Error& e) {
                EXPECT_EQ(e.code(), ErrorCode::NearSingular) << lx << "," << ly;
                continue;
            }
            const auto e = eof_two_of_three(c, x, y);
            EXPECT_LT(e.value, 1e-8) << lx << "," << ly;
            // With a decoupled optical mode the invariants sit on a branch boundary; the value is still 0.
            if (ix > 0 && iy > 0) EXPECT_EQ(e.branch, EofBranch::Separable) << lx << "," << ly;
        }
    }
}

TEST(EofTwoOfThree, RoughlyHalfTheMutualInformation) {
    const auto c = ground(1.5, 0.5);
    const double e = eof_two_of_three(c, x, j).value;
    const double half = 0.5 * mutual_information(c, {x}, {j});
    EXPECT_NEAR(e, half, 0.25 * half);
}

TEST(EofTwoOfThree, PureTwoModeStateWithSpectatorVacuum) {
    // Two-mode squeezed vacuum on (x, j), y in vacuum: E(x:j) equals the entanglement entropy.
    const double r = 0.7;
    const double ch = std::cosh(2 * r);
    const double sh = std::sinh(2 * r);
    Matrix c = 0.5 * Matrix::Identity(6, 6);
    c(0, 0) = c(1, 1) = c(4, 4) = c(5, 5) = 0.5 * ch;
    c(0, 4) = c(4, 0) = 0.5 * sh;
    c(1, 5) = c(5, 1) = -0.5 * sh;
    const CovarianceMatrix cm({x, y, j}, c);
    // Oracle: S = 1/2 ln det(2 C_x) = ln cosh 2r.
    EXPECT_NEAR(eof_two_of_three(cm, x, j).value, std::log(ch), 1e-10);
    EXPECT_NEAR(eof_two_of_three(cm, x, y).value, 0.0, 1e-12);
    EXPECT_NEAR(eof_two_of_three(cm, y, j).value, 0.0, 1e-12);
}

TEST(EofTwoOfThree, InvariantUnderLocalSymplectics) {
    std::mt19937_64 rng(123);
    const auto c = ground(1.2, 0.6);
    const double exj = eof_two_of_three(c, x, j).value;
    const double eyj = eof_two_of_three(c, y, j).value;
    for (int trial = 0; trial < 30; ++trial) {
        const Matrix l = dicke::testing::random_local_symplectic(rng);
        const CovarianceMatrix moved({x, y, j}, l * c.entries() * l.transpose());
        EXPECT_NEAR(eof_two_of_three(moved, x, j).value, exj, 1e-7);
        EXPECT_NEAR(eof_two_of_three(moved, y, j).value, eyj, 1e-7);
    }
}

TEST(EofTwoOfThree, BoundedByLocalEntropies) {
    for (auto [lx, ly] : {std::pair{0.5, 0.3}, {1.5, 0.5}, {0.9, 0.95}, {1.9, 1.2}, {0.3, 1.4}}) {
        const auto c = ground(lx, ly);
        for (auto [a, b] : {std::pair{x, y}, {x, j}, {y, j}}) {
            const double e = eof_two_of_three(c, a, b).value;
            EXPECT_GE(e, -1e-12);
            EXPECT_LE(e, std::min(entropy_of(c, {a}), entropy_of(c, {b})) + 1e-9);
        }
    }
}

TEST(EofTwoOfThree, MixedStateIsRejected) {
    const CovarianceMatrix thermal({x, y, j}, Matrix::Identity(6, 6));
    EXPECT_TRUE(throws_code([&] { eof_two_of_three(thermal, x, j); }, ErrorCode::NotPure));
}

TEST(EofTwoOfThree, NeedsDistinctPairAndThreeModes) {
    EXPECT_TRUE(throws_code([] { eof_two_of_three(vacuum3(), x, x); }, ErrorCode::InvalidArgument));
    EXPECT_TRUE(throws_code([] { eof_two_of_three(CovarianceMatrix::vacuum({x, y}), x, y); }, ErrorCode::NotThreeMode));
}

// The closed form is continuous across its branch boundaries.
TEST(Renyi2EofFromInvariants, ContinuousAcrossBranchBoundaries) {
    for (auto [ai, aj] : {std::pair{1.3, 1.7}, {2.0, 2.0}, {1.1, 3.0}, {2.5, 1.4}}) {
        const double sum = ai * ai + aj * aj;
        const double diff = ai * ai - aj * aj;
        const double upper = std::sqrt(sum - 1.0);
        const double alpha =
            std::sqrt((2 * sum + diff * diff + std::abs(diff) * std::sqrt(diff * diff + 8 * sum)) / (2 * sum));
        for (double boundary : {upper, alpha}) {
            if (boundary <= 1.0 + 1e-6) continue;
            const double h = 1e-7;
            const auto below = renyi2_eof_from_invariants(ai, aj, boundary - h);
            const auto at = renyi2_eof_from_invariants(ai, aj, boundary);
            const auto above = renyi2_eof_from_invariants(ai, aj, boundary + h);
            EXPECT_TRUE(at.nearBoundary);
            EXPECT_NE(below.branch, above.branch);
            EXPECT_NEAR(below.value, above.value, 1e-5) << ai << "," << aj << " at " << boundary;
            EXPECT_NEAR(at.value, below.value, 1e-5);
        }
    }
}

// --- monogamy ------------------------------------------------------------------------------------

TEST(TripartiteResidual, VacuumIsZero) {
    EXPECT_NEAR(tripartite_residual(vacuum3(), j, {x, y}), 0.0, 1e-14);
    EXPECT_NEAR(tripartite_residual(vacuum3(), x, {y, j}), 0.0, 1e-14);
}

TEST(TripartiteResidual, AnchoredAtXReducesWhenOpticalModesSeparable) {
    const auto c = ground(1.5, 0.5);
    const double expected = entropy_of(c, {x}) - eof_two_of_three(c, x, j).value;
    EXPECT_NEAR(tripartite_residual(c, x, {y, j}), expected, 1e-10);
}

TEST(TripartiteResidual, PeaksNearCriticalLine) {
    const auto residual = [](double lx) { return tripartite_residual(ground(lx, 0.5), j, {x, y}); };
    const double near = residual(0.999);
    EXPECT_GT(near, residual(0.5));
    EXPECT_GT(near, residual(1.8));
}

TEST(TripartiteResidual, AnchorMustBeOutsidePair) {
    EXPECT_TRUE(throws_code([] { tripartite_residual(vacuum3(), x, {x, y}); }, ErrorCode::InvalidArgument));
}

// --- report --------------------------------------------------------------------------------------

TEST(CorrelationReport, PurityComplements) {
    for (auto [lx, ly] : {std::pair{0.5, 0.3}, {1.5, 0.5}, {0.9, 0.95}, {1.9, 1.2}}) {
        const auto r = correlation_report(ground(lx, ly));
        EXPECT_NEAR(r.sXY, r.sJ, 1e-8);
        EXPECT_NEAR(r.sXJ, r.sY, 1e-8);
        EXPECT_NEAR(r.sYJ, r.sX, 1e-8);
    }
}

TEST(CorrelationReport, AdditivityAndNonNegativity) {
    for (auto [lx, ly] : {std::pair{0.5, 0.3}, {1.5, 0.5}, {0.9, 0.95}, {1.9, 1.2}, {0.1, 1.6}}) {
        const auto r = correlation_report(ground(lx, ly));
        EXPECT_NEAR(r.iXY_J, r.iX_J + r.iY_J, 1e-8);
        EXPECT_NEAR(r.iXJ_Y, r.iX_Y + r.iY_J, 1e-8);
        for (double v : {r.sX, r.sY, r.sJ, r.sXY, r.sXJ, r.sYJ, r.iXY_J, r.iXJ_Y, r.iYJ_X, r.iX_Y, r.iX_J, r.iY_J}) {
            EXPECT_GE(v, -1e-10);
        }
        ASSERT_TRUE(r.tripartiteXYJ && r.tripartiteJYX);
        EXPECT_GE(*r.tripartiteXYJ, -1e-9);
        EXPECT_GE(*r.tripartiteJYX, -1e-9);
    }
}

TEST(CorrelationReport, ResidualFieldsMatchDirectComputation) {
    const auto c = ground(1.2, 0.6);
    const auto r = correlation_report(c);
    ASSERT_TRUE(r.eX_J && r.eY_J && r.eX_Y);
    EXPECT_NEAR(*r.eX_J, eof_two_of_three(c, x, j).value, 1e-12);
    EXPECT_NEAR(*r.tripartiteXYJ, tripartite_residual(c, j, {x, y}), 1e-10);
    EXPECT_NEAR(*r.tripartiteJYX, tripartite_residual(c, x, {y, j}), 1e-10);
}

TEST(CorrelationReport, MirrorSymmetry) {
    for (auto [lx, ly] : {std::pair{0.5, 0.3}, {1.5, 0.5}, {0.9, 0.7}, {1.9, 1.2}}) {
        const auto a = correlation_report(ground(lx, ly));
        const auto b = correlation_report(ground(ly, lx));
        EXPECT_NEAR(a.sX, b.sY, 1e-8);
        EXPECT_NEAR(a.sJ, b.sJ, 1e-8);
        EXPECT_NEAR(a.iX_J, b.iY_J, 1e-8);
        EXPECT_NEAR(a.iXJ_Y, b.iYJ_X, 1e-8);
        EXPECT_NEAR(a.iX_Y, b.iX_Y, 1e-8);
        EXPECT_NEAR(*a.eX_J, *b.eY_J, 1e-8);
    }
}

TEST(CorrelationReport, MixedStateOmitsEntanglement) {
    const auto r = correlation_report(CovarianceMatrix({x, y, j}, Matrix::Identity(6, 6)));
    EXPECT_FALSE(r.eX_J.has_value());
    EXPECT_FALSE(r.tripartiteXYJ.has_value());
    EXPECT_NEAR(r.sX, std::log(2.0), 1e-14);
}

TEST(CorrelationReport, NeedsTheThreeParties) {
    EXPECT_TRUE(throws_code([] { correlation_report(CovarianceMatrix::vacuum({x, y})); }, ErrorCode::NotThreeMode));
}

} // namespace
