#include <doctest.h>

#include "qcompress/rng.hpp"
#include "qcompress/sdp.hpp"

using namespace qcompress;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("smallest eigenvalue as an SDP") {
    // max y s.t. C - y 1 >= 0 has optimum lambda_min(C)
    MatrixXd c(3, 3);
    c << 2, 1, 0, 1, 3, 1, 0, 1, 4;
    SdpProblem p;
    p.block_sizes = {3};
    p.c = {c};
    p.a = {{MatrixXd::Identity(3, 3)}};
    p.b = VectorXd::Ones(1);
    const SdpSolution s = solve_sdp(p);
    REQUIRE(s.status == SdpStatus::Optimal);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(c);
    CHECK(s.y(0) == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-7));
    CHECK(s.primal_objective == doctest::Approx(s.dual_objective).epsilon(1e-7));
}

TEST_CASE("two blocks with a linear coupling") {
    // max y1 + y2 s.t. 1 - y1 >= 0 and 2 - y2 >= 0
    SdpProblem p;
    p.block_sizes = {1, 1};
    p.c = {MatrixXd::Constant(1, 1, 1.0), MatrixXd::Constant(1, 1, 2.0)};
    p.a = {{MatrixXd::Constant(1, 1, 1.0), MatrixXd::Zero(1, 1)}, {MatrixXd::Zero(1, 1), MatrixXd::Constant(1, 1, 1.0)}};
    p.b = VectorXd::Ones(2);
    const SdpSolution s = solve_sdp(p);
    REQUIRE(s.status == SdpStatus::Optimal);
    CHECK(s.y(0) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(s.y(1) == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("real embedding preserves spectra and inverts") {
    Rng rng(4);
    const Eigen::MatrixXcd h = random_hermitian(3, rng);
    const MatrixXd e = real_embedding(h);
    CHECK(e.rows() == 6);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hc(h);
    Eigen::SelfAdjointEigenSolver<MatrixXd> he(e);
    for (int i = 0; i < 3; ++i) {
        CHECK(he.eigenvalues()(2 * i) == doctest::Approx(hc.eigenvalues()(i)));
        CHECK(he.eigenvalues()(2 * i + 1) == doctest::Approx(hc.eigenvalues()(i)));
    }
    CHECK((complex_from_embedding(e) - h).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("random LMIs agree with their dual") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng(seed);
        const int n = 4;
        MatrixXd c = random_hermitian(n, rng).real();
        c += (1.0 - Eigen::SelfAdjointEigenSolver<MatrixXd>(c).eigenvalues()(0)) * MatrixXd::Identity(n, n);
        SdpProblem p;
        p.block_sizes = {n};
        p.c = {c};
        const MatrixXd a1 = random_hermitian(n, rng).real();
        p.a = {{a1}, {MatrixXd::Identity(n, n)}};
        p.b = VectorXd::Zero(2);
        p.b(1) = 1;
        const SdpSolution s = solve_sdp(p);
        REQUIRE(s.status == SdpStatus::Optimal);
        // at the optimum the slack is singular
        const MatrixXd slack = c - s.y(0) * a1 - s.y(1) * MatrixXd::Identity(n, n);
        CHECK(std::abs(Eigen::SelfAdjointEigenSolver<MatrixXd>(slack).eigenvalues()(0)) < 1e-6);
        CHECK(s.relative_gap < 1e-6);
    }
}
