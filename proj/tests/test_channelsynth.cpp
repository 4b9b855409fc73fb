#include <doctest.h>

#include "qcompress/channelsynth.hpp"
#include "qcompress/errors.hpp"
#include "qcompress/fixtures.hpp"
#include "qcompress/rng.hpp"

using namespace qcompress;

namespace {

struct Built {
    ObservableSet obs;
    DimensionAnalysis analysis;
};

Built build(const Fixture& f, std::uint64_t seed = 7) {
    const ObservableSet obs = make_observable_set(f.ops);
    return {obs, analyze_dimension(obs, seed)};
}

}  // namespace

TEST_CASE("basis states are D^2 pure states spanning the Hermitian matrices") {
    const std::vector<cmat> states = basis_states(3);
    REQUIRE(states.size() == 9);
    rmat coords(9, 9);
    for (int i = 0; i < 9; ++i) {
        CHECK(std::abs(states[i].trace() - cplx(1)) < 1e-14);
        CHECK(max_abs(states[i] * states[i] - states[i]) < 1e-14);
        coords.col(i) = hermitian_coords(states[i]);
    }
    CHECK(Eigen::FullPivLU<rmat>(coords).rank() == 9);
}

TEST_CASE("identity scheme preserves everything") {
    const Fixture f = generic_pair_fixture(3, 2);
    const SchemeReport r = verify_scheme(identity_scheme(3), make_observable_set(f.ops), 20, 1);
    CHECK(r.ok);
    CHECK(r.max_residual < 1e-14);
    CHECK(r.states_tested == 29);
}

TEST_CASE("max-block scheme on random block instances") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Built b = build(random_block_instance(seed).fixture, seed);
        const CompressionScheme sc = build_max_block_scheme(b.analysis.reduced);
        CAPTURE(seed);
        CHECK(sc.d == b.analysis.report.upper_bound_max_block);
        CHECK(sc.n == int(b.analysis.reduced.structure.blocks.size()));
        const SchemeReport r = verify_scheme(sc, b.obs, 30, seed);
        CHECK(r.ok);
        CHECK(r.max_residual < 1e-9);
        CHECK(r.dual_unitality < 1e-9);
    }
}

TEST_CASE("optimal scheme drops the redundant block") {
    const PlantedInstance inst = planted_claim1();
    const Built b = build(inst.fixture);
    const CompressionScheme sc = build_optimal_scheme(b.analysis.reduced, b.analysis.report);
    CHECK(sc.d == 1);
    CHECK(sc.n == 3);
    CHECK(sc.kept_blocks == std::vector<int>{1, 2, 3});
    const SchemeReport r = verify_scheme(sc, b.obs, 100, 3);
    CHECK(r.ok);
    CHECK(r.compress_cptp.ok);
    CHECK(r.decompress_cptp.ok);
    CHECK(r.max_residual < 1e-7);
}

TEST_CASE("optimal schemes on the other fixtures") {
    for (const Fixture& f : {planted_claim2().fixture, twoproj_fixture(6, 42), degree3_fixture(),
                             identity_fixture(2), planted_negative(2, 2, 1).fixture}) {
        const Built b = build(f);
        const CompressionScheme sc = build_optimal_scheme(b.analysis.reduced, b.analysis.report);
        CAPTURE(f.name);
        CHECK(sc.d == b.analysis.report.compression_dimension);
        const SchemeReport r = verify_scheme(sc, b.obs, 50, 9);
        CHECK(r.ok);
        CHECK(r.max_residual < 1e-9);
        CHECK(sc.n <= int(b.analysis.reduced.structure.blocks.size()));
    }
}

TEST_CASE("verification detects a tampered scheme and mismatched dimensions") {
    const Built b = build(twoproj_fixture(4, 1));
    CompressionScheme sc = build_optimal_scheme(b.analysis.reduced, b.analysis.report);
    CompressionScheme bad = sc;
    bad.decompress.kraus[0](0, 0) += 0.05;
    CHECK_FALSE(verify_scheme(bad, b.obs, 10, 1).ok);
    CHECK_THROWS_AS(verify_scheme(identity_scheme(3), b.obs, 10, 1), DimensionMismatch);
}

TEST_CASE("two-projection canonical form") {
    for (int d : {4, 6, 8}) {
        const Fixture f = twoproj_fixture(d, 42);
        const TwoProjectionForm form = two_projection_form(f.ops[0], f.ops[1]);
        CAPTURE(d);
        CHECK(form.template_residual < 1e-8);
        CHECK(form.unitarity_residual < 1e-10);
        CHECK(form.r == d / 2);
        CHECK(form.corners[0] + form.corners[1] + form.corners[2] + form.corners[3] == 0);
        for (std::size_t j = 1; j < form.mu.size(); ++j) CHECK(form.mu[j - 1] <= form.mu[j]);
        CHECK(form.flags.empty());
    }
}

TEST_CASE("two-projection corners") {
    // coordinate projections in C^5: every vector sits in a corner
    cmat p = cmat::Zero(5, 5), q = cmat::Zero(5, 5);
    p(0, 0) = p(1, 1) = 1;
    q(0, 0) = q(2, 2) = 1;
    const TwoProjectionForm form = two_projection_form(p, q);
    CHECK(form.corners[0] == 1);
    CHECK(form.corners[1] == 1);
    CHECK(form.corners[2] == 1);
    CHECK(form.corners[3] == 2);
    CHECK(form.r == 0);
    CHECK(form.template_residual < 1e-12);

    // one generic pair with mu = sin^2(0.4) next to a corner
    const double t = 0.4;
    cmat p2 = cmat::Zero(3, 3), q2 = cmat::Zero(3, 3);
    p2(0, 0) = p2(2, 2) = 1;
    cvec v(3);
    v << std::cos(t), std::sin(t), 0;
    q2 = v * v.adjoint();
    q2(2, 2) = 1;
    const TwoProjectionForm f2 = two_projection_form(p2, q2);
    CHECK(f2.corners[0] == 1);
    CHECK(f2.r == 1);
    CHECK(f2.mu[0] == doctest::Approx(std::sin(t) * std::sin(t)));
    CHECK(f2.template_residual < 1e-12);

    // cos^2 = 1 - 1e-8 lies between the rank and angle thresholds
    const double s = 1e-4;
    v << std::cos(s), std::sin(s), 0;
    const TwoProjectionForm f3 = two_projection_form(p2, v * v.adjoint());
    CHECK_FALSE(f3.flags.empty());
}

TEST_CASE("two-projection input validation") {
    cmat p = cmat::Identity(2, 2);
    CHECK_THROWS_AS(two_projection_form(p, cmat::Identity(3, 3)), DimensionMismatch);
    CHECK_THROWS_AS(two_projection_form(p, 0.5 * p), NumericError);
}
