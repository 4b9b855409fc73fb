#include <doctest.h>

#include <algorithm>

#include "oracle_values.hpp"
#include "qcompress/dimension.hpp"
#include "qcompress/errors.hpp"
#include "qcompress/fixtures.hpp"
#include "qcompress/rng.hpp"

using namespace qcompress;

namespace {

DimensionAnalysis analyze(const Fixture& f, std::uint64_t seed = 7) {
    return analyze_dimension(make_observable_set(f.ops), seed);
}

// W_i = e_i e_i^dagger (+) B_i with a singular B_1, so the best Choi tuple
// sits on the boundary of the PSD cone.
Fixture boundary_instance() {
    cmat x(2, 2), y(2, 2);
    x << 0.3, 0.0, 0.0, 0.0;
    y << 0.2, 0.1, 0.1, 0.4;
    const cmat z = cmat::Identity(2, 2) - x - y;
    Fixture f{"boundary", 5, {}, {}};
    const cmat b[3] = {x, y, z};
    for (int i = 0; i < 3; ++i) {
        cmat e = cmat::Zero(3, 3);
        e(i, i) = 1;
        f.ops.push_back(direct_sum({e, b[i]}));
    }
    return f;
}


// M_t (+) M_2 (+) C where the M_t part is a unital CP image of the other two,
// hidden by a random unitary. The copies of M_2 inside M_t give the linear
// system many repeated singular values.
Fixture small_to_big_instance(std::uint64_t seed) {
    Rng rng(seed);
    const int r = 2, s = 1, t = 3 + int(seed % 2);
    const cmat w = random_unitary(2 * r + s, rng).topRows(t);
    Fixture f{"small-to-big", t + 3, {}, {}};
    for (int k = 0; k < 3; ++k) {
        const cmat x = random_hermitian(2, rng);
        const double c = rng.normal();
        cmat img = cmat::Zero(t, t);
        for (int j = 0; j < r; ++j) img += w.middleCols(2 * j, 2) * x * w.middleCols(2 * j, 2).adjoint();
        for (int j = 0; j < s; ++j) img += c * w.col(2 * r + j) * w.col(2 * r + j).adjoint();
        f.ops.push_back(direct_sum({img, x, cmat::Constant(1, 1, c)}));
    }
    const cmat q = random_unitary(t + 3, rng);
    for (auto& o : f.ops) o = hermitian_part(q * o * q.adjoint());
    return f;
}

}  // namespace

TEST_CASE("interpolation problems validate their block indices") {
    const DimensionAnalysis a = analyze(planted_claim1().fixture);
    CHECK_THROWS_AS(make_interpolation_problem(a.reduced, 9, {}), DimensionMismatch);
    CHECK_THROWS_AS(make_interpolation_problem(a.reduced, 1, {1}), DimensionMismatch);
    const InterpolationProblem p = make_interpolation_problem(a.reduced, 0, {});
    CHECK(p.kept == std::vector<int>{1, 2, 3});
    CHECK(p.target_dim == 2);
    CHECK(p.inputs.size() == p.targets.size());
}

TEST_CASE("the Choi tuple of the identity map reproduces its input") {
    const int d = 3;
    cmat j = cmat::Zero(d * d, d * d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) j(a * d + a, b * d + b) = 1;
    cmat x = cmat::Random(d, d);
    CHECK(max_abs(apply_block_choi({j}, {x}, {d}, d) - x) < 1e-15);
}

TEST_CASE("first planted instance: the M2 block is redundant") {
    const PlantedInstance inst = planted_claim1();
    const DimensionAnalysis a = analyze(inst.fixture);
    const DimensionReport& r = a.report;
    CHECK(r.compression_dimension == 1);
    CHECK(r.classical_register == 3);
    CHECK(r.redundant_blocks == std::vector<int>{0});
    REQUIRE(r.steps.size() == 2);
    const SdpOutcome& o = r.steps[0].outcome;
    CHECK(o.feasible);
    CHECK(o.objective_residual == doctest::Approx(oracle::kPlanted1Lambda).epsilon(1e-6));
    const InterpolationCheck c = verify_interpolation(r.steps[0].problem, o);
    CHECK(c.residual < 1e-7);
    CHECK(c.choi_min_eig > 0);
    // the second step has no linear solution at all
    CHECK_FALSE(r.steps[1].outcome.linear_consistent);
    CHECK_FALSE(r.steps[1].outcome.feasible);
}

TEST_CASE("second planted instance: the M2 block is needed") {
    const DimensionAnalysis a = analyze(planted_claim2().fixture);
    const DimensionReport& r = a.report;
    CHECK(r.compression_dimension == 2);
    CHECK(r.classical_register == 4);
    REQUIRE(r.steps.size() == 1);
    CHECK(r.steps[0].outcome.linear_consistent);
    CHECK_FALSE(r.steps[0].outcome.feasible);
    CHECK(r.steps[0].outcome.objective_residual == doctest::Approx(oracle::kPlanted2Lambda).epsilon(1e-6));
}

TEST_CASE("negative controls keep the large block") {
    for (int delta : {2, 3})
        for (int rest : {1, 2}) {
            const PlantedInstance inst = planted_negative(delta, rest, 5);
            const DimensionReport r = analyze(inst.fixture).report;
            CAPTURE(delta);
            CAPTURE(rest);
            CHECK(r.compression_dimension == delta);
            REQUIRE_FALSE(r.steps.empty());
            CHECK_FALSE(r.steps[0].outcome.feasible);
        }
}

TEST_CASE("a boundary optimum is flagged and re-solved") {
    const DimensionReport r = analyze(boundary_instance()).report;
    REQUIRE_FALSE(r.steps.empty());
    const SdpOutcome& o = r.steps[0].outcome;
    CHECK(o.marginal);
    CHECK(o.resolved_tighter);
    CHECK(o.feasible);
    CHECK(std::abs(o.objective_residual) < 1e-6);
    CHECK(r.compression_dimension == 1);
}

TEST_CASE("simple instances") {
    CHECK(analyze(identity_fixture(3)).report.compression_dimension == 1);
    CHECK(analyze(degree3_fixture()).report.compression_dimension == 3);
    CHECK(analyze(degree3_fixture()).report.steps.empty());
    for (int d : {4, 6}) CHECK(analyze(twoproj_fixture(d, 42)).report.compression_dimension == 2);
    CHECK(analyze(generic_pair_fixture(4, 3)).report.compression_dimension == 4);
}

TEST_CASE("dimension lies between the smallest and largest block") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const DimensionReport r = analyze(random_block_instance(seed).fixture, seed).report;
        CAPTURE(seed);
        CHECK(r.lower_bound_min_block <= r.compression_dimension);
        CHECK(r.compression_dimension <= r.upper_bound_max_block);
        CHECK(std::find(r.block_dims.begin(), r.block_dims.end(), r.compression_dimension) != r.block_dims.end());
        CHECK(r.kept_blocks.size() + r.redundant_blocks.size() == r.block_dims.size());
    }
}

TEST_CASE("a large block that is an image of smaller ones is dropped") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        CAPTURE(seed);
        const DimensionReport r = analyze(small_to_big_instance(seed), seed).report;
        CHECK(r.compression_dimension == 2);
        REQUIRE(!r.steps.empty());
        CHECK(r.steps[0].outcome.linear_consistent);
    }
}
