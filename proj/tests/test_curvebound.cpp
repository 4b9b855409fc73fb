#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "oracle_values.hpp"
#include "qcompress/curvebound.hpp"
#include "qcompress/errors.hpp"
#include "qcompress/fixtures.hpp"
#include "qcompress/rng.hpp"

using namespace qcompress;

namespace {

std::vector<int> sorted(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    return v;
}

FactorizationResult factor(const cmat& e1, const cmat& e2) { return factor_by_monodromy(extract_curve(e1, e2)); }

void check_partition(const FactorizationResult& f, int dim) {
    CHECK(std::accumulate(f.complex_orbit_sizes.begin(), f.complex_orbit_sizes.end(), 0) == dim);
    CHECK(std::accumulate(f.real_factor_degrees.begin(), f.real_factor_degrees.end(), 0) == dim);
    CHECK(f.diagnostics.loop_product_consistent);
    CHECK(f.diagnostics.hyperbolic);
}

}  // namespace

TEST_CASE("curve coefficients of the degree-3 pair") {
    const auto [a, b] = degree3_example();
    const DeterminantalCurve c = extract_curve(a, b);
    REQUIRE(c.degree == 3);
    for (int i = 0; i <= 3; ++i)
        for (int j = 0; j <= 3; ++j) CHECK(std::abs(c.coefficients(i, j) - oracle::kDegree3Coefficients[i][j]) < 1e-10);
}

TEST_CASE("the curve evaluates to the determinant") {
    Rng rng(8);
    const cmat e1 = random_hermitian(4, rng), e2 = random_hermitian(4, rng);
    const DeterminantalCurve c = extract_curve(e1, e2);
    for (int t = 0; t < 5; ++t) {
        const cplx x(rng.normal(), rng.normal()), z(rng.normal(), rng.normal());
        const cplx det = (x * cmat::Identity(4, 4) - e1 - z * e2).determinant();
        CHECK(std::abs(evaluate_curve(c.coefficients, x, z) - det) < 1e-9 * (1 + std::abs(det)));
    }
}

TEST_CASE("degree-3 pair factors as a line times a conic") {
    const auto [a, b] = degree3_example();
    const FactorizationResult f = factor(a, b);
    CHECK(sorted(f.real_factor_degrees) == std::vector<int>{oracle::kDegree3FactorDegrees[0], oracle::kDegree3FactorDegrees[1]});
    CHECK(f.min_real_degree == 1);
    check_partition(f, 3);
}

TEST_CASE("irreducible family gives one factor of full degree") {
    for (int d = 2; d <= 8; ++d) {
        const auto [a, b] = gen_irreducible_example(d);
        const FactorizationResult f = factor(a, b);
        CAPTURE(d);
        CHECK(f.real_factor_degrees == std::vector<int>{d});
        CHECK(f.complex_orbit_sizes == std::vector<int>{d});
        if (d <= 6) CHECK(oracle::kIrreducibleLargestFactor[d - 2] == d);
        check_partition(f, d);
    }
}

TEST_CASE("direct sums factor blockwise") {
    Rng rng(31);
    const cmat a2 = random_hermitian(2, rng), b2 = random_hermitian(2, rng);
    const cmat a3 = random_hermitian(3, rng), b3 = random_hermitian(3, rng);
    MonodromySettings whole;
    whole.split_blocks = false;
    for (const MonodromySettings& s : {MonodromySettings{}, whole}) {
        CAPTURE(s.split_blocks);
        const FactorizationResult f = factor_by_monodromy(extract_curve(direct_sum({a2, a3}), direct_sum({b2, b3})), s);
        CHECK(f.real_factor_degrees == std::vector<int>{2, 3});
        check_partition(f, 5);

        const FactorizationResult rep = factor_by_monodromy(extract_curve(direct_sum({a2, a2}), direct_sum({b2, b2})), s);
        CHECK(rep.real_factor_degrees == std::vector<int>{2, 2});
        CHECK(rep.diagnostics.gcd_degree == 2);
        check_partition(rep, 4);
    }

    // a repeated block next to a different one, conjugated by a unitary
    Rng ru(4);
    const cmat u = random_unitary(7, ru);
    const cmat e1 = u * direct_sum({a3, a3, a2.topLeftCorner(1, 1)}) * u.adjoint();
    const cmat e2 = u * direct_sum({b3, b3, b2.topLeftCorner(1, 1)}) * u.adjoint();
    const FactorizationResult mixed = factor(hermitian_part(e1), hermitian_part(e2));
    CHECK(mixed.real_factor_degrees == std::vector<int>{1, 3, 3});
    check_partition(mixed, 7);

    const FactorizationResult flat = factor(a3, cmat::Zero(3, 3));
    CHECK(flat.real_factor_degrees == std::vector<int>{1, 1, 1});
}

TEST_CASE("generic pairs are irreducible") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Fixture f = generic_pair_fixture(4, seed);
        const FactorizationResult r = factor(f.ops[0], f.ops[1]);
        CAPTURE(seed);
        CHECK(r.real_factor_degrees == std::vector<int>{4});
        check_partition(r, 4);
    }
}

TEST_CASE("first-order determinant expansion of the irreducible family") {
    for (int d = 2; d <= 6; ++d) {
        const std::vector<double> xs(std::begin(oracle::kExpansionX), std::end(oracle::kExpansionX));
        const ExpansionCheck c = determinant_expansion_check(d, xs, {1e-5});
        CAPTURE(d);
        CHECK(c.max_residual <= 1e-6);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const cplx expect(oracle::kExpansionDerivative[d - 2][i][0], oracle::kExpansionDerivative[d - 2][i][1]);
            CHECK(std::abs(c.samples[i].predicted - expect) < 1e-12);
            CHECK(std::abs(c.samples[i].finite_difference - expect) < 1e-6);
            CHECK(c.samples[i].zeroth_order < 1e-9 * (1 + std::pow(std::abs(xs[i]), d)));
        }
    }
    const ExpansionCheck two = determinant_expansion_check(5, {0.3, 1.7});
    for (double s : two.slopes) CHECK(s == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("geometric lower bound") {
    const Fixture d3 = degree3_fixture();
    const ObservableSet obs = make_observable_set(d3.ops);
    CHECK(geometric_lower_bound(obs, PairChoice::Given, 0).bound == 1);
    CHECK(geometric_lower_bound(obs, PairChoice::RandomDraws, 5).bound == 1);

    const ObservableSet gen = make_observable_set(generic_pair_fixture(4, 1).ops);
    const GeometricBound g = geometric_lower_bound(gen, PairChoice::RandomDraws, 3);
    CHECK(g.bound == 4);
    CHECK(g.draws == 1);  // stops once the bound reaches D

    const ObservableSet id = make_observable_set({cmat::Identity(3, 3)});
    CHECK(geometric_lower_bound(id, PairChoice::RandomDraws, 1).bound == 1);

    const ObservableSet tp = make_observable_set(twoproj_fixture(6, 42).ops);
    const GeometricBound b = geometric_lower_bound(tp, PairChoice::RandomDraws, 2);
    CHECK(b.bound <= 2);
    check_partition(b.factorization, 6);
}
