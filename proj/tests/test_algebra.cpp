#include <doctest.h>

#include <algorithm>

#include "qcompress/algebra.hpp"
#include "qcompress/errors.hpp"
#include "qcompress/fixtures.hpp"
#include "qcompress/rng.hpp"

using namespace qcompress;

namespace {

std::vector<std::pair<int, int>> sorted_blocks(const std::vector<Block>& bs) {
    std::vector<std::pair<int, int>> out;
    for (const auto& b : bs) out.emplace_back(b.dim, b.multiplicity);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("block structure of random block instances is recovered") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        const BlockInstance inst = random_block_instance(seed);
        const ObservableSet obs = canonicalize(make_observable_set(inst.fixture.ops));
        const BlockStructure bs = block_diagonalize(obs, seed + 100);
        CAPTURE(seed);
        CHECK(sorted_blocks(bs.blocks) == sorted_blocks(inst.blocks));
        for (std::size_t i = 1; i < bs.blocks.size(); ++i) CHECK(bs.blocks[i - 1].dim >= bs.blocks[i].dim);
        const cmat u = bs.unitary;
        CHECK(max_abs(u * u.adjoint() - cmat::Identity(obs.dim, obs.dim)) < 1e-10);
        for (const auto& op : obs.operators) CHECK(block_residual(bs, op) < 1e-8);

        const ReducedObservableSet red = reduce_multiplicities(obs, bs);
        int reduced = 0;
        for (const auto& b : inst.blocks) reduced += b.dim;
        CHECK(red.reduced_dim == reduced);
        for (std::size_t k = 0; k < obs.operators.size(); ++k)
            CHECK(max_abs(reassemble(red, int(k)) - obs.operators[k]) < 1e-8);
    }
}

TEST_CASE("closure dimension equals the sum of squared block sizes") {
    const BlockInstance inst = random_block_instance(4);
    int expect = 0;
    for (const auto& b : inst.blocks) expect += b.dim * b.dim;
    CHECK(int(algebra_closure(inst.fixture.ops).size()) == expect);
    // commuting operators close onto a commutative algebra
    CHECK(algebra_closure({cmat::Identity(3, 3)}).size() == 1);
}

TEST_CASE("blocks of the planted instance") {
    const PlantedInstance p = planted_claim1();
    const ObservableSet obs = canonicalize(make_observable_set(p.fixture.ops));
    const BlockStructure bs = block_diagonalize(obs, 1);
    CHECK(sorted_blocks(bs.blocks) == std::vector<std::pair<int, int>>{{1, 1}, {1, 1}, {1, 1}, {2, 1}});
    CHECK(bs.blocks.front().dim == 2);
}

TEST_CASE("identity only gives one block of multiplicity D") {
    const ObservableSet obs = canonicalize(make_observable_set({cmat::Identity(4, 4)}));
    const BlockStructure bs = block_diagonalize(obs, 0);
    REQUIRE(bs.blocks.size() == 1);
    CHECK(bs.blocks[0].dim == 1);
    CHECK(bs.blocks[0].multiplicity == 4);
}

TEST_CASE("compound matrices") {
    Rng rng(9);
    const cmat a = random_ginibre(4, 4, rng), b = random_ginibre(4, 4, rng);
    CHECK(max_abs(compound_matrix(a, 1) - a) < 1e-14);
    CHECK(compound_matrix(a, 2).rows() == 6);
    CHECK(std::abs(compound_matrix(a, 4)(0, 0) - a.determinant()) < 1e-10);
    // multiplicative (Cauchy-Binet)
    CHECK(max_abs(compound_matrix(a * b, 2) - compound_matrix(a, 2) * compound_matrix(b, 2)) < 1e-10);
}

TEST_CASE("generation test: generic pairs generate, reducible pairs do not") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Fixture f = generic_pair_fixture(4, seed);
        const GenerationVerdict v = algebra_generation_test(f.ops, seed);
        CHECK(v.full);
        CHECK(v.pair_checked);
        CHECK(v.vanishing_k.empty());
        CHECK(v.agree);
    }
    const Fixture tp = twoproj_fixture(4, 42);
    const GenerationVerdict v = algebra_generation_test(tp.ops, 1);
    CHECK_FALSE(v.full);
    CHECK_FALSE(v.vanishing_k.empty());
    CHECK(v.agree);
    const Fixture d3 = degree3_fixture();
    CHECK(algebra_generation_test(d3.ops).full);
}

TEST_CASE("reduction rejects a structure that does not fit") {
    const ObservableSet obs = canonicalize(make_observable_set(generic_pair_fixture(3, 1).ops));
    BlockStructure bs;
    bs.ambient_dim = 3;
    bs.unitary = cmat::Identity(3, 3);
    bs.blocks = {Block{1, 3}};
    CHECK_THROWS_AS(reduce_multiplicities(obs, bs), NumericError);
    bs.ambient_dim = 4;
    CHECK_THROWS_AS(reduce_multiplicities(obs, bs), DimensionMismatch);
}
