#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qcompress/algebra.hpp"
#include "qcompress/matcore.hpp"

namespace qcompress {

// A named list of Hermitian operators; what `gen` writes to disk.
struct Fixture {
    std::string name;
    int dim = 0;
    std::vector<std::string> labels;
    std::vector<cmat> ops;
};

Fixture degree3_fixture();
Fixture irreducible_fixture(int dim);
// Two random orthogonal projections of rank dim/2.
Fixture twoproj_fixture(int dim, std::uint64_t seed);
// Two Gaussian Hermitian matrices.
Fixture generic_pair_fixture(int dim, std::uint64_t seed);
Fixture identity_fixture(int dim);

// Effects W_i = A_i (+) Phi(A_i) on A' (+) B, with Phi(Z) = (1/c) sum_j tr(A_j Z) B_j
// for rank-one A_i of trace c summing to the identity and B_i > 0 summing to
// the identity. The A' part sits on the first a_dim coordinates.
struct PlantedInstance {
    Fixture fixture;
    int a_dim = 0;
    int b_dim = 0;
    double c = 1;
    std::vector<cmat> a_ops;
    std::vector<cmat> b_ops;
    int expected_d = 0;
    int expected_n = 0;
};

// A' = C^3 (standard basis), B = M_2: the M_2 block is redundant, d = 1, n = 3.
PlantedInstance planted_claim1();
// A' = M_2 (trine), B = C^3: the M_2 block is needed, d = 2.
PlantedInstance planted_claim2();
// Random operators on M_delta (+) C^rest: no interpolation onto the
// M_delta block exists, d = delta.
PlantedInstance planted_negative(int delta, int rest, std::uint64_t seed);

// Phi of the instance applied to an operator on A'.
cmat planted_phi(const PlantedInstance& inst, const cmat& a_part);

// Operators U^dagger (+_i E^i (x) 1_{m_i}) U with Gaussian E^i, for a random
// block layout with total dimension at most max_dim.
struct BlockInstance {
    Fixture fixture;
    std::vector<Block> blocks;
};

BlockInstance random_block_instance(std::uint64_t seed, int max_dim = 8, int num_ops = 3);

// Fixture named by `gen` arguments: irred D | degree3 | twoproj D seed |
// generic D seed | identity D | planted1 | planted2 | planted-neg delta rest seed.
Fixture fixture_by_name(const std::vector<std::string>& args);

}  // namespace qcompress
