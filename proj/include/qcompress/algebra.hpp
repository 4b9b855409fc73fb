#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qcompress/matcore.hpp"

namespace qcompress {

struct Block {
    int dim = 0;           // D_i
    int multiplicity = 0;  // m_i
};

// U E U^dagger = direct sum over blocks i of m_i identical copies of E^i,
// copies of one block contiguous, blocks in the listed order.
struct BlockStructure {
    int ambient_dim = 0;
    cmat unitary;
    std::vector<Block> blocks;

    int offset(int block, int copy = 0) const;
    int reduced_dim() const;  // sum of D_i
};

// Orthonormal Hermitian basis (Frobenius) of the *-algebra generated by the
// operators and the identity, identity direction first.
std::vector<cmat> algebra_closure(const std::vector<cmat>& ops,
                                  const Tolerances& tol = default_tolerances());

BlockStructure block_diagonalize(const ObservableSet& obs, std::uint64_t seed,
                                 int max_retries = 8,
                                 const Tolerances& tol = default_tolerances());

// Largest block-structure violation of U op U^dagger: entries outside the
// blocks and disagreement between copies.
double block_residual(const BlockStructure& bs, const cmat& op);

struct ReducedObservableSet {
    BlockStructure structure;
    int reduced_dim = 0;
    // ops[k][i] is the block-i sub-block of operator k
    std::vector<std::vector<cmat>> ops;
};

ReducedObservableSet reduce_multiplicities(const ObservableSet& obs, const BlockStructure& bs,
                                           const Tolerances& tol = default_tolerances());
// Re-tensors the identities and undoes the unitary.
cmat reassemble(const ReducedObservableSet& red, int op_index);
cmat reassemble(const BlockStructure& bs, const std::vector<cmat>& blocks);

// k-th compound matrix, minors indexed by increasing k-subsets in
// lexicographic order.
cmat compound_matrix(const cmat& a, int k);

struct GenerationVerdict {
    bool full = false;
    BlockStructure structure;
    bool pair_checked = false;
    std::vector<double> pk_det;       // P_k(A,B), k = 1..D-1
    std::vector<double> pk_relative;  // lambda_min / lambda_max of the P_k matrix
    std::vector<int> vanishing_k;
    bool agree = true;
};

GenerationVerdict algebra_generation_test(const std::vector<cmat>& ops, std::uint64_t seed = 0,
                                          const Tolerances& tol = default_tolerances());

}  // namespace qcompress
