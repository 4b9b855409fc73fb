#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace qcompress {

// Deterministic generator that can be split into independent child streams.
// Children depend only on the parent seed and the stream tag, never on how
// many numbers the parent has produced.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    Rng split(std::uint64_t stream) const;
    std::uint64_t seed() const { return seed_; }

    double uniform();                                  // [0, 1)
    double uniform(double lo, double hi);
    double normal();
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);  // inclusive

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

Eigen::MatrixXcd random_ginibre(int rows, int cols, Rng& rng);
Eigen::MatrixXcd random_hermitian(int dim, Rng& rng);
Eigen::MatrixXcd random_unitary(int dim, Rng& rng);
Eigen::MatrixXcd random_density(int dim, Rng& rng);
// Orthogonal projection onto a random rank-k subspace.
Eigen::MatrixXcd random_projection(int dim, int rank, Rng& rng);

}  // namespace qcompress
