#include "qcompress/rng.hpp"

#include <cmath>

namespace qcompress {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

Rng Rng::split(std::uint64_t stream) const {
    return Rng(splitmix64(seed_ ^ splitmix64(stream + 0x632be59bd9b4e019ULL)));
}

double Rng::uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
}

double Rng::uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

double Rng::normal() {
    return std::normal_distribution<double>(0.0, 1.0)(engine_);
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
}

Eigen::MatrixXcd random_ginibre(int rows, int cols, Rng& rng) {
    Eigen::MatrixXcd g(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) {
            double re = rng.normal();
            double im = rng.normal();
            g(i, j) = {re, im};
        }
    return g;
}

Eigen::MatrixXcd random_hermitian(int dim, Rng& rng) {
    Eigen::MatrixXcd g = random_ginibre(dim, dim, rng);
    return (g + g.adjoint()) / 2.0;
}

Eigen::MatrixXcd random_unitary(int dim, Rng& rng) {
    Eigen::MatrixXcd g = random_ginibre(dim, dim, rng);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    // fix phases so the distribution is Haar
    for (int j = 0; j < dim; ++j) {
        std::complex<double> d = r(j, j);
        double a = std::abs(d);
        if (a > 0) q.col(j) *= d / a;
    }
    return q;
}

Eigen::MatrixXcd random_density(int dim, Rng& rng) {
    Eigen::MatrixXcd g = random_ginibre(dim, dim, rng);
    Eigen::MatrixXcd rho = g * g.adjoint();
    return rho / rho.trace().real();
}

Eigen::MatrixXcd random_projection(int dim, int rank, Rng& rng) {
    Eigen::MatrixXcd u = random_unitary(dim, rng);
    Eigen::MatrixXcd v = u.leftCols(rank);
    return v * v.adjoint();
}

}  // namespace qcompress
