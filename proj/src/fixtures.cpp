#include "qcompress/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qcompress/curvebound.hpp"
#include "qcompress/errors.hpp"
#include "qcompress/rng.hpp"

namespace qcompress {

namespace {

Fixture pair_fixture(std::string name, const cmat& a, const cmat& b, const char* la = "A",
                     const char* lb = "B") {
    return Fixture{std::move(name), int(a.rows()), {la, lb}, {a, b}};
}

cmat diag3(double x, double y, double z) {
    cmat m = cmat::Zero(3, 3);
    m(0, 0) = x;
    m(1, 1) = y;
    m(2, 2) = z;
    return m;
}

PlantedInstance assemble(std::string name, int a_dim, int b_dim, double c, std::vector<cmat> a_ops,
                         std::vector<cmat> b_ops) {
    PlantedInstance inst;
    inst.a_dim = a_dim;
    inst.b_dim = b_dim;
    inst.c = c;
    inst.a_ops = std::move(a_ops);
    inst.b_ops = std::move(b_ops);
    inst.fixture.name = std::move(name);
    inst.fixture.dim = a_dim + b_dim;
    for (std::size_t i = 0; i < inst.a_ops.size(); ++i) {
        inst.fixture.labels.push_back("W" + std::to_string(i + 1));
        inst.fixture.ops.push_back(direct_sum({inst.a_ops[i], planted_phi(inst, inst.a_ops[i])}));
    }
    return inst;
}

int parse_int(const std::string& s, const char* what) {
    try {
        std::size_t used = 0;
        const long v = std::stol(s, &used);
        if (used != s.size()) throw ParseError(std::string("bad ") + what + ": " + s);
        return int(v);
    } catch (const std::logic_error&) {
        throw ParseError(std::string("bad ") + what + ": " + s);
    }
}

std::uint64_t parse_seed(const std::string& s) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(s, &used);
        if (used != s.size()) throw ParseError("bad seed: " + s);
        return v;
    } catch (const std::logic_error&) {
        throw ParseError("bad seed: " + s);
    }
}

}  // namespace

Fixture degree3_fixture() {
    const auto [a, b] = degree3_example();
    return pair_fixture("degree3", a, b);
}

Fixture irreducible_fixture(int dim) {
    const auto [a, b] = gen_irreducible_example(dim);
    return pair_fixture("irred-" + std::to_string(dim), a, b);
}

Fixture twoproj_fixture(int dim, std::uint64_t seed) {
    if (dim < 2) throw DimensionMismatch("two-projection fixture needs dim >= 2");
    Rng rng(seed);
    Rng rp = rng.split(1), rq = rng.split(2);
    const cmat p = random_projection(dim, dim / 2, rp);
    const cmat q = random_projection(dim, dim / 2, rq);
    return pair_fixture("twoproj-" + std::to_string(dim) + "-" + std::to_string(seed), p, q, "P", "Q");
}

Fixture generic_pair_fixture(int dim, std::uint64_t seed) {
    if (dim < 1) throw DimensionMismatch("dimension must be positive");
    Rng rng(seed);
    Rng ra = rng.split(1), rb = rng.split(2);
    return pair_fixture("generic-" + std::to_string(dim) + "-" + std::to_string(seed),
                        random_hermitian(dim, ra), random_hermitian(dim, rb));
}

Fixture identity_fixture(int dim) {
    if (dim < 1) throw DimensionMismatch("dimension must be positive");
    return Fixture{"identity-" + std::to_string(dim), dim, {"I"}, {cmat::Identity(dim, dim)}};
}

cmat planted_phi(const PlantedInstance& inst, const cmat& a_part) {
    cmat out = cmat::Zero(inst.b_dim, inst.b_dim);
    for (std::size_t j = 0; j < inst.a_ops.size(); ++j)
        out += (inst.a_ops[j] * a_part).trace().real() / inst.c * inst.b_ops[j];
    return out;
}

PlantedInstance planted_claim1() {
    // 0 < X, Y < 1/2 with distinct eigenvalues and [X, Y] != 0
    cmat x(2, 2), y(2, 2);
    x << 0.20, 0.08, 0.08, 0.35;
    y << 0.30, cplx(-0.05, 0.07), cplx(-0.05, -0.07), 0.12;
    const cmat z = cmat::Identity(2, 2) - x - y;
    std::vector<cmat> a;
    for (int i = 0; i < 3; ++i) {
        cmat e = cmat::Zero(3, 3);
        e(i, i) = 1;
        a.push_back(e);
    }
    PlantedInstance inst = assemble("planted1", 3, 2, 1.0, std::move(a), {x, y, z});
    inst.expected_d = 1;
    inst.expected_n = 3;
    return inst;
}

PlantedInstance planted_claim2() {
    std::vector<cmat> a;
    for (int i = 0; i < 3; ++i) {
        const double t = 2 * std::numbers::pi * i / 3;
        cvec v(2);
        v << std::cos(t), std::sin(t);
        a.push_back((2.0 / 3.0) * v * v.adjoint());
    }
    const cmat x = diag3(0.11, 0.37, 0.23);
    const cmat y = diag3(0.29, 0.07, 0.41);
    const cmat z = cmat::Identity(3, 3) - x - y;
    PlantedInstance inst = assemble("planted2", 2, 3, 2.0 / 3.0, std::move(a), {x, y, z});
    inst.expected_d = 2;
    inst.expected_n = 4;
    return inst;
}

PlantedInstance planted_negative(int delta, int rest, std::uint64_t seed) {
    if (delta < 2 || rest < 1) throw DimensionMismatch("negative control needs delta >= 2 and rest >= 1");
    Rng rng(seed);
    PlantedInstance inst;
    inst.a_dim = delta;
    inst.b_dim = rest;
    inst.fixture.name = "planted-neg-" + std::to_string(delta) + "-" + std::to_string(rest);
    inst.fixture.dim = delta + rest;
    for (int i = 0; i < 3; ++i) {
        Rng ra = rng.split(2 * i), rb = rng.split(2 * i + 1);
        const cmat ai = random_hermitian(delta, ra);
        cmat bi = cmat::Zero(rest, rest);
        for (int k = 0; k < rest; ++k) bi(k, k) = rb.normal();
        inst.a_ops.push_back(ai);
        inst.b_ops.push_back(bi);
        inst.fixture.labels.push_back("W" + std::to_string(i + 1));
        inst.fixture.ops.push_back(direct_sum({ai, bi}));
    }
    inst.expected_d = delta;
    inst.expected_n = 0;  // not pinned: depends on the remainder
    return inst;
}

BlockInstance random_block_instance(std::uint64_t seed, int max_dim, int num_ops) {
    if (max_dim < 1 || num_ops < 1) throw DimensionMismatch("bad block instance parameters");
    Rng rng(seed);
    Rng layout = rng.split(0);
    BlockInstance inst;
    int total = 0;
    const int s = int(layout.uniform_int(1, 3));
    for (int i = 0; i < s; ++i) {
        const int room = max_dim - total;
        if (room < 1) break;
        const int di = int(layout.uniform_int(1, std::min(3, room)));
        const int mi = int(layout.uniform_int(1, std::max(1, std::min(2, room / di))));
        inst.blocks.push_back(Block{di, mi});
        total += di * mi;
    }
    Rng ru = rng.split(1);
    const cmat u = random_unitary(total, ru);
    inst.fixture.name = "blocks-" + std::to_string(seed);
    inst.fixture.dim = total;
    for (int k = 0; k < num_ops; ++k) {
        std::vector<cmat> parts;
        for (std::size_t i = 0; i < inst.blocks.size(); ++i) {
            Rng rb = rng.split(100 + 10 * k + i);
            const cmat e = random_hermitian(inst.blocks[i].dim, rb);
            for (int t = 0; t < inst.blocks[i].multiplicity; ++t) parts.push_back(e);
        }
        inst.fixture.labels.push_back("E" + std::to_string(k + 1));
        inst.fixture.ops.push_back(hermitian_part(u * direct_sum(parts) * u.adjoint()));
    }
    return inst;
}

Fixture fixture_by_name(const std::vector<std::string>& args) {
    if (args.empty()) throw ParseError("missing example name");
    const std::string& name = args[0];
    auto need = [&](std::size_t n) {
        if (args.size() != n + 1) throw ParseError("example '" + name + "' takes " + std::to_string(n) + " argument(s)");
    };
    if (name == "degree3") {
        need(0);
        return degree3_fixture();
    }
    if (name == "irred") {
        need(1);
        return irreducible_fixture(parse_int(args[1], "dimension"));
    }
    if (name == "twoproj") {
        need(2);
        return twoproj_fixture(parse_int(args[1], "dimension"), parse_seed(args[2]));
    }
    if (name == "generic") {
        need(2);
        return generic_pair_fixture(parse_int(args[1], "dimension"), parse_seed(args[2]));
    }
    if (name == "identity") {
        need(1);
        return identity_fixture(parse_int(args[1], "dimension"));
    }
    if (name == "planted1") {
        need(0);
        return planted_claim1().fixture;
    }
    if (name == "planted2") {
        need(0);
        return planted_claim2().fixture;
    }
    if (name == "planted-neg") {
        need(3);
        return planted_negative(parse_int(args[1], "delta"), parse_int(args[2], "remainder"), parse_seed(args[3]))
            .fixture;
    }
    throw ParseError("unknown example: " + name);
}

}  // namespace qcompress
