#include "bsscov/indexing.hpp"
#include "bsscov/errors.hpp"
#include "bsscov/special_functions.hpp"

namespace bsscov::indexing {

namespace {
long pow_long(int p, int e) {
    long r = 1;
    for (int i = 0; i < e; ++i) r *= p;
    return r;
}
void check_p(int p) {
    if (p < 1) throw DomainError("indexing: p must be positive");
}
} // namespace

std::array<int, 2> pair_from_flat(long i, int p) {
    check_p(p);
    if (i < 1 || i > pow_long(p, 2)) throw OutOfRange("pair_from_flat: i outside 1..p^2");
    const long q = (i - 1) / p;
    return {static_cast<int>(q + 1), static_cast<int>(i - p * q)};
}

long flat_from_pair(int x, int y, int p) {
    check_p(p);
    if (x < 1 || x > p || y < 1 || y > p) throw OutOfRange("flat_from_pair");
    return static_cast<long>(x - 1) * p + y;
}

std::vector<std::array<int, 4>> nu_enumerate(int p) {
    check_p(p);
    std::vector<std::array<int, 4>> out;
    out.reserve(static_cast<std::size_t>(pow_long(p, 4)));
    for (int r = 1; r <= p; ++r)
        for (int m = 1; m <= p; ++m)
            for (int q = 1; q <= p; ++q)
                for (int w = 1; w <= p; ++w) out.push_back({r, m, q, w});
    return out;
}

long nu_index(const std::array<int, 4>& q, int p) {
    check_p(p);
    for (int v : q)
        if (v < 1 || v > p) throw OutOfRange("nu_index");
    return ((static_cast<long>(q[0] - 1) * p + (q[1] - 1)) * p + (q[2] - 1)) * p + q[3];
}

std::array<int, 4> nu_at(long s, int p) {
    check_p(p);
    if (s < 1 || s > pow_long(p, 4)) throw OutOfRange("nu_at");
    long v = s - 1;
    std::array<int, 4> out;
    out[3] = static_cast<int>(v % p) + 1;
    v /= p;
    out[2] = static_cast<int>(v % p) + 1;
    v /= p;
    out[1] = static_cast<int>(v % p) + 1;
    v /= p;
    out[0] = static_cast<int>(v) + 1;
    return out;
}

std::vector<std::array<int, 2>> mu_enumerate(int p) {
    check_p(p);
    std::vector<std::array<int, 2>> out;
    out.reserve(static_cast<std::size_t>(pow_long(p, 2)));
    for (int m = 1; m <= p; ++m)
        for (int w = 1; w <= p; ++w) out.push_back({m, w});
    return out;
}

long mu_index(const std::array<int, 2>& q, int p) {
    check_p(p);
    if (q[0] < 1 || q[0] > p || q[1] < 1 || q[1] > p) throw OutOfRange("mu_index");
    return static_cast<long>(q[0] - 1) * p + q[1];
}

std::array<int, 2> mu_at(long s, int p) {
    check_p(p);
    if (s < 1 || s > pow_long(p, 2)) throw OutOfRange("mu_at");
    return {static_cast<int>((s - 1) / p) + 1, static_cast<int>((s - 1) % p) + 1};
}

std::array<int, 6> case1_flat_map(long z, int p) {
    check_p(p);
    const long p4 = pow_long(p, 4);
    if (z < 1 || z > p4 * pow_long(p, 2)) throw OutOfRange("case1_flat_map: z outside 1..p^6");
    const long block = (z - 1) / p4;                 // 0 .. p^2-1
    const long s = z - block * p4;                   // 1 .. p^4
    const int k = static_cast<int>(block / p) + 1;
    const int l = static_cast<int>(block + 1 - p * (block / p));
    const auto q = nu_at(s, p);
    return {q[0], q[1], q[2], q[3], k, l};
}

long case1_flat_from(const std::array<int, 6>& v, int p) {
    const long s = nu_index({v[0], v[1], v[2], v[3]}, p);
    const long block = static_cast<long>(v[4] - 1) * p + (v[5] - 1);
    return block * pow_long(p, 4) + s;
}

std::array<int, 6> case1_vech_map(long z, int p) {
    check_p(p);
    const long p4 = pow_long(p, 4);
    const long rows = static_cast<long>(p) * (p + 1) / 2;
    if (z < 1 || z > p4 * rows) throw OutOfRange("case1_vech_map");
    const long block = (z - 1) / p4 + 1; // 1 .. p(p+1)/2
    const long s = z - (block - 1) * p4;
    const auto kl = vech_chi_xi(block);
    const auto q = nu_at(s, p);
    return {q[0], q[1], q[2], q[3], static_cast<int>(kl[0]), static_cast<int>(kl[1])};
}

std::array<int, 4> scenario2_flat_map(long z, int p) {
    check_p(p);
    const long p2 = pow_long(p, 2);
    if (z < 1 || z > p2 * p2) throw OutOfRange("scenario2_flat_map: z outside 1..p^4");
    const long block = (z - 1) / p2;
    const long s = z - block * p2;
    const int k = static_cast<int>(block / p) + 1;
    const int l = static_cast<int>(block + 1 - p * (block / p));
    const auto q = mu_at(s, p);
    return {q[0], q[1], k, l};
}

long scenario2_flat_from(const std::array<int, 4>& v, int p) {
    const long s = mu_index({v[0], v[1]}, p);
    const long block = static_cast<long>(v[2] - 1) * p + (v[3] - 1);
    return block * pow_long(p, 2) + s;
}

std::array<int, 4> scenario2_vech_map(long z, int p) {
    check_p(p);
    const long p2 = pow_long(p, 2);
    const long rows = static_cast<long>(p) * (p + 1) / 2;
    if (z < 1 || z > p2 * rows) throw OutOfRange("scenario2_vech_map");
    const long block = (z - 1) / p2 + 1;
    const long s = z - (block - 1) * p2;
    const auto kl = vech_chi_xi(block);
    const auto q = mu_at(s, p);
    return {q[0], q[1], static_cast<int>(kl[0]), static_cast<int>(kl[1])};
}

std::array<long, 2> vech_chi_xi(long i) {
    if (i < 1) throw OutOfRange("vech_chi_xi: i must be >= 1");
    const auto u = static_cast<std::uint64_t>(i);
    const long chi = static_cast<long>((sf::isqrt(8 * u - 7) + 1) / 2);
    const long xi = i - chi * (chi - 1) / 2;
    return {chi, xi};
}

long vech_index(long k, long l) {
    if (k < 1 || l < 1) throw OutOfRange("vech_index: indices must be >= 1");
    if (l > k) throw OutOfRange("vech_index: need l <= k");
    return k * (k - 1) / 2 + l;
}

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::PairSquare: return "PairSquare";
        case Scheme::Case1Full: return "CaseI-Full";
        case Scheme::Case1Vech: return "CaseI-Vech";
        case Scheme::Scenario2Full: return "Scenario2-Full";
        case Scheme::Scenario2Vech: return "Scenario2-Vech";
    }
    return "?";
}

long IndexMapDescriptor::rows() const {
    const long vech = static_cast<long>(p) * (p + 1) / 2;
    switch (scheme) {
        case Scheme::PairSquare: return static_cast<long>(p) * p;
        case Scheme::Case1Full: return static_cast<long>(p) * p;
        case Scheme::Case1Vech: return vech;
        case Scheme::Scenario2Full: return static_cast<long>(p) * p;
        case Scheme::Scenario2Vech: return vech;
    }
    throw DomainError("IndexMapDescriptor: unknown scheme");
}

long IndexMapDescriptor::flat_size() const {
    const long p2 = static_cast<long>(p) * p;
    const long p4 = p2 * p2;
    const long vech = static_cast<long>(p) * (p + 1) / 2;
    switch (scheme) {
        case Scheme::PairSquare: return p2;
        case Scheme::Case1Full: return p4 * p2;
        case Scheme::Case1Vech: return p4 * vech;
        case Scheme::Scenario2Full: return p4;
        case Scheme::Scenario2Vech: return p2 * vech;
    }
    throw DomainError("IndexMapDescriptor: unknown scheme");
}

std::string IndexMapDescriptor::row_meaning() const {
    switch (scheme) {
        case Scheme::PairSquare:
        case Scheme::Case1Full:
        case Scheme::Scenario2Full:
            return "(k,l) row-major over {1..p}^2";
        default:
            return "(k,l), l<=k, fractal order (1,1),(2,1),(2,2),(3,1),...";
    }
}

std::string IndexMapDescriptor::column_meaning() const {
    switch (scheme) {
        case Scheme::PairSquare: return "component pair via pair_from_flat";
        case Scheme::Case1Full:
        case Scheme::Case1Vech: return "(nu_s(r,m,q,w), k, l) blocks of size p^4";
        case Scheme::Scenario2Full:
        case Scheme::Scenario2Vech: return "(mu_s(m,w), k, l) blocks of size p^2";
    }
    return "?";
}

} // namespace bsscov::indexing
