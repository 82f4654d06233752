#ifndef BSSCOV_INDEXING_HPP
#define BSSCOV_INDEXING_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace bsscov::indexing {

/// (i) in 1..p^2  <->  (x,y) in {1..p}^2, row-major:
/// x = floor((i-1)/p)+1, y = i - p*floor((i-1)/p).
std::array<int, 2> pair_from_flat(long i, int p);
long flat_from_pair(int x, int y, int p);

/// All quadruples (r,m,q,w) in {1..p}^4, lexicographic ascending with r
/// most significant. The one enumeration authority for sigma-product rows
/// and Case-I Brownian coordinates.
std::vector<std::array<int, 4>> nu_enumerate(int p);
long nu_index(const std::array<int, 4>& q, int p); // 1-based position
std::array<int, 4> nu_at(long s, int p);

/// All pairs (m,w) in {1..p}^2, lexicographic.
std::vector<std::array<int, 2>> mu_enumerate(int p);
long mu_index(const std::array<int, 2>& q, int p);
std::array<int, 2> mu_at(long s, int p);

/// Case I full map: z in 1..p^6 -> (r,m,q,w,k,l).
std::array<int, 6> case1_flat_map(long z, int p);
long case1_flat_from(const std::array<int, 6>& rmqwkl, int p);

/// Case I vech map: z in 1..p^4*p(p+1)/2 -> (r,m,q,w,k,l) with l <= k.
std::array<int, 6> case1_vech_map(long z, int p);

/// Case II second scenario: z in 1..p^4 -> (m,w,k,l).
std::array<int, 4> scenario2_flat_map(long z, int p);
long scenario2_flat_from(const std::array<int, 4>& mwkl, int p);
std::array<int, 4> scenario2_vech_map(long z, int p);

/// chi/xi of the vech fractal sequence (1,1),(2,1),(2,2),(3,1),...
/// Integer-exact: chi(i) = (isqrt(8i-7)+1)/2, xi = i - chi(chi-1)/2.
std::array<long, 2> vech_chi_xi(long i);

/// Inverse: i = k(k-1)/2 + l for l <= k.
long vech_index(long k, long l);

enum class Scheme { PairSquare, Case1Full, Case1Vech, Scenario2Full, Scenario2Vech };

std::string to_string(Scheme s);

/// Shape descriptor embedded in every serialized matrix artifact.
struct IndexMapDescriptor {
    int p;
    Scheme scheme;

    long rows() const;      // statistic dimension (p^2 or vech)
    long flat_size() const; // Brownian/row-coordinate dimension

    std::string row_meaning() const;
    std::string column_meaning() const;
};

} // namespace bsscov::indexing

#endif
