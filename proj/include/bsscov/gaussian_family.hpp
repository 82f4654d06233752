#ifndef BSSCOV_GAUSSIAN_FAMILY_HPP
#define BSSCOV_GAUSSIAN_FAMILY_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bsscov/kernel.hpp"

namespace bsscov {

/// One stationary Gaussian coordinate written as a linear combination of
/// single-kernel moving averages: sum of coef * int g^(cell) dW^(measure).
/// Every Gaussian core the limit theory touches is of this shape:
///   - component core G^(i)        : atoms {(1, (i,l), l) : l}
///   - triple core G^(k,r;m)       : one atom (1, (k,r), m)
///   - pair core G^(k,m)           : one atom (1, (k,m), m)
///   - Y with constant sigma       : atoms {(sigma^(r,m), (k,r), m) : r,m}
///   - X with constant sigma       : atoms {(sigma^(k,m), (k,m), m) : m}
struct FamilyAtom {
    double coef;
    int row, col;  // kernel cell, 1-based
    int measure;   // driving Brownian measure, 1-based
};

struct DerivedComponent {
    std::string label;
    std::vector<FamilyAtom> atoms;
};

class GaussianFamily {
  public:
    GaussianFamily(KernelSpec spec, std::vector<DerivedComponent> comps);

    int size() const { return static_cast<int>(comps_.size()); }
    const DerivedComponent& component(int a) const; // 1-based
    const KernelSpec& spec() const { return spec_; }

    /// E[F_a(t+h) F_b(t)], independent measures.
    double autocovariance(int a, int b, double h) const;

    /// E[Delta_1 F_a * Delta_{1+k} F_b] at resolution n (k may be negative).
    double increment_covariance(int a, int b, long n, long k) const;

    /// sqrt(E[(Delta_1 F_a)^2]); throws DegenerateVariance when zero.
    double increment_sd(int a, long n) const;

  private:
    KernelSpec spec_;
    std::vector<DerivedComponent> comps_;
};

// Factories for the core variants named above.
GaussianFamily component_family(const KernelSpec& spec);
GaussianFamily triple_family(const KernelSpec& spec);          // (k,r;m), all m
GaussianFamily pair_family(const KernelSpec& spec);            // (k,m)
GaussianFamily y_const_sigma_family(const KernelSpec& spec, const Eigen::MatrixXd& sigma);
GaussianFamily x_const_sigma_family(const KernelSpec& spec, const Eigen::MatrixXd& sigma);

/// Index of triple (k,r,m) or pair (k,m) in the factories above (1-based).
int triple_index(int p, int k, int r, int m);
int pair_index(int p, int k, int m);

/// Precomputed table of increment covariances for all ordered component
/// pairs and lags 0..max_lag; the read side is thread-safe.
class LagTable {
  public:
    LagTable(const GaussianFamily& family, long n, long max_lag);

    double cov(int a, int b, long k) const;     // signed lag
    double corr(int a, int b, long k) const;    // normalized by increment sds
    double sd(int a) const;
    long n() const { return n_; }
    long max_lag() const { return max_lag_; }

  private:
    long n_, max_lag_;
    int m_;
    std::vector<std::vector<double>> table_; // [(a-1)*m + (b-1)][k]
    std::vector<double> sd_;
};

CorrelationTable build_correlation_table(const KernelSpec& spec, long n,
                                         CorrRegime regime, long max_lag);

} // namespace bsscov

#endif
