#ifndef BSSCOV_KERNEL_HPP
#define BSSCOV_KERNEL_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bsscov/quadrature.hpp"

namespace bsscov {

/// g(t) = t^delta * exp(-lambda t) on (0, inf), 0 on (-inf, 0].
/// delta > -1/2 keeps g square-integrable; lambda > 0.
struct GammaKernel {
    double delta;
    double lambda;

    GammaKernel(double d, double l);
    double operator()(double t) const;
};

double gamma_eval(const GammaKernel& k, double t);

/// p x p grid of gamma kernels. A disengaged cell is the zero kernel
/// (the component pair shares no driving mass through that entry).
struct KernelSpec {
    int p;
    std::vector<std::optional<GammaKernel>> cells; // row-major p*p

    static KernelSpec single(double delta, double lambda);
    static KernelSpec identical_diagonal(int p, double delta, double lambda);
    static KernelSpec identical_full(int p, double delta, double lambda);

    KernelSpec(int p_, std::vector<std::optional<GammaKernel>> cells_);
    const std::optional<GammaKernel>& at(int i, int j) const; // 1-based
    bool is_diagonal() const;
};

// ---- cross-moments -------------------------------------------------------

/// integral_0^inf ki(x+h) kj(x) dx by adaptive quadrature (split at 1,
/// x^delta substitution on the singular end, exponential tail cutoff).
double cross_moment(const GammaKernel& ki, const GammaKernel& kj, double h,
                    const quad::Options& opt = {});

struct SeriesControl {
    double rel_tol = 1e-10;
    int max_terms = 400;
    double max_z = 40.0;        // series not attempted past this s*h
    double pole_tol = 1e-6;     // distance to Gamma poles triggering fallback
};

/// Same integral through the two-part Kummer decomposition
///   G(dj+1)G(-di-dj-1)/G(-di) h^(di+dj+1) M(dj+1, di+dj+2, sh)
/// + G(di+dj+1) s^-(di+dj+1) M(-di, -di-dj, sh),   s = li+lj.
/// Throws SeriesDiverged near Gamma poles (e.g. matched delta = 0) or when
/// truncation cannot certify the tolerance; callers fall back to quadrature.
double cross_moment_series(const GammaKernel& ki, const GammaKernel& kj, double h,
                           const SeriesControl& ctl = {});

/// C_ij(h) = sum_l integral g^(i,l)(x+h) g^(j,l)(x) dx; h < 0 via C_ji(-h).
double core_autocovariance(const KernelSpec& spec, int i, int j, double h,
                           const quad::Options& opt = {});

// ---- increment quantities ------------------------------------------------

/// E[Delta_1 Ga * Delta_{1+k} Gb] for single-kernel processes
/// Ga = int ga dW, Gb = int gb dW (same measure), step 1/n, lag k >= 0.
/// Evaluated as one cancellation-free integral of differenced kernels.
double increment_cov_quad(const GammaKernel& ga, const GammaKernel& gb, long n,
                          long k, const quad::Options& opt = {});

/// Same through series-evaluated autocovariances (fast path).
double increment_cov_series(const GammaKernel& ga, const GammaKernel& gb, long n,
                            long k, const SeriesControl& ctl = {});

/// Series with quadrature fallback.
double increment_cov(const GammaKernel& ga, const GammaKernel& gb, long n, long k);

/// Case I correlation r^(n)_{i,j}(k) of the component core of `spec`.
/// Exactly 1 for i == j, k == 0.
double increment_correlation(const KernelSpec& spec, long n, int i, int j, long k);

/// n -> inf limit of r^(n)(k) for matched delta:
///   ((k+1)^x + (k-1)^x - 2 k^x) / 2,  x = 2 delta + 1,
/// the second-difference form the finite-n correlations converge to.
double limiting_correlation(double delta, long k);

/// Numerator of r^(n)_{i,j}(k) (the three-term autocovariance difference)
/// via the Kummer series; SeriesDiverged routes the caller to quadrature.
double series_numerator(const KernelSpec& spec, long n, int i, int j, long k,
                        const SeriesControl& ctl = {});

// ---- correlation tables ----------------------------------------------------

enum class CorrRegime { CaseI, CaseIIBar, CaseIITilde };

std::string to_string(CorrRegime r);

/// r^(n)(k) values for all component pairs up to max_lag, under the chosen
/// scaling regime's normalization.
struct CorrelationTable {
    long n;
    int p;
    CorrRegime regime;
    long max_lag;
    // entries[(i-1)*p + (j-1)][k]
    std::vector<std::vector<double>> entries;
    double delta_hint = 0.0; // largest active delta; feeds the section-7 bound

    double at(int i, int j, long k) const;
};

CorrelationTable build_correlation_table(const KernelSpec& spec, long n,
                                         CorrRegime regime, long max_lag);

// ---- assumption diagnostics ------------------------------------------------

struct A2Diagnostic {
    double partial_sum_half;   // sum of r(k)^2 up to K/2
    double partial_sum_full;   // up to K
    double summand_exponent;   // fitted slope of log r(k)^2 vs log k
    double paper_bound;        // closed-form section-7 tail bound sum
    bool strict_pass;          // fitted exponent < -1 (true summability evidence)
    std::string note;
};

/// Assumption (A2): finite-(n,K) evidence for sum_k r(k)^2 < inf.
/// Heuristic by construction; the true double limit is not numerically
/// verifiable, so the record carries the evidence, not a proof.
A2Diagnostic check_assumption_squared_correlations(const CorrelationTable& table,
                                                   long K);

struct PiDecayDiagnostic {
    std::vector<long> n_grid;
    std::vector<double> kappa_grid;
    std::vector<std::vector<double>> pi_values; // [kappa][n]
    double fitted_lambda; // from pi_n ~ n^(lambda (1-kappa)), worst kappa
    bool strict_pass;     // fitted lambda < -1
};

/// Assumption 1: measures pi_n((n^-kappa, inf)) and fits the decay
/// exponent lambda. pi_n over the full ray is 1 by construction.
PiDecayDiagnostic check_assumption_pi_decay(const GammaKernel& k,
                                            const std::vector<long>& n_grid,
                                            const std::vector<double>& kappa_grid);

/// pi_n(A) for A = (eps, inf); eps = 0 gives 1 up to quadrature tolerance.
double pi_n_tail_mass(const GammaKernel& k, long n, double eps);

} // namespace bsscov

#endif
