#ifndef BSSCOV_ASYMPTOTICS_HPP
#define BSSCOV_ASYMPTOTICS_HPP

#include <vector>

#include <Eigen/Dense>

#include "bsscov/gaussian_family.hpp"
#include "bsscov/indexing.hpp"
#include "bsscov/kernel.hpp"
#include "bsscov/scaling.hpp"

namespace bsscov {

struct ConvergenceDiag {
    std::vector<long> n_sequence;
    long lag_truncation = 0;
    double last_delta = 0.0; // max relative change between the last two n
    bool converged = false;
};

struct DMatrix {
    indexing::IndexMapDescriptor descriptor;
    Eigen::MatrixXd values;
    ConvergenceDiag diag;

    void check_shape() const;
};

enum class A2Policy { Require, Override };

inline const std::vector<long> kDefaultNSequence = {1 << 10, 1 << 12, 1 << 14};
inline constexpr long kDefaultLagTruncation = 10000;
inline constexpr double kDConvergenceTol = 1e-3;

/// Gaussian-level D over component pairs (p^2 x p^2), Case I scaling.
/// Evaluated at each n of the sequence with lags truncated at K; the
/// reported matrix is the last iterate, the diagnostics carry the deltas.
/// Throws NotConverged when the last two iterates differ beyond tolerance
/// (long-memory kernels at the delta >= 1/4 boundary genuinely diverge).
DMatrix D_gaussian(const KernelSpec& spec,
                   const std::vector<long>& n_sequence = kDefaultNSequence,
                   long K = kDefaultLagTruncation, A2Policy policy = A2Policy::Require,
                   bool strict = true);

/// Same with the partition scaling tau^(beta) of the Case II Gaussian CLT.
DMatrix D_gaussian_beta(const KernelSpec& spec,
                        const std::vector<std::vector<int>>& blocks,
                        const std::vector<long>& n_sequence = kDefaultNSequence,
                        long K = kDefaultLagTruncation, bool strict = true);

enum class Case1Normalization { PairTau, BarTau };

/// BSS Case I D over (k,r,m;l,q,w) coordinates, p^6 x p^6 full or the
/// vech reduction. BarTau gives the Case II first-scenario variant.
DMatrix D_case1_bss(const KernelSpec& spec, bool vech,
                    Case1Normalization norm = Case1Normalization::PairTau,
                    const std::vector<long>& n_sequence = kDefaultNSequence,
                    long K = kDefaultLagTruncation, bool strict = true);

/// Case II second scenario D over (k,m;l,w), p^4 x p^4 full or vech.
DMatrix D_scenario2(const KernelSpec& spec, const Eigen::MatrixXd& sigma_second_moments,
                    bool vech, const std::vector<long>& n_sequence = kDefaultNSequence,
                    long K = kDefaultLagTruncation, bool strict = true);

/// Single-n evaluation (exact finite-n covariance of the vech statistic);
/// the per-experiment target of the Monte Carlo CLT harness.
Eigen::MatrixXd D_at_n(const KernelSpec& spec, const indexing::IndexMapDescriptor& desc,
                       Case1Normalization norm, const Eigen::MatrixXd* sigma_moments,
                       long n, long K);

/// V_s for a sigma value grid (p x p): block rows of sigma products in the
/// nu/mu order. PairSquare yields the identity.
Eigen::MatrixXd V_matrix(const Eigen::MatrixXd& sigma,
                         const indexing::IndexMapDescriptor& desc);

/// int_0^t V_s D V_s' ds for constant sigma: t * (V D V').
Eigen::MatrixXd statistic_covariance(const DMatrix& D, const Eigen::MatrixXd& sigma,
                                     double t);

/// Trapezoid time integration over a sigma sample path ((N+1) x p^2).
Eigen::MatrixXd statistic_covariance_path(const DMatrix& D,
                                          const Eigen::MatrixXd& sigma_path,
                                          const GridSpec& grid, double t);

enum class RatioKind { CorrelationRatio, RelativeCovolatility };

/// Limit variance of the feasible correlation ratio at time t for pair
/// (k,l): the three Brownian blocks of the proposition are independent,
/// so the displayed combination's variances add.
double ratio_limit_variance_correlation(const Eigen::MatrixXd& stat_cov_t,
                                        const Eigen::VectorXd& R_t, int k, int l, int p);

/// Limit variance of the relative covolatility at t (terminal T):
/// Var[(1/R_T) I_t - (R_t/R_T^2) I_T] with Cov(I_t, I_T) = Var(I_t).
double ratio_limit_variance_relative(const Eigen::MatrixXd& stat_cov_t,
                                     const Eigen::MatrixXd& stat_cov_T,
                                     const Eigen::VectorXd& R_t,
                                     const Eigen::VectorXd& R_T, int k, int l, int p);

/// Minimum eigenvalue; clips tiny negative eigenvalues (>= -1e-8) to zero
/// in place and throws NotPSD below that.
double psd_floor(Eigen::MatrixXd& m, double tol = 1e-8);

/// Exact finite-n covariance of the vech product statistic taken at the
/// component level: entry ((k,l),(k',l')) =
///   (1/n) sum_{i<=L1} sum_{j<=L2} [rr_{kk'} rr_{ll'} + rr_{lk'} rr_{kl'}](j-i)
/// with rr the scale-normalized increment correlations of `family`.
/// L1 = L2 = floor(nt) gives Cov of the centered, sqrt(n)-scaled statistic
/// at time t; unequal windows give the cross-time covariance. Spans the
/// same value as V * D * V' with the matched window, through an
/// independent code path (no index maps).
Eigen::MatrixXd exact_vech_stat_cov(const GaussianFamily& family,
                                    const std::vector<double>& scales, long n,
                                    long L1, long L2);

} // namespace bsscov

#endif
