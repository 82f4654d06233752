#ifndef BSSCOV_COVARIATION_HPP
#define BSSCOV_COVARIATION_HPP

#include <vector>

#include <Eigen/Dense>

#include "bsscov/scaling.hpp"
#include "bsscov/simulate.hpp"

namespace bsscov {

/// Running tau-scaled covariation in vech layout: column v holds
/// (1/n) sum_{i<=floor(n t)} (D_i A^(k)/tau_k)(D_i A^(l)/tau_l) for the
/// v-th pair of the fractal order (1,1),(2,1),(2,2),...
struct CovariationProcess {
    std::vector<double> times; // t_i = i/n, i = 1..N
    Eigen::MatrixXd vech;      // times x p(p+1)/2
    int p = 0;
    long n = 0;
    TauRegime regime = TauRegime::CaseI;

    int vech_dim() const { return p * (p + 1) / 2; }
    double at(double t, int k, int l) const; // nearest grid time <= t
    long time_index(double t) const;
};

CovariationProcess realised_covariation(const PathBundle& paths,
                                        const ScalingFactors& scaling);

/// R-bar / R-tilde centering terms at the statistic's own n. The r(0)
/// weights and the sigma-product integrals are retained separately.
struct BiasTerm {
    std::vector<double> times;
    Eigen::MatrixXd vech; // times x p(p+1)/2
    int p = 0;
    long n = 0;
    TauRegime regime = TauRegime::CaseIIBar;
    // weights[v] lists (index pair within the sigma grid, r0 weight)
    struct WeightEntry {
        int r, m, q, w; // sigma^(r,m) sigma^(q,w) factor indices
        double weight;
    };
    std::vector<std::vector<WeightEntry>> weights; // per vech entry
};

enum class BiasScenario { CaseIIBar, CaseIITilde };

/// Centering from constant sigma (exact integrals sigma sigma t).
BiasTerm bias_term(const KernelSpec& spec, const Eigen::MatrixXd& sigma,
                   const ScalingFactors& scaling, const std::vector<double>& times,
                   BiasScenario scenario);

/// Centering from a sigma sample path on the grid ((N+1) x p^2 columns
/// row-major), trapezoid integration.
BiasTerm bias_term_paths(const KernelSpec& spec, const Eigen::MatrixXd& sigma_path,
                         const GridSpec& grid, const ScalingFactors& scaling,
                         const std::vector<double>& times, BiasScenario scenario);

/// sqrt(n) (cov_t - bias_t), per time, vech layout.
Eigen::MatrixXd clt_statistic(const CovariationProcess& cov, const BiasTerm& bias);

/// Scale-free realized correlation on [eps, T]; values clamped to [-1,1]
/// (Cauchy-Schwarz holds exactly, clamping removes rounding spill).
CovariationProcess correlation_ratio(const PathBundle& paths, double eps = -1.0);

/// Running-to-terminal covariation ratio; equals 1 at t = T bit-exactly.
CovariationProcess relative_covolatility(const PathBundle& paths);

} // namespace bsscov

#endif
