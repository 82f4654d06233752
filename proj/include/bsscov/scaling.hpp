#ifndef BSSCOV_SCALING_HPP
#define BSSCOV_SCALING_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bsscov/kernel.hpp"
#include "bsscov/simulate.hpp"

namespace bsscov {

enum class TauRegime {
    CaseI,
    CaseITriple,
    Partition,
    CaseIIBar,
    CaseIITildeTheoretical,
    CaseIITildeEmpirical,
};

std::string to_string(TauRegime r);

struct ScalingFactors {
    TauRegime regime;
    long n;
    std::vector<double> values;
    std::vector<std::string> index_labels;
    std::string provenance; // "kernel-derived" | "data-derived"

    double at(int i) const; // 1-based
    void validate() const;  // strictly positive values
};

/// tau_n^(j) = sqrt(E[(Delta_1 G^(j))^2]) per component of the section-2 core.
ScalingFactors tau_case1(const KernelSpec& spec, long n);

/// tau_n^(k,r) per kernel cell (zero cells excluded from the index set).
ScalingFactors tau_case1_pairs(const KernelSpec& spec, long n);

/// tau over partition blocks: sqrt(E[(sum_{i in block} Delta_1 G^(i))^2]).
/// Blocks must be disjoint and cover {1..p}; the caller asserts within-block
/// independence of the driving measures (the Example's precondition).
ScalingFactors tau_partition(const KernelSpec& spec, long n,
                             const std::vector<std::vector<int>>& blocks);

enum class TauBarMode { SumDiagonal, MaxOverR };

/// tau-bar per component k: SumDiagonal takes sqrt(E[(sum_r D G^(k,r,r))^2]),
/// MaxOverR takes max_r sqrt(E[(D G^(k,r,r))^2]).
ScalingFactors tau_bar(const KernelSpec& spec, long n, TauBarMode mode);

/// tau-tilde from kernels and sigma second moments E[(sigma^(k,m))^2]:
/// sqrt(sum_m E[(D G^(k,m))^2] * E[(sigma^(k,m))^2]).
ScalingFactors tau_tilde_theoretical(const KernelSpec& spec,
                                     const Eigen::MatrixXd& sigma_second_moments,
                                     long n);

/// Sample root-mean-square of observed increments per component.
ScalingFactors tau_tilde_empirical(const PathBundle& data);

} // namespace bsscov

#endif
