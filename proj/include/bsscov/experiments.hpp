#ifndef BSSCOV_EXPERIMENTS_HPP
#define BSSCOV_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "bsscov/kernel.hpp"
#include "bsscov/report.hpp"
#include "bsscov/simulate.hpp"

namespace bsscov {

struct ExperimentConfig {
    enum class Kind { LLN, CLT, FeasibleRatio, AssumptionAudit, GaussianCoreCLT };

    Kind kind = Kind::GaussianCoreCLT;
    KernelSpec spec = KernelSpec::single(0.25, 1.0);
    BssVariant variant = BssVariant::ElementwiseX;
    Eigen::MatrixXd sigma;                 // constant sigma grid; ones if empty
    std::string regime = "CaseII-tilde";   // CLT/LLN scenario selector
    double T = 1.0;
    long n = 500;
    long M = 1000;
    std::uint64_t seed = 20260801;
    double se_mult = 3.0;
    std::vector<double> checkpoints = {0.25, 0.5, 1.0};
    std::vector<long> n_ladder = {250, 500, 1000};
    std::vector<double> delta_grid = {-0.25, -0.1, 0.1, 0.25, 0.4, -0.6, 0.6};
    double lambda = 1.0; // audit grid decay rate
    int threads = 1;

    Eigen::MatrixXd sigma_or_ones() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    static Kind kind_from_string(const std::string& s);
    static std::string kind_to_string(Kind k);
};

nlohmann::json kernel_spec_to_json(const KernelSpec& spec);
KernelSpec kernel_spec_from_json(const nlohmann::json& j);

ExperimentReport run_lln_experiment(const ExperimentConfig& cfg);
ExperimentReport run_clt_experiment(const ExperimentConfig& cfg);
ExperimentReport run_feasible_experiment(const ExperimentConfig& cfg);
ExperimentReport run_assumption_audit(const ExperimentConfig& cfg);
ExperimentReport run_gaussian_core_clt(const ExperimentConfig& cfg);

/// Dispatch on cfg.kind; fills wall time and environment fingerprint.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

} // namespace bsscov

#endif
