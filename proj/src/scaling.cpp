#include "bsscov/scaling.hpp"
#include "bsscov/errors.hpp"
#include "bsscov/gaussian_family.hpp"

#include <cmath>

namespace bsscov {

std::string to_string(TauRegime r) {
    switch (r) {
        case TauRegime::CaseI: return "CaseI";
        case TauRegime::CaseITriple: return "CaseI-triple";
        case TauRegime::Partition: return "Partition";
        case TauRegime::CaseIIBar: return "CaseII-bar";
        case TauRegime::CaseIITildeTheoretical: return "CaseII-tilde-theoretical";
        case TauRegime::CaseIITildeEmpirical: return "CaseII-tilde-empirical";
    }
    return "?";
}

double ScalingFactors::at(int i) const {
    if (i < 1 || i > static_cast<int>(values.size()))
        throw OutOfRange("ScalingFactors::at");
    return values[static_cast<std::size_t>(i - 1)];
}

void ScalingFactors::validate() const {
    for (double v : values)
        if (!(v > 0.0) || !std::isfinite(v))
            throw DegenerateVariance("ScalingFactors: nonpositive value");
}

ScalingFactors tau_case1(const KernelSpec& spec, long n) {
    if (n < 1) throw DomainError("tau_case1: n >= 1");
    const GaussianFamily fam = component_family(spec);
    ScalingFactors out{TauRegime::CaseI, n, {}, {}, "kernel-derived"};
    for (int i = 1; i <= spec.p; ++i) {
        out.values.push_back(fam.increment_sd(i, n));
        out.index_labels.push_back("G(" + std::to_string(i) + ")");
    }
    out.validate();
    return out;
}

ScalingFactors tau_case1_pairs(const KernelSpec& spec, long n) {
    if (n < 1) throw DomainError("tau_case1_pairs: n >= 1");
    ScalingFactors out{TauRegime::CaseITriple, n, {}, {}, "kernel-derived"};
    for (int k = 1; k <= spec.p; ++k)
        for (int r = 1; r <= spec.p; ++r) {
            const auto& cell = spec.at(k, r);
            if (!cell) continue;
            const double v = increment_cov(*cell, *cell, n, 0);
            if (!(v > 0.0)) throw DegenerateVariance("tau_case1_pairs");
            out.values.push_back(std::sqrt(v));
            out.index_labels.push_back("(" + std::to_string(k) + "," + std::to_string(r) + ")");
        }
    out.validate();
    return out;
}

ScalingFactors tau_partition(const KernelSpec& spec, long n,
                             const std::vector<std::vector<int>>& blocks) {
    if (n < 1) throw DomainError("tau_partition: n >= 1");
    std::vector<int> seen(static_cast<std::size_t>(spec.p), 0);
    for (const auto& b : blocks)
        for (int i : b) {
            if (i < 1 || i > spec.p) throw InvalidPartition("tau_partition: index out of range");
            if (seen[static_cast<std::size_t>(i - 1)]++)
                throw InvalidPartition("tau_partition: blocks overlap");
        }
    for (int c : seen)
        if (!c) throw InvalidPartition("tau_partition: blocks do not cover {1..p}");

    const GaussianFamily fam = component_family(spec);
    LagTable lags(fam, n, 0);
    ScalingFactors out{TauRegime::Partition, n, {}, {}, "kernel-derived"};
    for (const auto& b : blocks) {
        double var = 0.0;
        for (int i : b)
            for (int j : b) var += lags.cov(i, j, 0);
        if (!(var > 0.0)) throw DegenerateVariance("tau_partition: block variance");
        out.values.push_back(std::sqrt(var));
        std::string lab = "{";
        for (std::size_t q = 0; q < b.size(); ++q)
            lab += (q ? "," : "") + std::to_string(b[q]);
        out.index_labels.push_back(lab + "}");
    }
    out.validate();
    return out;
}

ScalingFactors tau_bar(const KernelSpec& spec, long n, TauBarMode mode) {
    if (n < 1) throw DomainError("tau_bar: n >= 1");
    ScalingFactors out{TauRegime::CaseIIBar, n, {}, {},
                       mode == TauBarMode::SumDiagonal ? "kernel-derived/sum-diagonal"
                                                       : "kernel-derived/max-over-r"};
    for (int k = 1; k <= spec.p; ++k) {
        double value = 0.0;
        if (mode == TauBarMode::SumDiagonal) {
            // independent measures: Var(sum_r D G^(k,r,r)) = sum_r Var(D G^(k,r,r))
            double var = 0.0;
            for (int r = 1; r <= spec.p; ++r) {
                const auto& cell = spec.at(k, r);
                if (cell) var += increment_cov(*cell, *cell, n, 0);
            }
            if (!(var > 0.0)) throw DegenerateVariance("tau_bar: component " + std::to_string(k));
            value = std::sqrt(var);
        } else {
            for (int r = 1; r <= spec.p; ++r) {
                const auto& cell = spec.at(k, r);
                if (cell) value = std::max(value, std::sqrt(increment_cov(*cell, *cell, n, 0)));
            }
            if (!(value > 0.0)) throw DegenerateVariance("tau_bar: component " + std::to_string(k));
        }
        out.values.push_back(value);
        out.index_labels.push_back("Y(" + std::to_string(k) + ")");
    }
    out.validate();
    return out;
}

ScalingFactors tau_tilde_theoretical(const KernelSpec& spec,
                                     const Eigen::MatrixXd& sigma_second_moments,
                                     long n) {
    if (n < 1) throw DomainError("tau_tilde_theoretical: n >= 1");
    if (sigma_second_moments.rows() != spec.p || sigma_second_moments.cols() != spec.p)
        throw DimensionMismatch("tau_tilde_theoretical: moments must be p x p");
    ScalingFactors out{TauRegime::CaseIITildeTheoretical, n, {}, {}, "kernel-derived"};
    for (int k = 1; k <= spec.p; ++k) {
        double var = 0.0;
        for (int m = 1; m <= spec.p; ++m) {
            const auto& cell = spec.at(k, m);
            if (!cell) continue;
            const double s2 = sigma_second_moments(k - 1, m - 1);
            if (!(s2 >= 0.0)) throw DomainError("tau_tilde_theoretical: negative moment");
            var += increment_cov(*cell, *cell, n, 0) * s2;
        }
        if (!(var > 0.0)) throw DegenerateVariance("tau_tilde_theoretical: component " +
                                                   std::to_string(k));
        out.values.push_back(std::sqrt(var));
        out.index_labels.push_back("X(" + std::to_string(k) + ")");
    }
    out.validate();
    return out;
}

ScalingFactors tau_tilde_empirical(const PathBundle& data) {
    const Eigen::MatrixXd inc = data.increments();
    if (inc.rows() < 30)
        throw InsufficientData("tau_tilde_empirical: need at least 30 increments");
    ScalingFactors out{TauRegime::CaseIITildeEmpirical, data.grid.n, {}, {}, "data-derived"};
    for (int k = 0; k < inc.cols(); ++k) {
        const double rms = std::sqrt(inc.col(k).squaredNorm() / static_cast<double>(inc.rows()));
        if (!(rms > 0.0)) throw DegenerateVariance("tau_tilde_empirical: flat component");
        out.values.push_back(rms);
        out.index_labels.push_back("X(" + std::to_string(k + 1) + ")");
    }
    out.validate();
    return out;
}

} // namespace bsscov
