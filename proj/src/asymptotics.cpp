#include "bsscov/asymptotics.hpp"
#include "bsscov/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace bsscov {

using indexing::IndexMapDescriptor;
using indexing::Scheme;

void DMatrix::check_shape() const {
    if (values.rows() != values.cols() || values.rows() != descriptor.flat_size())
        throw DimensionMismatch("DMatrix: values do not match descriptor");
}

namespace {

struct FlatPair {
    int a, b; // family component indices, 1-based
};

GaussianFamily family_for(const Scheme scheme, const KernelSpec& spec) {
    switch (scheme) {
        case Scheme::PairSquare: return component_family(spec);
        case Scheme::Case1Full:
        case Scheme::Case1Vech: return triple_family(spec);
        case Scheme::Scenario2Full:
        case Scheme::Scenario2Vech: return pair_family(spec);
    }
    throw DomainError("family_for: unknown scheme");
}

std::vector<FlatPair> flat_pairs(const IndexMapDescriptor& desc) {
    std::vector<FlatPair> out;
    const long size = desc.flat_size();
    out.reserve(static_cast<std::size_t>(size));
    for (long z = 1; z <= size; ++z) {
        switch (desc.scheme) {
            case Scheme::PairSquare: {
                const auto xy = indexing::pair_from_flat(z, desc.p);
                out.push_back({xy[0], xy[1]});
                break;
            }
            case Scheme::Case1Full: {
                const auto v = indexing::case1_flat_map(z, desc.p);
                out.push_back({triple_index(desc.p, v[4], v[0], v[1]),
                               triple_index(desc.p, v[5], v[2], v[3])});
                break;
            }
            case Scheme::Case1Vech: {
                const auto v = indexing::case1_vech_map(z, desc.p);
                out.push_back({triple_index(desc.p, v[4], v[0], v[1]),
                               triple_index(desc.p, v[5], v[2], v[3])});
                break;
            }
            case Scheme::Scenario2Full: {
                const auto v = indexing::scenario2_flat_map(z, desc.p);
                out.push_back({pair_index(desc.p, v[2], v[0]),
                               pair_index(desc.p, v[3], v[1])});
                break;
            }
            case Scheme::Scenario2Vech: {
                const auto v = indexing::scenario2_vech_map(z, desc.p);
                out.push_back({pair_index(desc.p, v[2], v[0]),
                               pair_index(desc.p, v[3], v[1])});
                break;
            }
        }
    }
    return out;
}

std::vector<double> scales_for(const IndexMapDescriptor& desc, Case1Normalization norm,
                               const KernelSpec& spec, const Eigen::MatrixXd* sigma_moments,
                               const LagTable& lags, long n) {
    const int p = desc.p;
    std::vector<double> s;
    switch (desc.scheme) {
        case Scheme::PairSquare: {
            for (int i = 1; i <= p; ++i) s.push_back(lags.sd(i));
            break;
        }
        case Scheme::Case1Full:
        case Scheme::Case1Vech: {
            if (norm == Case1Normalization::PairTau) {
                for (int i = 1; i <= p * p * p; ++i) s.push_back(lags.sd(i));
            } else {
                const ScalingFactors tb = tau_bar(spec, n, TauBarMode::SumDiagonal);
                s.resize(static_cast<std::size_t>(p) * p * p);
                for (int k = 1; k <= p; ++k)
                    for (int r = 1; r <= p; ++r)
                        for (int m = 1; m <= p; ++m)
                            s[static_cast<std::size_t>(triple_index(p, k, r, m)) - 1] =
                                tb.at(k);
            }
            break;
        }
        case Scheme::Scenario2Full:
        case Scheme::Scenario2Vech: {
            const Eigen::MatrixXd mom =
                sigma_moments ? *sigma_moments : Eigen::MatrixXd::Ones(p, p);
            const ScalingFactors tt = tau_tilde_theoretical(spec, mom, n);
            s.resize(static_cast<std::size_t>(p) * p);
            for (int k = 1; k <= p; ++k)
                for (int m = 1; m <= p; ++m)
                    s[static_cast<std::size_t>(pair_index(p, k, m)) - 1] = tt.at(k);
            break;
        }
    }
    return s;
}

Eigen::MatrixXd entry_matrix(const LagTable& lags, const std::vector<double>& scales,
                             const std::vector<FlatPair>& pairs, long n, long K) {
    const long H = std::min(K, n - 1);
    const long size = static_cast<long>(pairs.size());
    auto rr = [&](int a, int b, long h) {
        const double sa = scales[static_cast<std::size_t>(a - 1)];
        const double sb = scales[static_cast<std::size_t>(b - 1)];
        if (!(sa > 0.0) || !(sb > 0.0)) return 0.0;
        return lags.cov(a, b, h) / (sa * sb);
    };
    Eigen::MatrixXd D(size, size);
    for (long z = 0; z < size; ++z) {
        for (long y = z; y < size; ++y) {
            const auto [az, bz] = pairs[static_cast<std::size_t>(z)];
            const auto [ay, by] = pairs[static_cast<std::size_t>(y)];
            double sum = rr(az, ay, 0) * rr(bz, by, 0) + rr(bz, ay, 0) * rr(az, by, 0);
            for (long h = 1; h <= H; ++h) {
                const double w = static_cast<double>(n - h) / static_cast<double>(n);
                sum += w * (rr(az, ay, h) * rr(bz, by, h) + rr(bz, ay, h) * rr(az, by, h) +
                            rr(az, ay, -h) * rr(bz, by, -h) + rr(bz, ay, -h) * rr(az, by, -h));
            }
            D(z, y) = sum;
            D(y, z) = sum;
        }
    }
    return D;
}

DMatrix build_sequence(const KernelSpec& spec, const IndexMapDescriptor& desc,
                       Case1Normalization norm, const Eigen::MatrixXd* sigma_moments,
                       const std::vector<long>& n_sequence, long K, bool strict) {
    if (n_sequence.empty()) throw DomainError("D builder: empty n sequence");
    const GaussianFamily fam = family_for(desc.scheme, spec);
    const auto pairs = flat_pairs(desc);
    DMatrix out;
    out.descriptor = desc;
    out.diag.n_sequence = n_sequence;
    out.diag.lag_truncation = K;
    Eigen::MatrixXd prev;
    for (long n : n_sequence) {
        const long H = std::min(K, n - 1);
        LagTable lags(fam, n, H);
        const auto scales = scales_for(desc, norm, spec, sigma_moments, lags, n);
        Eigen::MatrixXd cur = entry_matrix(lags, scales, pairs, n, H);
        if (prev.size() > 0) {
            const double scale = std::max(1e-300, prev.cwiseAbs().maxCoeff());
            out.diag.last_delta = (cur - prev).cwiseAbs().maxCoeff() / scale;
        }
        prev = std::move(cur);
    }
    out.diag.converged =
        n_sequence.size() < 2 || out.diag.last_delta < kDConvergenceTol;
    out.values = std::move(prev);
    psd_floor(out.values);
    if (strict && !out.diag.converged)
        throw NotConverged("D matrix: successive-n delta " +
                           std::to_string(out.diag.last_delta) + " exceeds " +
                           std::to_string(kDConvergenceTol));
    return out;
}

} // namespace

DMatrix D_gaussian(const KernelSpec& spec, const std::vector<long>& n_sequence, long K,
                   A2Policy policy, bool strict) {
    if (policy == A2Policy::Require) {
        const long n_probe = n_sequence.back();
        const auto table = build_correlation_table(spec, n_probe, CorrRegime::CaseI, 200);
        const auto diag = check_assumption_squared_correlations(table, 200);
        if (!diag.strict_pass)
            throw DomainError(
                "D_gaussian: (A2) diagnostic failed (summand exponent " +
                std::to_string(diag.summand_exponent) + " >= -1); pass "
                "A2Policy::Override to proceed");
    }
    return build_sequence(spec, {spec.p, Scheme::PairSquare}, Case1Normalization::PairTau,
                          nullptr, n_sequence, K, strict);
}

DMatrix D_gaussian_beta(const KernelSpec& spec, const std::vector<std::vector<int>>& blocks,
                        const std::vector<long>& n_sequence, long K, bool strict) {
    // partition scaling: component i is normalized by its block's tau
    if (n_sequence.empty()) throw DomainError("D_gaussian_beta: empty n sequence");
    const GaussianFamily fam = component_family(spec);
    const IndexMapDescriptor desc{spec.p, Scheme::PairSquare};
    const auto pairs = flat_pairs(desc);
    DMatrix out;
    out.descriptor = desc;
    out.diag.n_sequence = n_sequence;
    out.diag.lag_truncation = K;
    Eigen::MatrixXd prev;
    for (long n : n_sequence) {
        const long H = std::min(K, n - 1);
        LagTable lags(fam, n, H);
        const ScalingFactors part = tau_partition(spec, n, blocks);
        std::vector<double> scales(static_cast<std::size_t>(spec.p), 0.0);
        for (std::size_t b = 0; b < blocks.size(); ++b)
            for (int i : blocks[b])
                scales[static_cast<std::size_t>(i - 1)] = part.values[b];
        Eigen::MatrixXd cur = entry_matrix(lags, scales, pairs, n, H);
        if (prev.size() > 0) {
            const double scale = std::max(1e-300, prev.cwiseAbs().maxCoeff());
            out.diag.last_delta = (cur - prev).cwiseAbs().maxCoeff() / scale;
        }
        prev = std::move(cur);
    }
    out.diag.converged = n_sequence.size() < 2 || out.diag.last_delta < kDConvergenceTol;
    out.values = std::move(prev);
    psd_floor(out.values);
    if (strict && !out.diag.converged)
        throw NotConverged("D_gaussian_beta: not converged");
    return out;
}

DMatrix D_case1_bss(const KernelSpec& spec, bool vech, Case1Normalization norm,
                    const std::vector<long>& n_sequence, long K, bool strict) {
    const Scheme scheme = vech ? Scheme::Case1Vech : Scheme::Case1Full;
    const IndexMapDescriptor desc{spec.p, scheme};
    if (!vech && spec.p > 3)
        throw SizeCap("D_case1_bss: full form limited to p <= 3 (p^6 explosion)");
    return build_sequence(spec, desc, norm, nullptr, n_sequence, K, strict);
}

DMatrix D_scenario2(const KernelSpec& spec, const Eigen::MatrixXd& sigma_second_moments,
                    bool vech, const std::vector<long>& n_sequence, long K, bool strict) {
    const Scheme scheme = vech ? Scheme::Scenario2Vech : Scheme::Scenario2Full;
    return build_sequence(spec, {spec.p, scheme}, Case1Normalization::PairTau,
                          &sigma_second_moments, n_sequence, K, strict);
}

Eigen::MatrixXd D_at_n(const KernelSpec& spec, const IndexMapDescriptor& desc,
                       Case1Normalization norm, const Eigen::MatrixXd* sigma_moments,
                       long n, long K) {
    const GaussianFamily fam = family_for(desc.scheme, spec);
    const long H = std::min(K, n - 1);
    LagTable lags(fam, n, H);
    const auto scales = scales_for(desc, norm, spec, sigma_moments, lags, n);
    return entry_matrix(lags, scales, flat_pairs(desc), n, H);
}

Eigen::MatrixXd V_matrix(const Eigen::MatrixXd& sigma, const IndexMapDescriptor& desc) {
    const int p = desc.p;
    if (sigma.rows() != p || sigma.cols() != p)
        throw DimensionMismatch("V_matrix: sigma must be p x p");
    const long rows = desc.rows();
    const long cols = desc.flat_size();
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(rows, cols);
    switch (desc.scheme) {
        case Scheme::PairSquare:
            return Eigen::MatrixXd::Identity(rows, cols);
        case Scheme::Case1Full:
        case Scheme::Case1Vech: {
            const auto nu = indexing::nu_enumerate(p);
            const long block = static_cast<long>(nu.size());
            for (long row = 0; row < rows; ++row)
                for (long s = 0; s < block; ++s) {
                    const auto& q = nu[static_cast<std::size_t>(s)];
                    V(row, row * block + s) =
                        sigma(q[0] - 1, q[1] - 1) * sigma(q[2] - 1, q[3] - 1);
                }
            return V;
        }
        case Scheme::Scenario2Full:
        case Scheme::Scenario2Vech: {
            const auto mu = indexing::mu_enumerate(p);
            const long block = static_cast<long>(mu.size());
            for (long row = 0; row < rows; ++row) {
                int k, l;
                if (desc.scheme == Scheme::Scenario2Full) {
                    const auto kl = indexing::pair_from_flat(row + 1, p);
                    k = kl[0];
                    l = kl[1];
                } else {
                    const auto kl = indexing::vech_chi_xi(row + 1);
                    k = static_cast<int>(kl[0]);
                    l = static_cast<int>(kl[1]);
                }
                for (long s = 0; s < block; ++s) {
                    const auto& q = mu[static_cast<std::size_t>(s)];
                    V(row, row * block + s) =
                        sigma(k - 1, q[0] - 1) * sigma(l - 1, q[1] - 1);
                }
            }
            return V;
        }
    }
    throw DomainError("V_matrix: unknown scheme");
}

Eigen::MatrixXd statistic_covariance(const DMatrix& D, const Eigen::MatrixXd& sigma,
                                     double t) {
    D.check_shape();
    if (!(t >= 0.0)) throw DomainError("statistic_covariance: t >= 0");
    const Eigen::MatrixXd V = V_matrix(sigma, D.descriptor);
    Eigen::MatrixXd out = t * (V * D.values * V.transpose());
    out = ((out + out.transpose()) * 0.5).eval();
    return out;
}

Eigen::MatrixXd statistic_covariance_path(const DMatrix& D,
                                          const Eigen::MatrixXd& sigma_path,
                                          const GridSpec& grid, double t) {
    D.check_shape();
    const int p = D.descriptor.p;
    if (sigma_path.cols() != p * p || sigma_path.rows() != grid.steps() + 1)
        throw DimensionMismatch("statistic_covariance_path: sigma path shape");
    const long hi = std::min<long>(grid.steps(), std::lround(t * grid.n));
    const double dt = grid.dt();
    Eigen::MatrixXd acc =
        Eigen::MatrixXd::Zero(D.descriptor.rows(), D.descriptor.rows());
    auto vdv = [&](long i) {
        Eigen::MatrixXd s(p, p);
        for (int r = 0; r < p; ++r)
            for (int m = 0; m < p; ++m) s(r, m) = sigma_path(i, r * p + m);
        const Eigen::MatrixXd V = V_matrix(s, D.descriptor);
        return Eigen::MatrixXd(V * D.values * V.transpose());
    };
    Eigen::MatrixXd prev = vdv(0);
    for (long i = 1; i <= hi; ++i) {
        Eigen::MatrixXd cur = vdv(i);
        acc += 0.5 * dt * (prev + cur);
        prev = std::move(cur);
    }
    acc = ((acc + acc.transpose()) * 0.5).eval();
    return acc;
}

double ratio_limit_variance_correlation(const Eigen::MatrixXd& stat_cov_t,
                                        const Eigen::VectorXd& R_t, int k, int l, int p) {
    if (l > k) std::swap(k, l);
    if (k == l) return 0.0; // coefficients 1 - 1/2 - 1/2 cancel: ratio pinned at 1
    const long vkl = indexing::vech_index(k, l) - 1;
    const long vkk = indexing::vech_index(k, k) - 1;
    const long vll = indexing::vech_index(l, l) - 1;
    const long vd = static_cast<long>(p) * (p + 1) / 2;
    if (stat_cov_t.rows() != vd || R_t.size() != vd)
        throw DimensionMismatch("ratio_limit_variance_correlation: vech sizes");
    const double rkk = R_t(vkk), rll = R_t(vll), rkl = R_t(vkl);
    if (!(rkk > 0.0) || !(rll > 0.0))
        throw DegenerateR("ratio_limit_variance_correlation: nonpositive diagonal R");
    // the three stochastic integrals ride independent Brownian blocks
    const double var = stat_cov_t(vkl, vkl) +
                       0.25 * (rkl / rkk) * (rkl / rkk) * stat_cov_t(vkk, vkk) +
                       0.25 * (rkl / rll) * (rkl / rll) * stat_cov_t(vll, vll);
    return var / (rkk * rll);
}

double ratio_limit_variance_relative(const Eigen::MatrixXd& stat_cov_t,
                                     const Eigen::MatrixXd& stat_cov_T,
                                     const Eigen::VectorXd& R_t,
                                     const Eigen::VectorXd& R_T, int k, int l, int p) {
    if (l > k) std::swap(k, l);
    const long v = indexing::vech_index(k, l) - 1;
    const long vd = static_cast<long>(p) * (p + 1) / 2;
    if (stat_cov_t.rows() != vd || stat_cov_T.rows() != vd || R_t.size() != vd ||
        R_T.size() != vd)
        throw DimensionMismatch("ratio_limit_variance_relative: vech sizes");
    const double rT = R_T(v);
    if (rT == 0.0) throw DegenerateR("ratio_limit_variance_relative: R_T = 0");
    const double st = stat_cov_t(v, v);
    const double sT = stat_cov_T(v, v);
    const double a = 1.0 / rT;
    const double b = R_t(v) / (rT * rT);
    // Cov(I_t, I_T) = Var(I_t) by independent increments of the block motion
    return a * a * st + b * b * sT - 2.0 * a * b * st;
}

Eigen::MatrixXd exact_vech_stat_cov(const GaussianFamily& family,
                                    const std::vector<double>& scales, long n,
                                    long L1, long L2) {
    const int p = family.size();
    if (static_cast<int>(scales.size()) != p)
        throw DimensionMismatch("exact_vech_stat_cov: one scale per component");
    if (L1 < 1 || L2 < 1 || L1 > n || L2 > n)
        throw DomainError("exact_vech_stat_cov: windows must lie in 1..n");
    const long maxlag = std::max(L1, L2) - 1;
    LagTable lags(family, n, maxlag);
    auto rr = [&](int a, int b, long h) {
        const double sa = scales[static_cast<std::size_t>(a - 1)];
        const double sb = scales[static_cast<std::size_t>(b - 1)];
        if (!(sa > 0.0) || !(sb > 0.0)) return 0.0;
        return lags.cov(a, b, h) / (sa * sb);
    };
    // pair count at lag h: #{(i,j): 1<=i<=L1, 1<=j<=L2, j-i=h}
    auto cnt = [&](long h) {
        const long lo = std::max<long>(1, 1 - h);
        const long hi = std::min(L1, L2 - h);
        return std::max<long>(0, hi - lo + 1);
    };
    const int vd = p * (p + 1) / 2;
    Eigen::MatrixXd out(vd, vd);
    for (int k = 1; k <= p; ++k)
        for (int l = 1; l <= k; ++l)
            for (int k2 = 1; k2 <= p; ++k2)
                for (int l2 = 1; l2 <= k2; ++l2) {
                    const long v1 = indexing::vech_index(k, l) - 1;
                    const long v2 = indexing::vech_index(k2, l2) - 1;
                    double sum = 0.0;
                    for (long h = -(L1 - 1); h <= L2 - 1; ++h) {
                        const long c = cnt(h);
                        if (c == 0) continue;
                        sum += static_cast<double>(c) *
                               (rr(k, k2, h) * rr(l, l2, h) + rr(l, k2, h) * rr(k, l2, h));
                    }
                    out(v1, v2) = sum / static_cast<double>(n);
                }
    return out;
}

double psd_floor(Eigen::MatrixXd& m, double tol) {
    if (m.rows() != m.cols()) throw DimensionMismatch("psd_floor: square required");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig >= 0.0) return min_eig;
    if (min_eig < -tol)
        throw NotPSD("psd_floor: min eigenvalue " + std::to_string(min_eig) +
                     " below -" + std::to_string(tol));
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    m = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    m = ((m + m.transpose()) * 0.5).eval();
    return min_eig;
}

} // namespace bsscov
