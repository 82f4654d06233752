#include "bsscov/covariation.hpp"
#include "bsscov/errors.hpp"
#include "bsscov/gaussian_family.hpp"
#include "bsscov/indexing.hpp"

#include <algorithm>
#include <cmath>

namespace bsscov {

long CovariationProcess::time_index(double t) const {
    if (times.empty()) throw InsufficientData("CovariationProcess: empty");
    if (t < times.front() - 1e-12) throw OutOfRange("CovariationProcess: t before first time");
    long idx = 0;
    while (idx + 1 < static_cast<long>(times.size()) &&
           times[static_cast<std::size_t>(idx + 1)] <= t + 1e-12)
        ++idx;
    return idx;
}

double CovariationProcess::at(double t, int k, int l) const {
    if (l > k) std::swap(k, l);
    const long v = indexing::vech_index(k, l) - 1;
    return vech(time_index(t), v);
}

CovariationProcess realised_covariation(const PathBundle& paths,
                                        const ScalingFactors& scaling) {
    const Eigen::MatrixXd inc = paths.increments();
    const int p = static_cast<int>(inc.cols());
    if (static_cast<int>(scaling.values.size()) != p)
        throw RegimeMismatch("realised_covariation: scaling has wrong arity");
    if (scaling.n != paths.grid.n)
        throw RegimeMismatch("realised_covariation: scaling resolution differs from path grid");
    scaling.validate();
    const long N = inc.rows();
    const int vd = p * (p + 1) / 2;
    CovariationProcess out;
    out.p = p;
    out.n = paths.grid.n;
    out.regime = scaling.regime;
    out.times.resize(static_cast<std::size_t>(N));
    out.vech.setZero(N, vd);
    const double inv_n = 1.0 / static_cast<double>(paths.grid.n);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(vd);
    for (long i = 0; i < N; ++i) {
        for (int k = 1; k <= p; ++k)
            for (int l = 1; l <= k; ++l) {
                const double prod = (inc(i, k - 1) / scaling.at(k)) *
                                    (inc(i, l - 1) / scaling.at(l));
                acc(indexing::vech_index(k, l) - 1) += prod;
            }
        out.vech.row(i) = acc.transpose() * inv_n;
        out.times[static_cast<std::size_t>(i)] = static_cast<double>(i + 1) * inv_n;
    }
    return out;
}

namespace {

BiasTerm bias_core(const KernelSpec& spec, const ScalingFactors& scaling,
                   const std::vector<double>& times, BiasScenario scenario,
                   const std::function<double(int, int, int, int, double)>& sigma_int) {
    // sigma_int(r, m, q, w, t) = int_0^t sigma^(r,m) sigma^(q,w) ds
    const int p = spec.p;
    if (static_cast<int>(scaling.values.size()) != p)
        throw RegimeMismatch("bias_term: scaling arity");
    scaling.validate();
    const long n = scaling.n;
    BiasTerm out;
    out.p = p;
    out.n = n;
    out.times = times;
    out.regime = scenario == BiasScenario::CaseIIBar ? TauRegime::CaseIIBar
                                                     : TauRegime::CaseIITildeTheoretical;
    const int vd = p * (p + 1) / 2;
    out.vech.setZero(static_cast<long>(times.size()), vd);
    out.weights.resize(static_cast<std::size_t>(vd));
    for (int k = 1; k <= p; ++k)
        for (int l = 1; l <= k; ++l) {
            const long v = indexing::vech_index(k, l) - 1;
            auto& wlist = out.weights[static_cast<std::size_t>(v)];
            if (scenario == BiasScenario::CaseIIBar) {
                // sum_{r,m,q} E[DG^(k,r,m) DG^(l,q,m)] / (tau_k tau_l) * int ss
                for (int r = 1; r <= p; ++r)
                    for (int q = 1; q <= p; ++q) {
                        const auto& ckr = spec.at(k, r);
                        const auto& clq = spec.at(l, q);
                        if (!ckr || !clq) continue;
                        const double w0 = increment_cov(*ckr, *clq, n, 0) /
                                          (scaling.at(k) * scaling.at(l));
                        for (int m = 1; m <= p; ++m)
                            wlist.push_back({r, m, q, m, w0});
                    }
            } else {
                for (int m = 1; m <= p; ++m) {
                    const auto& ckm = spec.at(k, m);
                    const auto& clm = spec.at(l, m);
                    if (!ckm || !clm) continue;
                    const double w0 = increment_cov(*ckm, *clm, n, 0) /
                                      (scaling.at(k) * scaling.at(l));
                    wlist.push_back({k, m, l, m, w0});
                }
            }
            for (std::size_t ti = 0; ti < times.size(); ++ti) {
                double s = 0.0;
                for (const auto& we : wlist)
                    s += we.weight * sigma_int(we.r, we.m, we.q, we.w, times[ti]);
                out.vech(static_cast<long>(ti), v) = s;
            }
        }
    return out;
}

} // namespace

BiasTerm bias_term(const KernelSpec& spec, const Eigen::MatrixXd& sigma,
                   const ScalingFactors& scaling, const std::vector<double>& times,
                   BiasScenario scenario) {
    if (sigma.rows() != spec.p || sigma.cols() != spec.p)
        throw MissingVolatility("bias_term: sigma must be p x p");
    auto sigma_int = [&](int r, int m, int q, int w, double t) {
        return sigma(r - 1, m - 1) * sigma(q - 1, w - 1) * t;
    };
    return bias_core(spec, scaling, times, scenario, sigma_int);
}

BiasTerm bias_term_paths(const KernelSpec& spec, const Eigen::MatrixXd& sigma_path,
                         const GridSpec& grid, const ScalingFactors& scaling,
                         const std::vector<double>& times, BiasScenario scenario) {
    const int p = spec.p;
    if (sigma_path.cols() != p * p || sigma_path.rows() != grid.steps() + 1)
        throw MissingVolatility("bias_term_paths: sigma path must be (N+1) x p^2");
    const double dt = grid.dt();
    auto sigma_int = [&](int r, int m, int q, int w, double t) {
        const long hi = std::min<long>(grid.steps(), std::lround(t * grid.n));
        double acc = 0.0;
        const auto cr = sigma_path.col((r - 1) * p + (m - 1));
        const auto cq = sigma_path.col((q - 1) * p + (w - 1));
        for (long i = 0; i < hi; ++i)
            acc += 0.5 * dt * (cr(i) * cq(i) + cr(i + 1) * cq(i + 1));
        return acc;
    };
    return bias_core(spec, scaling, times, scenario, sigma_int);
}

Eigen::MatrixXd clt_statistic(const CovariationProcess& cov, const BiasTerm& bias) {
    if (cov.p != bias.p || cov.n != bias.n)
        throw RegimeMismatch("clt_statistic: grid/regime mismatch");
    const double root_n = std::sqrt(static_cast<double>(cov.n));
    Eigen::MatrixXd out(static_cast<long>(bias.times.size()), cov.vech.cols());
    for (std::size_t ti = 0; ti < bias.times.size(); ++ti) {
        const long row = cov.time_index(bias.times[ti]);
        out.row(static_cast<long>(ti)) =
            root_n * (cov.vech.row(row) - bias.vech.row(static_cast<long>(ti)));
    }
    return out;
}

CovariationProcess correlation_ratio(const PathBundle& paths, double eps) {
    const Eigen::MatrixXd inc = paths.increments();
    const int p = static_cast<int>(inc.cols());
    const long N = inc.rows();
    const double T = static_cast<double>(N) / static_cast<double>(paths.grid.n);
    if (eps < 0.0) eps = 0.05 * T;
    const long i0 = std::max<long>(1, static_cast<long>(std::ceil(
                                          eps * static_cast<double>(paths.grid.n))));
    if (i0 > N) throw OutOfRange("correlation_ratio: eps beyond horizon");
    const int vd = p * (p + 1) / 2;
    CovariationProcess out;
    out.p = p;
    out.n = paths.grid.n;
    out.regime = TauRegime::CaseIITildeEmpirical; // tau-free statistic
    Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(1, vd);
    Eigen::VectorXd ssq = Eigen::VectorXd::Zero(p);
    std::vector<double> times;
    std::vector<Eigen::VectorXd> rows;
    for (long i = 0; i < N; ++i) {
        for (int k = 1; k <= p; ++k) {
            ssq(k - 1) += inc(i, k - 1) * inc(i, k - 1);
            for (int l = 1; l <= k; ++l)
                cross(0, indexing::vech_index(k, l) - 1) += inc(i, k - 1) * inc(i, l - 1);
        }
        if (i + 1 < i0) continue;
        Eigen::VectorXd row(vd);
        for (int k = 1; k <= p; ++k)
            for (int l = 1; l <= k; ++l) {
                const long v = indexing::vech_index(k, l) - 1;
                if (k == l) {
                    if (!(ssq(k - 1) > 0.0))
                        throw DegenerateDenominator("correlation_ratio: component " +
                                                    std::to_string(k) + " is flat");
                    row(v) = 1.0;
                } else {
                    const double den = std::sqrt(ssq(k - 1)) * std::sqrt(ssq(l - 1));
                    if (!(den > 0.0))
                        throw DegenerateDenominator("correlation_ratio: flat component");
                    row(v) = std::clamp(cross(0, v) / den, -1.0, 1.0);
                }
            }
        times.push_back(static_cast<double>(i + 1) / static_cast<double>(paths.grid.n));
        rows.push_back(std::move(row));
    }
    out.times = std::move(times);
    out.vech.resize(static_cast<long>(rows.size()), vd);
    for (std::size_t r = 0; r < rows.size(); ++r)
        out.vech.row(static_cast<long>(r)) = rows[r].transpose();
    return out;
}

CovariationProcess relative_covolatility(const PathBundle& paths) {
    const Eigen::MatrixXd inc = paths.increments();
    const int p = static_cast<int>(inc.cols());
    const long N = inc.rows();
    const int vd = p * (p + 1) / 2;
    Eigen::MatrixXd running(N, vd);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(vd);
    for (long i = 0; i < N; ++i) {
        for (int k = 1; k <= p; ++k)
            for (int l = 1; l <= k; ++l)
                acc(indexing::vech_index(k, l) - 1) += inc(i, k - 1) * inc(i, l - 1);
        running.row(i) = acc.transpose();
    }
    CovariationProcess out;
    out.p = p;
    out.n = paths.grid.n;
    out.regime = TauRegime::CaseIITildeEmpirical;
    out.times.resize(static_cast<std::size_t>(N));
    out.vech.resize(N, vd);
    for (int v = 0; v < vd; ++v) {
        const double terminal = running(N - 1, v);
        if (terminal == 0.0)
            throw DegenerateDenominator("relative_covolatility: zero terminal covariation");
        for (long i = 0; i < N; ++i) out.vech(i, v) = running(i, v) / terminal;
    }
    for (long i = 0; i < N; ++i)
        out.times[static_cast<std::size_t>(i)] =
            static_cast<double>(i + 1) / static_cast<double>(paths.grid.n);
    return out;
}

} // namespace bsscov
