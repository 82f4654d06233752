#include "bsscov/gaussian_family.hpp"
#include "bsscov/errors.hpp"

#include <cmath>

namespace bsscov {

GaussianFamily::GaussianFamily(KernelSpec spec, std::vector<DerivedComponent> comps)
    : spec_(std::move(spec)), comps_(std::move(comps)) {
    for (const auto& c : comps_)
        for (const auto& a : c.atoms) {
            if (a.measure < 1 || a.measure > spec_.p)
                throw DimensionMismatch("GaussianFamily: measure index outside 1..p");
            spec_.at(a.row, a.col); // bounds check
        }
}

const DerivedComponent& GaussianFamily::component(int a) const {
    if (a < 1 || a > size()) throw OutOfRange("GaussianFamily::component");
    return comps_[static_cast<std::size_t>(a - 1)];
}

double GaussianFamily::autocovariance(int a, int b, double h) const {
    double sum = 0.0;
    for (const auto& pa : component(a).atoms) {
        const auto& ga = spec_.at(pa.row, pa.col);
        if (!ga) continue;
        for (const auto& pb : component(b).atoms) {
            if (pa.measure != pb.measure) continue;
            const auto& gb = spec_.at(pb.row, pb.col);
            if (!gb) continue;
            sum += pa.coef * pb.coef * cross_moment(*ga, *gb, h);
        }
    }
    return sum;
}

double GaussianFamily::increment_covariance(int a, int b, long n, long k) const {
    if (k < 0) return increment_covariance(b, a, n, -k);
    double sum = 0.0;
    for (const auto& pa : component(a).atoms) {
        const auto& ga = spec_.at(pa.row, pa.col);
        if (!ga) continue;
        for (const auto& pb : component(b).atoms) {
            if (pa.measure != pb.measure) continue;
            const auto& gb = spec_.at(pb.row, pb.col);
            if (!gb) continue;
            sum += pa.coef * pb.coef * increment_cov(*ga, *gb, n, k);
        }
    }
    return sum;
}

double GaussianFamily::increment_sd(int a, long n) const {
    const double v = increment_covariance(a, a, n, 0);
    if (!(v > 0.0))
        throw DegenerateVariance("GaussianFamily: zero increment variance for " +
                                 component(a).label);
    return std::sqrt(v);
}

GaussianFamily component_family(const KernelSpec& spec) {
    std::vector<DerivedComponent> comps;
    for (int i = 1; i <= spec.p; ++i) {
        DerivedComponent c;
        c.label = "G(" + std::to_string(i) + ")";
        for (int l = 1; l <= spec.p; ++l)
            if (spec.at(i, l)) c.atoms.push_back({1.0, i, l, l});
        comps.push_back(std::move(c));
    }
    return GaussianFamily(spec, std::move(comps));
}

GaussianFamily triple_family(const KernelSpec& spec) {
    std::vector<DerivedComponent> comps;
    for (int k = 1; k <= spec.p; ++k)
        for (int r = 1; r <= spec.p; ++r)
            for (int m = 1; m <= spec.p; ++m) {
                DerivedComponent c;
                c.label = "G(" + std::to_string(k) + "," + std::to_string(r) + ";" +
                          std::to_string(m) + ")";
                if (spec.at(k, r)) c.atoms.push_back({1.0, k, r, m});
                comps.push_back(std::move(c));
            }
    return GaussianFamily(spec, std::move(comps));
}

GaussianFamily pair_family(const KernelSpec& spec) {
    std::vector<DerivedComponent> comps;
    for (int k = 1; k <= spec.p; ++k)
        for (int m = 1; m <= spec.p; ++m) {
            DerivedComponent c;
            c.label = "G(" + std::to_string(k) + "," + std::to_string(m) + ")";
            if (spec.at(k, m)) c.atoms.push_back({1.0, k, m, m});
            comps.push_back(std::move(c));
        }
    return GaussianFamily(spec, std::move(comps));
}

GaussianFamily y_const_sigma_family(const KernelSpec& spec, const Eigen::MatrixXd& sigma) {
    if (sigma.rows() != spec.p || sigma.cols() != spec.p)
        throw DimensionMismatch("y_const_sigma_family: sigma must be p x p");
    std::vector<DerivedComponent> comps;
    for (int k = 1; k <= spec.p; ++k) {
        DerivedComponent c;
        c.label = "Y(" + std::to_string(k) + ")";
        for (int r = 1; r <= spec.p; ++r)
            for (int m = 1; m <= spec.p; ++m)
                if (spec.at(k, r) && sigma(r - 1, m - 1) != 0.0)
                    c.atoms.push_back({sigma(r - 1, m - 1), k, r, m});
        comps.push_back(std::move(c));
    }
    return GaussianFamily(spec, std::move(comps));
}

GaussianFamily x_const_sigma_family(const KernelSpec& spec, const Eigen::MatrixXd& sigma) {
    if (sigma.rows() != spec.p || sigma.cols() != spec.p)
        throw DimensionMismatch("x_const_sigma_family: sigma must be p x p");
    std::vector<DerivedComponent> comps;
    for (int k = 1; k <= spec.p; ++k) {
        DerivedComponent c;
        c.label = "X(" + std::to_string(k) + ")";
        for (int m = 1; m <= spec.p; ++m)
            if (spec.at(k, m) && sigma(k - 1, m - 1) != 0.0)
                c.atoms.push_back({sigma(k - 1, m - 1), k, m, m});
        comps.push_back(std::move(c));
    }
    return GaussianFamily(spec, std::move(comps));
}

int triple_index(int p, int k, int r, int m) {
    return ((k - 1) * p + (r - 1)) * p + m;
}

int pair_index(int p, int k, int m) { return (k - 1) * p + m; }

LagTable::LagTable(const GaussianFamily& family, long n, long max_lag)
    : n_(n), max_lag_(max_lag), m_(family.size()) {
    table_.assign(static_cast<std::size_t>(m_) * m_, {});
    sd_.assign(static_cast<std::size_t>(m_), 0.0);
    for (int a = 1; a <= m_; ++a) {
        const double v = family.increment_covariance(a, a, n, 0);
        sd_[static_cast<std::size_t>(a - 1)] = v > 0.0 ? std::sqrt(v) : 0.0;
    }
    for (int a = 1; a <= m_; ++a)
        for (int b = 1; b <= m_; ++b) {
            auto& row = table_[static_cast<std::size_t>(a - 1) * m_ + (b - 1)];
            row.resize(static_cast<std::size_t>(max_lag) + 1);
            for (long k = 0; k <= max_lag; ++k)
                row[static_cast<std::size_t>(k)] = family.increment_covariance(a, b, n, k);
        }
}

double LagTable::cov(int a, int b, long k) const {
    if (k < 0) return cov(b, a, -k);
    if (a < 1 || a > m_ || b < 1 || b > m_ || k > max_lag_)
        throw OutOfRange("LagTable::cov");
    return table_[static_cast<std::size_t>(a - 1) * m_ + (b - 1)]
                 [static_cast<std::size_t>(k)];
}

double LagTable::corr(int a, int b, long k) const {
    const double sa = sd(a), sb = sd(b);
    if (!(sa > 0.0) || !(sb > 0.0)) return 0.0; // zero components carry no mass
    return cov(a, b, k) / (sa * sb);
}

double LagTable::sd(int a) const {
    if (a < 1 || a > m_) throw OutOfRange("LagTable::sd");
    return sd_[static_cast<std::size_t>(a - 1)];
}

CorrelationTable build_correlation_table(const KernelSpec& spec, long n,
                                         CorrRegime regime, long max_lag) {
    if (n < 1 || max_lag < 0) throw DomainError("build_correlation_table: bad n/lag");
    CorrelationTable t;
    t.n = n;
    t.p = spec.p;
    t.regime = regime;
    t.max_lag = max_lag;
    for (const auto& c : spec.cells)
        if (c) t.delta_hint = std::max(t.delta_hint, c->delta);

    // Component-level cores per regime: Case I uses G^(i) with its own tau;
    // bar uses Y-core (sigma == 1) scaled by tau-bar; tilde uses X-core
    // (sigma == 1) scaled by tau-tilde. The latter two coincide with
    // y/x_const_sigma_family at sigma == 1.
    const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(spec.p, spec.p);
    GaussianFamily fam = (regime == CorrRegime::CaseI) ? component_family(spec)
                        : (regime == CorrRegime::CaseIIBar)
                            ? y_const_sigma_family(spec, ones)
                            : x_const_sigma_family(spec, ones);
    LagTable lt(fam, n, max_lag);
    t.entries.assign(static_cast<std::size_t>(spec.p) * spec.p, {});
    for (int i = 1; i <= spec.p; ++i)
        for (int j = 1; j <= spec.p; ++j) {
            auto& row = t.entries[static_cast<std::size_t>(i - 1) * spec.p + (j - 1)];
            row.resize(static_cast<std::size_t>(max_lag) + 1);
            for (long k = 0; k <= max_lag; ++k)
                row[static_cast<std::size_t>(k)] =
                    (i == j && k == 0) ? 1.0 : lt.corr(i, j, k);
        }
    return t;
}

} // namespace bsscov
