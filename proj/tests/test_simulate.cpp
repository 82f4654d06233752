#include <doctest.h>

#include <cmath>
#include <vector>

#include "bsscov/errors.hpp"
#include "bsscov/kernel.hpp"
#include "bsscov/rng.hpp"
#include "bsscov/simulate.hpp"
#include "bsscov/stats.hpp"

using namespace bsscov;

TEST_CASE("philox substreams are deterministic and distinct") {
    NormalStream a(substream_key(7, 0));
    NormalStream a2(substream_key(7, 0));
    NormalStream b(substream_key(7, 1));
    double sa = 0, sb = 0;
    for (int i = 0; i < 64; ++i) {
        const double x = a.next();
        CHECK(x == a2.next());
        sa += x;
        sb += b.next();
    }
    CHECK(sa != sb);
}

TEST_CASE("philox normals pass moment sanity") {
    NormalStream s(substream_key(123, 9));
    std::vector<double> x(20000);
    for (auto& v : x) v = s.next();
    CHECK(std::abs(stats::mean(x)) < 0.025);
    CHECK(stats::variance(x) == doctest::Approx(1.0).epsilon(0.04));
    const auto jb = stats::jarque_bera(x);
    CHECK(jb.p_value > 0.005);
}

TEST_CASE("core covariance structure") {
    const GridSpec grid(1.0, 16);
    const auto single = component_family(KernelSpec::single(0.0, 1.0));
    const Eigen::MatrixXd cov = build_core_covariance(single, grid);
    CHECK(cov.rows() == 16);
    // increment variance 2(1/2 - e^(-1/n)/2)
    const double expected = 1.0 - std::exp(-1.0 / 16.0);
    for (long i = 0; i < 16; ++i) CHECK(cov(i, i) == doctest::Approx(expected).epsilon(1e-9));
    CHECK((cov - cov.transpose()).cwiseAbs().maxCoeff() < 1e-12);

    // independent components: cross blocks vanish
    const auto diag = component_family(KernelSpec::identical_diagonal(2, 0.25, 1.0));
    const Eigen::MatrixXd cov2 = build_core_covariance(diag, grid);
    CHECK(cov2.rows() == 32);
    CHECK(cov2.block(0, 16, 16, 16).cwiseAbs().maxCoeff() == 0.0);
    for (long i = 0; i < 32; ++i) CHECK(cov2(i, i) > 0.0);
}

TEST_CASE("size cap honored") {
    const GridSpec grid(1.0, 5000);
    const auto fam = component_family(KernelSpec::single(0.25, 1.0));
    CHECK_THROWS_AS(build_core_covariance(fam, grid, 4000), SizeCap);
}

TEST_CASE("gaussian core sampling matches theory") {
    const auto spec = KernelSpec::single(0.25, 1.0);
    const GridSpec grid(1.0, 32);
    const auto fam = component_family(spec);
    const CoreSimulator sim(fam, grid);
    const long M = 4000;
    const double tau2 = fam.increment_covariance(1, 1, 32, 0);

    std::vector<double> first(M), lag1a(M), lag1b(M);
    for (long m = 0; m < M; ++m) {
        const Eigen::MatrixXd inc = sim.draw_increments(42, m);
        first[static_cast<std::size_t>(m)] = inc(0, 0);
        lag1a[static_cast<std::size_t>(m)] = inc(3, 0);
        lag1b[static_cast<std::size_t>(m)] = inc(4, 0);
    }
    // sample increment variance within 3 SE of the theoretical value
    const double v = stats::variance(first);
    CHECK(std::abs(v - tau2) <= 3.0 * stats::variance_se(first));
    // sample mean near zero
    CHECK(std::abs(stats::mean(first)) <= 4.0 * stats::standard_error_of_mean(first));
    // lag-1 correlation within 4 SE of increment_correlation
    const double rho_hat = stats::covariance(lag1a, lag1b) / stats::variance(lag1a);
    const double rho = increment_correlation(spec, 32, 1, 1, 1);
    CHECK(std::abs(rho_hat - rho) <= 4.0 / std::sqrt(static_cast<double>(M)));
}

TEST_CASE("M = 0 gives an empty batch, same seed gives identical output") {
    const auto spec = KernelSpec::single(0.1, 1.0);
    const GridSpec grid(1.0, 8);
    CHECK(simulate_gaussian_core(component_family(spec), grid, 0, 1).empty());
    const auto a = simulate_gaussian_core(component_family(spec), grid, 3, 99);
    const auto b = simulate_gaussian_core(component_family(spec), grid, 3, 99);
    for (std::size_t m = 0; m < a.size(); ++m)
        CHECK(a[m].values == b[m].values);
}

TEST_CASE("standardized core increments are Gaussian") {
    const auto spec = KernelSpec::single(0.25, 1.0);
    const GridSpec grid(1.0, 64);
    const CoreSimulator sim(component_family(spec), grid);
    std::vector<double> pooled;
    pooled.reserve(200 * 64);
    for (long m = 0; m < 200; ++m) {
        const Eigen::MatrixXd inc = sim.draw_increments(5, m);
        for (long i = 0; i < inc.rows(); ++i) pooled.push_back(inc(i, 0));
    }
    CHECK(stats::jarque_bera(pooled).p_value > 0.005);
}

TEST_CASE("variant Y with diagonal sigma equals the matching variant X") {
    const auto spec = KernelSpec(2, {GammaKernel(0.25, 1.0), GammaKernel(0.1, 2.0),
                                     GammaKernel(-0.2, 0.5), GammaKernel(0.3, 1.5)});
    Eigen::MatrixXd sd = Eigen::MatrixXd::Zero(2, 2);
    sd(0, 0) = 1.3;
    sd(1, 1) = 0.6;
    // Y with diagonal sigma: Y_k = sum_r sigma_rr G^(k,r;r); the matching X
    // uses sigma'_{km} = sigma_mm
    Eigen::MatrixXd sx(2, 2);
    sx << 1.3, 0.6, 1.3, 0.6;
    const GridSpec grid(1.0, 16);
    const auto y = simulate_bss(spec, BssModel::constant_sigma(BssVariant::MatrixY, 2, sd),
                                grid, 2, 7);
    const auto x = simulate_bss(spec, BssModel::constant_sigma(BssVariant::ElementwiseX, 2, sx),
                                grid, 2, 7);
    for (std::size_t m = 0; m < y.size(); ++m)
        CHECK((y[m].values - x[m].values).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("constant-sigma X scales linearly in the volatility level") {
    const auto spec = KernelSpec::identical_diagonal(2, 0.25, 1.0);
    Eigen::MatrixXd s1 = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd s2 = s1;
    s2(0, 0) = 2.0; // exact factor-of-two scaling
    const GridSpec grid(1.0, 16);
    const auto a = simulate_bss(spec, BssModel::constant_sigma(BssVariant::ElementwiseX, 2, s1),
                                grid, 1, 11);
    const auto b = simulate_bss(spec, BssModel::constant_sigma(BssVariant::ElementwiseX, 2, s2),
                                grid, 1, 11);
    CHECK((b[0].values.col(0) - 2.0 * a[0].values.col(0)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((b[0].values.col(1) - a[0].values.col(1)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("riemann scheme matches the exact law at delta = 0") {
    const auto spec = KernelSpec::single(0.0, 1.0);
    const GridSpec grid_r(0.125, 32, 20.0);
    BssModel model = BssModel::unit_sigma(BssVariant::ElementwiseX, 1);
    model.scheme = BssScheme::Riemann;
    const long M = 2000;
    const auto riemann = simulate_bss(spec, model, grid_r, M, 31);

    const GridSpec grid_e(0.125, 32);
    const CoreSimulator exact(component_family(spec), grid_e);
    std::vector<double> a(M), b(M);
    for (long m = 0; m < M; ++m) {
        const Eigen::MatrixXd ri = riemann[static_cast<std::size_t>(m)].increments();
        a[static_cast<std::size_t>(m)] = ri(ri.rows() - 1, 0);
        const Eigen::MatrixXd ei = exact.draw_increments(77, m);
        b[static_cast<std::size_t>(m)] = ei(ei.rows() - 1, 0);
    }
    const auto ks = stats::ks_two_sample(a, b);
    CHECK(ks.p_value > 0.01);
}

TEST_CASE("riemann scheme requires a warmup window") {
    const auto spec = KernelSpec::single(0.0, 1.0);
    BssModel model = BssModel::unit_sigma(BssVariant::ElementwiseX, 1);
    model.scheme = BssScheme::Riemann;
    CHECK_THROWS_AS(simulate_bss(spec, model, GridSpec(1.0, 8), 1, 1), InvalidModel);
}

TEST_CASE("volatility model validation") {
    CHECK_THROWS_AS(VolatilityModel::constant(-1.0), InvalidModel);
    CHECK_THROWS_AS(VolatilityModel::deterministic_sine(1.0, 1.5, 2.0), InvalidModel);
    const auto sm = VolatilityModel::smooth_stochastic(1.0, 0.5, 1.0, 0.5);
    CHECK(sm.is_random());
    CHECK_THROWS_AS(sm.deterministic_value(0.0), InvalidModel);
    // an all-zero volatility grid is a degenerate config
    const auto spec = KernelSpec::single(0.1, 1.0);
    BssModel dead = BssModel::constant_sigma(BssVariant::ElementwiseX, 1,
                                             Eigen::MatrixXd::Zero(1, 1));
    CHECK_THROWS_AS(simulate_bss(spec, dead, GridSpec(1.0, 8), 1, 1), InvalidModel);
}

TEST_CASE("stochastic volatility paths are positive and reproducible") {
    const auto spec = KernelSpec::single(0.1, 1.0);
    BssModel model = BssModel::unit_sigma(BssVariant::ElementwiseX, 1);
    model.volatility[0] = VolatilityModel::smooth_stochastic(1.0, 0.5, 1.0, 0.25);
    const GridSpec grid(0.5, 16, 4.0);
    const auto p1 = volatility_paths(model, 1, grid, 2, 5);
    const auto p2 = volatility_paths(model, 1, grid, 2, 5);
    for (std::size_t m = 0; m < p1.size(); ++m) {
        CHECK(p1[m] == p2[m]);
        CHECK(p1[m].minCoeff() > 0.0);
    }
    // the BSS simulation consumes the same substreams without throwing
    model.scheme = BssScheme::Riemann;
    const auto paths = simulate_bss(spec, model, grid, 2, 5);
    CHECK(paths.size() == 2);
    paths[0].validate();
}

TEST_CASE("drift changes levels but stays smooth") {
    const auto spec = KernelSpec::single(0.1, 1.0);
    BssModel with_drift = BssModel::unit_sigma(BssVariant::ElementwiseX, 1);
    with_drift.drift[0] = DriftModel::smooth_integrated(0.8, 0.5);
    const GridSpec grid(1.0, 64);
    const auto base = simulate_bss(spec, BssModel::unit_sigma(BssVariant::ElementwiseX, 1),
                                   grid, 1, 13);
    const auto drifted = simulate_bss(spec, with_drift, grid, 1, 13);
    const Eigen::MatrixXd u = drifted[0].values - base[0].values;
    CHECK(u.cwiseAbs().maxCoeff() > 0.0);
    // smooth integrated drift: quadratic variation O(scale^2 / n)
    double qv = 0.0;
    for (long i = 1; i < u.rows(); ++i) qv += (u(i, 0) - u(i - 1, 0)) * (u(i, 0) - u(i - 1, 0));
    CHECK(qv < 0.8 * 0.8 / 64.0 * 2.0);
}

TEST_CASE("path bundle level/increment round trip") {
    const auto spec = KernelSpec::single(0.25, 1.0);
    const auto paths = simulate_bss(spec, BssModel::unit_sigma(BssVariant::ElementwiseX, 1),
                                    GridSpec(1.0, 16), 1, 3);
    const PathBundle& b = paths[0];
    const Eigen::MatrixXd inc = b.increments();
    PathBundle asinc = b;
    asinc.kind = PathKind::Increments;
    asinc.values = inc;
    CHECK((asinc.levels() - b.levels()).cwiseAbs().maxCoeff() < 1e-12);
}
