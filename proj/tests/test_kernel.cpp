#include <doctest.h>

#include <cmath>
#include <vector>

#include "bsscov/errors.hpp"
#include "bsscov/gaussian_family.hpp"
#include "bsscov/kernel.hpp"
#include "bsscov/stats.hpp"

using namespace bsscov;

namespace {
KernelSpec mixed_p2() {
    return KernelSpec(2, {GammaKernel(0.25, 1.0), GammaKernel(-0.2, 2.0),
                          GammaKernel(0.1, 0.5), GammaKernel(0.3, 1.5)});
}
} // namespace

TEST_CASE("gamma kernel evaluation") {
    const GammaKernel k(0.25, 1.0);
    CHECK(gamma_eval(k, -1.0) == 0.0);
    CHECK(gamma_eval(k, 0.0) == 0.0);
    CHECK(gamma_eval(GammaKernel(0.0, 1.0), 1.0) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    // 0.5^0.25 e^-1, high-precision reference
    CHECK(gamma_eval(GammaKernel(0.25, 2.0), 0.5) ==
          doctest::Approx(0.309348503326605612916).epsilon(1e-14));
    CHECK(gamma_eval(GammaKernel(-0.3, 1.0), 1e-8) > 0.0);

    CHECK_THROWS_AS(GammaKernel(-0.5, 1.0), DomainError);
    CHECK_THROWS_AS(GammaKernel(0.25, 0.0), DomainError);
}

TEST_CASE("kernel spec invariants") {
    CHECK_THROWS_AS(KernelSpec(2, {GammaKernel(0.1, 1.0)}), DimensionMismatch);
    const auto diag = KernelSpec::identical_diagonal(2, 0.25, 1.0);
    CHECK(diag.is_diagonal());
    CHECK(!diag.at(1, 2).has_value());
    CHECK(diag.at(2, 2)->delta == 0.25);
    CHECK(!mixed_p2().is_diagonal());
}

TEST_CASE("cross moment: analytic anchors") {
    const GammaKernel e1(0.0, 1.0);
    CHECK(cross_moment(e1, e1, 0.0) == doctest::Approx(0.5).epsilon(1e-11));
    CHECK(cross_moment(e1, e1, 1.0) ==
          doctest::Approx(std::exp(-1.0) / 2.0).epsilon(1e-11));
    // frozen quadrature reference, delta_i = delta_j = 0.25, lambda = 1, h = 0.1
    const GammaKernel g(0.25, 1.0);
    CHECK(cross_moment(g, g, 0.1) ==
          doctest::Approx(0.302625746348831106).epsilon(1e-10));
    // h = 0 symmetry in the argument roles
    const GammaKernel a(0.3, 1.5), b(-0.2, 0.7);
    CHECK(cross_moment(a, b, 0.0) == doctest::Approx(cross_moment(b, a, 0.0)).epsilon(1e-10));
}

TEST_CASE("cross moment series equals quadrature") {
    for (double di : {-0.25, 0.1, 0.25, 0.4}) {
        for (double dj : {-0.2, 0.15, 0.3}) {
            const GammaKernel ki(di, 1.3), kj(dj, 0.8);
            for (double h : {0.0, 0.01, 0.2, 1.0}) {
                const double q = cross_moment(ki, kj, h);
                const double s = cross_moment_series(ki, kj, h);
                CHECK(s == doctest::Approx(q).epsilon(1e-9));
            }
        }
    }
    // exponential kernels take the closed form
    CHECK(cross_moment_series(GammaKernel(0.0, 2.0), GammaKernel(0.0, 1.0), 0.5) ==
          doctest::Approx(std::exp(-1.0) / 3.0).epsilon(1e-13));
    // integer growth exponent: genuine Gamma pole, routed to quadrature by caller
    CHECK_THROWS_AS(
        cross_moment_series(GammaKernel(0.25, 1.0), GammaKernel(-0.25, 1.0), 0.1),
        SeriesDiverged);
}

TEST_CASE("core autocovariance") {
    const auto single = KernelSpec::single(0.0, 1.0);
    CHECK(core_autocovariance(single, 1, 1, 0.0) == doctest::Approx(0.5).epsilon(1e-10));
    const auto two = KernelSpec::identical_full(2, 0.0, 1.0);
    CHECK(core_autocovariance(two, 1, 1, 0.0) == doctest::Approx(1.0).epsilon(1e-10));
    // frozen mixed-kernel reference at h = 0.3 (tighter-tolerance quadrature oracle)
    CHECK(core_autocovariance(mixed_p2(), 1, 2, 0.3) ==
          doctest::Approx(0.546125761388496228).epsilon(1e-8));
    // negative lags through joint stationarity: C_12(-h) = C_21(h)
    CHECK(core_autocovariance(mixed_p2(), 1, 2, -0.3) ==
          doctest::Approx(core_autocovariance(mixed_p2(), 2, 1, 0.3)).epsilon(1e-10));
}

TEST_CASE("increment covariance: quadrature vs series vs frozen oracle") {
    const GammaKernel a(0.25, 1.0), b(0.1, 0.5);
    CHECK(increment_cov_quad(a, b, 100, 2) ==
          doctest::Approx(1.21971350728760259e-4).epsilon(1e-8));
    CHECK(increment_cov_quad(a, a, 100, 0) ==
          doctest::Approx(8.11365337283983700e-4).epsilon(1e-8));
    for (long k : {0L, 1L, 2L, 5L}) {
        const double q = increment_cov_quad(a, b, 200, k);
        const double s = increment_cov_series(a, b, 200, k);
        CHECK(s == doctest::Approx(q).epsilon(1e-8));
    }
}

TEST_CASE("increment correlation basics") {
    const auto spec = KernelSpec::single(0.25, 1.0);
    CHECK(increment_correlation(spec, 100, 1, 1, 0) == 1.0);
    // Brownian-like case: correlations vanish
    const auto flat = KernelSpec::single(0.0, 1.0);
    CHECK(std::abs(increment_correlation(flat, 10000, 1, 1, 1)) <= 5e-3);
}

TEST_CASE("limiting correlation formula") {
    CHECK(limiting_correlation(0.0, 1) == 0.0);
    CHECK(limiting_correlation(0.0, 7) == 0.0);
    CHECK(limiting_correlation(0.25, 1) ==
          doctest::Approx(0.414213562373095049).epsilon(1e-14));
    CHECK(limiting_correlation(0.25, 2) ==
          doctest::Approx(0.269649086607125843).epsilon(1e-14));
    CHECK(limiting_correlation(-0.25, 1) ==
          doctest::Approx(-0.292893218813452476).epsilon(1e-14));
    CHECK_THROWS_AS(limiting_correlation(0.6, 1), DomainError);
    CHECK_THROWS_AS(limiting_correlation(-0.5, 1), DomainError);
    CHECK_THROWS_AS(limiting_correlation(0.25, 0), OutOfRange);

    // tail decay like k^(2 delta - 1): log-log slope -0.5 +- 0.05 at delta = 0.25
    std::vector<double> lx, ly;
    for (long k = 100; k <= 1000; k += 60) {
        lx.push_back(std::log(static_cast<double>(k)));
        ly.push_back(std::log(std::abs(limiting_correlation(0.25, k))));
    }
    const double slope = stats::ols_slope(lx, ly);
    CHECK(slope == doctest::Approx(-0.5).epsilon(0.1));
}

TEST_CASE("finite-n correlation converges to the limit") {
    const auto spec = KernelSpec::single(0.25, 1.0);
    const double target = limiting_correlation(0.25, 1);
    double prev_err = 1e9;
    for (long n : {1L << 8, 1L << 10, 1L << 12, 1L << 13}) {
        const double err = std::abs(increment_correlation(spec, n, 1, 1, 1) - target);
        CHECK(err < prev_err);
        prev_err = err;
    }
    CHECK(prev_err < 1e-2);
}

TEST_CASE("series numerator agrees with the quadrature numerator") {
    for (double d : {-0.25, 0.1, 0.25}) {
        const auto spec = KernelSpec::single(d, 1.0);
        const auto& cell = *spec.at(1, 1);
        for (long k : {1L, 2L, 5L}) {
            const double s = series_numerator(spec, 100, 1, 1, k);
            const double q = increment_cov_quad(cell, cell, 100, k);
            CHECK(s == doctest::Approx(q).epsilon(1e-8));
        }
    }
    // delta = 0 runs through the exponential closed form
    const auto flat = KernelSpec::single(0.0, 0.7);
    CHECK(series_numerator(flat, 100, 1, 1, 1) ==
          doctest::Approx(increment_cov_quad(*flat.at(1, 1), *flat.at(1, 1), 100, 1))
              .epsilon(1e-8));
}

TEST_CASE("correlation table bounds and diagonal") {
    const auto table = build_correlation_table(mixed_p2(), 256, CorrRegime::CaseI, 50);
    for (int i = 1; i <= 2; ++i) {
        CHECK(table.at(i, i, 0) == 1.0);
        for (int j = 1; j <= 2; ++j)
            for (long k = 0; k <= 50; ++k)
                CHECK(std::abs(table.at(i, j, k)) <= 1.0 + 1e-9);
    }
}

TEST_CASE("squared-correlation summability diagnostic") {
    CHECK_THROWS_AS(
        check_assumption_squared_correlations(
            build_correlation_table(KernelSpec::single(0.25, 1.0), 64, CorrRegime::CaseI, 9),
            5),
        InsufficientLags);

    // delta = 0: negligible mass, passes through the tiny-tail route
    auto t0 = build_correlation_table(KernelSpec::single(0.0, 1.0), 4096, CorrRegime::CaseI, 100);
    auto d0 = check_assumption_squared_correlations(t0, 100);
    CHECK(d0.partial_sum_full < 1e-4);
    CHECK(d0.strict_pass);

    // the fit window needs k << n, else the exponential attenuation at
    // h = k/n masquerades as extra decay
    const long n_fit = 1L << 16;

    // delta = -0.25: summand exponent 2(2 delta - 1) = -3
    auto tm = build_correlation_table(KernelSpec::single(-0.25, 1.0), n_fit, CorrRegime::CaseI, 400);
    auto dm = check_assumption_squared_correlations(tm, 400);
    CHECK(dm.strict_pass);
    CHECK(dm.summand_exponent == doctest::Approx(-3.0).epsilon(0.15));

    // delta = 0.25: harmonic knife edge (limit exponent exactly -1, sums
    // log-divergent; the finite-n additive bias tilts the fit slightly)
    auto tb = build_correlation_table(KernelSpec::single(0.25, 1.0), n_fit, CorrRegime::CaseI, 400);
    auto db = check_assumption_squared_correlations(tb, 400);
    CHECK(db.summand_exponent == doctest::Approx(-1.0).epsilon(0.15));
    // the closed-form reference bound stays finite regardless
    CHECK(db.paper_bound < 1.0);

    // delta = 0.45: slow tail, exponent near 2(2 delta - 1) = -0.2
    auto ts = build_correlation_table(KernelSpec::single(0.45, 1.0), n_fit, CorrRegime::CaseI, 400);
    auto ds = check_assumption_squared_correlations(ts, 400);
    CHECK(!ds.strict_pass);
    CHECK(ds.summand_exponent == doctest::Approx(-0.2).epsilon(0.5));
}

TEST_CASE("increment-energy decay diagnostic") {
    // full ray: normalization pins pi to 1
    const GammaKernel neg(-0.25, 1.0);
    CHECK(pi_n_tail_mass(neg, 1000, 0.0) == doctest::Approx(1.0).epsilon(1e-7));

    const auto dneg = check_assumption_pi_decay(neg, {100, 1000, 10000}, {0.5});
    CHECK(dneg.strict_pass); // measured lambda around -1.7
    CHECK(dneg.fitted_lambda < -1.0);

    // positive delta: decay exponent 2 delta - 1 > -1, strict check fails
    const GammaKernel pos(0.25, 1.0);
    const auto dpos = check_assumption_pi_decay(pos, {100, 1000, 10000}, {0.5});
    CHECK(!dpos.strict_pass);
    CHECK(dpos.fitted_lambda > -1.0);

    CHECK_THROWS_AS(check_assumption_pi_decay(neg, {100, 1000}, {1.5}), DomainError);
}
