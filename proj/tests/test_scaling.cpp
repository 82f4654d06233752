#include <doctest.h>

#include <cmath>
#include <vector>

#include "bsscov/errors.hpp"
#include "bsscov/scaling.hpp"
#include "bsscov/simulate.hpp"
#include "bsscov/stats.hpp"

using namespace bsscov;

TEST_CASE("tau case I analytic anchor and monotonicity") {
    const auto spec = KernelSpec::single(0.0, 1.0);
    const auto t1 = tau_case1(spec, 1);
    CHECK(t1.at(1) == doctest::Approx(std::sqrt(1.0 - std::exp(-1.0))).epsilon(1e-10));
    double prev = 1e9;
    for (long n : {1L, 2L, 4L, 16L, 64L, 256L}) {
        const double v = tau_case1(spec, n).at(1);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("tau case I scaling exponent -(delta + 1/2)") {
    const auto spec = KernelSpec::single(0.25, 1.0);
    std::vector<double> lx, ly;
    for (int j = 8; j <= 14; ++j) {
        const long n = 1L << j;
        lx.push_back(std::log(static_cast<double>(n)));
        ly.push_back(std::log(tau_case1(spec, n).at(1)));
    }
    CHECK(stats::ols_slope(lx, ly) == doctest::Approx(-0.75).epsilon(0.03));
}

TEST_CASE("tau partition") {
    const auto spec = KernelSpec::identical_diagonal(2, 0.25, 1.0);
    const auto base = tau_case1(spec, 128);
    // singleton blocks reduce to case I
    const auto singles = tau_partition(spec, 128, {{1}, {2}});
    CHECK(singles.at(1) == doctest::Approx(base.at(1)).epsilon(1e-12));
    CHECK(singles.at(2) == doctest::Approx(base.at(2)).epsilon(1e-12));
    // one block of two independent identical components: sqrt(2) factor
    const auto joint = tau_partition(spec, 128, {{1, 2}});
    CHECK(joint.at(1) == doctest::Approx(std::sqrt(2.0) * base.at(1)).epsilon(1e-10));
    // dominating order: block tau >= componentwise tau
    for (int i = 1; i <= 2; ++i) CHECK(joint.at(1) / base.at(i) >= 1.0 - 1e-9);

    CHECK_THROWS_AS(tau_partition(spec, 128, {{1}}), InvalidPartition);
    CHECK_THROWS_AS(tau_partition(spec, 128, {{1, 2}, {2}}), InvalidPartition);
    CHECK_THROWS_AS(tau_partition(spec, 128, {{1, 3}}), InvalidPartition);
}

TEST_CASE("tau bar modes") {
    const auto single = KernelSpec::single(0.25, 1.0);
    const auto c1 = tau_case1(single, 64).at(1);
    CHECK(tau_bar(single, 64, TauBarMode::SumDiagonal).at(1) ==
          doctest::Approx(c1).epsilon(1e-12));
    CHECK(tau_bar(single, 64, TauBarMode::MaxOverR).at(1) ==
          doctest::Approx(c1).epsilon(1e-12));

    const auto two = KernelSpec::identical_full(2, 0.25, 1.0);
    const auto sum = tau_bar(two, 64, TauBarMode::SumDiagonal);
    const auto mx = tau_bar(two, 64, TauBarMode::MaxOverR);
    const double cell = std::sqrt(increment_cov(*two.at(1, 1), *two.at(1, 1), 64, 0));
    CHECK(sum.at(1) == doctest::Approx(std::sqrt(2.0) * cell).epsilon(1e-10));
    CHECK(mx.at(1) == doctest::Approx(cell).epsilon(1e-10));
    CHECK(mx.at(1) <= sum.at(1));
    // dominating order against case I
    const auto base = tau_case1(two, 64);
    for (int k = 1; k <= 2; ++k) CHECK(sum.at(k) / base.at(k) >= 1.0 - 1e-9);
}

TEST_CASE("tau tilde theoretical reduces to tau bar at unit sigma") {
    const auto spec = KernelSpec::identical_full(2, 0.1, 1.0);
    const auto tilde = tau_tilde_theoretical(spec, Eigen::MatrixXd::Ones(2, 2), 64);
    const auto bar = tau_bar(spec, 64, TauBarMode::SumDiagonal);
    for (int k = 1; k <= 2; ++k) CHECK(tilde.at(k) == doctest::Approx(bar.at(k)).epsilon(1e-10));
    // homogeneity: scaling sigma by c multiplies tau by c
    const auto scaled = tau_tilde_theoretical(spec, 4.0 * Eigen::MatrixXd::Ones(2, 2), 64);
    for (int k = 1; k <= 2; ++k)
        CHECK(scaled.at(k) == doctest::Approx(2.0 * tilde.at(k)).epsilon(1e-12));
}

TEST_CASE("tau tilde empirical matches theory on simulated data") {
    const auto spec = KernelSpec::single(0.25, 1.0);
    const GridSpec grid(1.0, 200);
    const auto model = BssModel::unit_sigma(BssVariant::ElementwiseX, 1);
    const auto paths = simulate_bss(spec, model, grid, 200, 17);
    const double theo = tau_tilde_theoretical(spec, Eigen::MatrixXd::Ones(1, 1), 200).at(1);
    std::vector<double> est;
    for (const auto& p : paths) est.push_back(tau_tilde_empirical(p).at(1));
    const double mean = stats::mean(est);
    CHECK(std::abs(mean - theo) <= 3.0 * stats::standard_error_of_mean(est));
    // invariance to level shifts: built from increments only
    PathBundle shifted = paths[0];
    shifted.values.array() += 40.0;
    CHECK(tau_tilde_empirical(shifted).at(1) ==
          doctest::Approx(tau_tilde_empirical(paths[0]).at(1)).epsilon(1e-12));
}

TEST_CASE("empirical tau needs enough increments") {
    const auto spec = KernelSpec::single(0.25, 1.0);
    const auto paths = simulate_bss(spec, BssModel::unit_sigma(BssVariant::ElementwiseX, 1),
                                    GridSpec(1.0, 16), 1, 1);
    CHECK_THROWS_AS(tau_tilde_empirical(paths[0]), InsufficientData);
}
