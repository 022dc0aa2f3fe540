#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "nsid/errors.hpp"
#include "nsid/metrics.hpp"

using namespace nsid;
using namespace nsid::metrics;

TEST_CASE("mean squared error") {
    const std::vector<double> y{1.0, 2.0, 3.0};
    const std::vector<double> y_hat{1.5, 2.0, 2.0};
    CHECK(mse(y, y_hat) == doctest::Approx((0.25 + 0.0 + 1.0) / 3.0).epsilon(1e-15));
    CHECK(mse(y, y) == 0.0);

    const std::vector<double> shorter{1.0};
    CHECK_THROWS_AS(mse(y, shorter), ArgumentError);
    const std::vector<double> empty;
    CHECK_THROWS_AS(mse(empty, empty), ArgumentError);
}

TEST_CASE("normalized-RMSE fit percentage") {
    const std::vector<double> y{1.0, 2.0, 3.0, 4.0};
    const std::vector<double> y_hat{1.0, 2.0, 3.0, 5.0};
    // ||e|| = 1, ||y - mean|| = sqrt(5)
    CHECK(fit_percent(y, y_hat) ==
          doctest::Approx(100.0 * (1.0 - 1.0 / std::sqrt(5.0))).epsilon(1e-12));
    CHECK(fit_percent(y, y) == 100.0);

    // a prediction stuck at the mean scores exactly zero
    const std::vector<double> at_mean(4, 2.5);
    CHECK(fit_percent(y, at_mean) == doctest::Approx(0.0).epsilon(1e-12));

    // worse than the mean goes negative
    const std::vector<double> inverted{4.0, 3.0, 2.0, 1.0};
    CHECK(fit_percent(y, inverted) < 0.0);

    const std::vector<double> flat(4, 1.0);
    CHECK_THROWS_AS(fit_percent(flat, y_hat), ArgumentError);
}

TEST_CASE("final prediction error") {
    CHECK(fpe(0.5, 10, 100) == doctest::Approx(0.5 * 1.1 / 0.9).epsilon(1e-15));
    CHECK(fpe(1.0, 0, 50) == 1.0);
    CHECK(fpe(0.0, 5, 50) == 0.0);

    // penalty grows with the parameter count at fixed error
    CHECK(fpe(0.5, 20, 100) > fpe(0.5, 10, 100));
    // and shrinks with more data
    CHECK(fpe(0.5, 10, 1000) < fpe(0.5, 10, 100));

    CHECK_THROWS_AS(fpe(0.5, 100, 100), ArgumentError);
    CHECK_THROWS_AS(fpe(-0.1, 1, 100), ArgumentError);
}

TEST_CASE("Pearson correlation against a direct two-pass oracle") {
    std::mt19937_64 gen(99);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> a(200), b(200);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = dist(gen);
        b[i] = 0.7 * a[i] + 0.3 * dist(gen);
    }

    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= 200.0;
    mb /= 200.0;
    double num = 0.0, da = 0.0, db = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - ma) * (b[i] - mb);
        da += (a[i] - ma) * (a[i] - ma);
        db += (b[i] - mb) * (b[i] - mb);
    }
    CHECK(correlation(a, b) == doctest::Approx(num / std::sqrt(da * db)).epsilon(1e-14));
}

TEST_CASE("correlation limiting cases") {
    const std::vector<double> y{1.0, 2.0, 3.0, 4.0};
    std::vector<double> affine(4);
    for (std::size_t i = 0; i < 4; ++i)
        affine[i] = 3.0 * y[i] - 7.0;
    CHECK(correlation(y, affine) == doctest::Approx(1.0).epsilon(1e-14));
    for (auto& v : affine)
        v = -v;
    CHECK(correlation(y, affine) == doctest::Approx(-1.0).epsilon(1e-14));

    // invariance under affine rescaling of either argument
    std::mt19937_64 gen(5);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> a(50), b(50), a2(50);
    for (std::size_t i = 0; i < 50; ++i) {
        a[i] = dist(gen);
        b[i] = dist(gen);
        a2[i] = 10.0 * a[i] + 2.0;
    }
    CHECK(correlation(a, b) == doctest::Approx(correlation(a2, b)).epsilon(1e-12));

    const std::vector<double> flat(4, 2.0);
    CHECK_THROWS_AS(correlation(flat, y), ArgumentError);
    const std::vector<double> one{1.0};
    CHECK_THROWS_AS(correlation(one, one), ArgumentError);
}

TEST_CASE("residual autocorrelation of an alternating sequence") {
    const std::vector<double> r{1.0, -1.0, 1.0, -1.0};
    const ResidualAutocorr acf = residual_autocorr(r, 2);
    REQUIRE(acf.rho.size() == 3);
    CHECK(acf.rho[0] == 1.0);
    CHECK(acf.rho[1] == doctest::Approx(-0.75).epsilon(1e-15));
    CHECK(acf.rho[2] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(acf.confidence == doctest::Approx(1.96 / 2.0).epsilon(1e-15));
}

TEST_CASE("residual autocorrelation removes the mean") {
    // adding an offset must not change the normalized coefficients
    std::mt19937_64 gen(17);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> r(300), shifted(300);
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = dist(gen);
        shifted[i] = r[i] + 42.0;
    }
    const auto a = residual_autocorr(r, 20);
    const auto b = residual_autocorr(shifted, 20);
    for (std::size_t lag = 0; lag <= 20; ++lag)
        CHECK(a.rho[lag] == doctest::Approx(b.rho[lag]).epsilon(1e-9));
}

TEST_CASE("white residuals stay inside the confidence band") {
    std::mt19937_64 gen(23);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> r(5000);
    for (auto& v : r)
        v = dist(gen);
    const auto acf = residual_autocorr(r, 50);
    int outside = 0;
    for (std::size_t lag = 1; lag <= 50; ++lag)
        if (std::abs(acf.rho[lag]) > acf.confidence)
            ++outside;
    CHECK(outside <= 6); // 95% band: expect ~2.5 of 50 outside

    // a strong periodic component is flagged far outside the band
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] += 2.0 * std::sin(2.0 * M_PI * static_cast<double>(i) / 10.0);
    const auto periodic = residual_autocorr(r, 20);
    CHECK(std::abs(periodic.rho[10]) > 5.0 * periodic.confidence);
}

TEST_CASE("residual autocorrelation input validation") {
    const std::vector<double> flat(10, 1.0);
    CHECK_THROWS_AS(residual_autocorr(flat, 3), ArgumentError);
    const std::vector<double> r{1.0, 2.0};
    CHECK_THROWS_AS(residual_autocorr(r, 2), ArgumentError);
    const std::vector<double> empty;
    CHECK_THROWS_AS(residual_autocorr(empty, 0), ArgumentError);
}
