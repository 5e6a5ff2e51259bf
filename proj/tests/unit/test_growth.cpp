#include "pitlab/growth.hpp"

#include <doctest.h>

#include <cmath>

using namespace pitlab;

TEST_SUITE("growth") {
    TEST_CASE("maximum modulus") {
        const MaxModulus e = max_modulus(make_exponential(), 10.0);
        CHECK(e.log_M == doctest::Approx(10.0).epsilon(1e-12));
        CHECK(std::abs(e.theta) < 1e-4);

        const MaxModulus m = max_modulus(make_rational_phase(1, 2), 7.0);
        CHECK(m.log_M == doctest::Approx(7.0).epsilon(1e-12));
        CHECK(std::abs(std::abs(m.theta) - M_PI) < 1e-4);

        // unit phases: log M(r) <= r, and not far below it
        const MaxModulus q = max_modulus(make_quadratic_phase(AlphaSpec::parse("sqrt2")), 20.0);
        CHECK(q.log_M <= 20.0 + 1e-12);
        CHECK(q.log_M >= 20.0 - 0.25 * std::log(20.0) - 1.0);
    }

    TEST_CASE("indicator of exponentials") {
        const auto theta = uniform_angles(128);
        const IndicatorProfile p = indicator_estimate(make_exponential(), theta, 10.0, 20.0, 1.0);
        for (std::size_t j = 0; j < theta.size(); ++j) {
            if (p.indeterminate[j]) continue;
            CHECK(std::abs(p.h_est[j] - std::cos(theta[j])) < 0.01);
        }
        const IndicatorProfile n = indicator_estimate(make_rational_phase(1, 2), theta, 10.0, 20.0, 1.0);
        for (std::size_t j = 0; j < theta.size(); ++j) {
            if (n.indeterminate[j]) continue;
            CHECK(std::abs(n.h_est[j] + std::cos(theta[j])) < 0.01);
        }
        CHECK_THROWS_AS(indicator_estimate(make_exponential(), theta, 10.0, 15.0, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(indicator_estimate(make_exponential(), uniform_angles(32), 10.0, 20.0, 1.0),
                        std::invalid_argument);
    }

    TEST_CASE("indicator: parallel and serial agree") {
        const auto f = make_quadratic_phase(AlphaSpec::parse("golden"));
        const auto theta = uniform_angles(64);
        const IndicatorProfile a = indicator_estimate(f, theta, 8.0, 16.0, 1.0);
        const IndicatorProfile b = indicator_estimate_serial(f, theta, 8.0, 16.0, 1.0);
        for (std::size_t j = 0; j < theta.size(); ++j) {
            CHECK(a.indeterminate[j] == b.indeterminate[j]);
            CHECK(a.n_samples[j] == b.n_samples[j]);
            if (!a.indeterminate[j]) CHECK(a.h_est[j] == b.h_est[j]);
        }
    }

    TEST_CASE("regular growth and pits for the exponential") {
        GridSpec grid;
        grid.r_values = {10.0, 15.0, 20.0};
        grid.n_theta = 256;
        const CrgReport crg = crg_deviation(make_exponential(), grid, 0.05, 1.0, ReferenceIndicator::cosine());
        for (double f : crg.bad_fraction) CHECK(f == 0.0);

        const PitReport pits = pit_detect(make_exponential(), grid, 0.1, 1.0, 1.0, ReferenceIndicator::cosine());
        CHECK(pits.pits.empty());
        CHECK(pits.covering_sum == 0.0);
    }

    TEST_CASE("regular growth for the quadratic phase") {
        GridSpec grid;
        grid.r_values = {10.0, 20.0, 40.0};
        grid.n_theta = 512;
        const CrgReport crg =
            crg_deviation(make_quadratic_phase(AlphaSpec::parse("sqrt2")), grid, 0.2, 1.0, ReferenceIndicator::constant(1.0));
        CHECK(crg.bad_fraction[0] > crg.bad_fraction[1]);
        CHECK(crg.bad_fraction[1] > crg.bad_fraction[2]);
        CHECK(crg.bad_fraction[2] <= 0.1);
    }

    TEST_CASE("pits sit on zeros") {
        // zeros of (1+i)/2 e^z + (1-i)/2 e^{-z} at i (pi/4 + pi k); h = |cos|
        GridSpec grid;
        for (int i = 0; i <= 20; ++i) grid.r_values.push_back(8.0 + 0.2 * i);
        grid.n_theta = 512;
        const PitReport rep = pit_detect(make_rational_phase(1, 4), grid, 0.3, 1.0, 1.0, ReferenceIndicator::constant(0.0));
        CHECK(rep.count_in(8.0, 12.0) == 3);  // |pi/4 + pi k| in [8, 12] for k = -4, -3, 3
        for (const Pit& p : rep.pits) {
            const double k = std::round((p.center.imag() - M_PI / 4.0) / M_PI);
            const std::complex<double> zero(0.0, M_PI / 4.0 + M_PI * k);
            CHECK(std::abs(p.center - zero) < 0.1);  // half the radial grid step
            CHECK(p.radius > 0.0);
        }
    }

    TEST_CASE("ratio of maximum modulus to quadratic mean") {
        // e^10 / sqrt(I_0(20))
        const RatioSeries e = levy_ratio(make_exponential(), {10.0});
        CHECK(e.ratio[0] == doctest::Approx(3.3374090949186494).epsilon(1e-12));

        const RatioSeries t = levy_ratio(make_rational_phase(1, 3), {10.0, 20.0, 40.0});
        CHECK(t.ratio[0] < t.ratio[1]);
        CHECK(t.ratio[1] < t.ratio[2]);
        for (double v : t.ratio) CHECK(v >= 1.0);
    }

    TEST_CASE("quadrature form of the second moment") {
        CHECK(parseval_quadrature_check(make_exponential(), 5.0, 1024).relative_discrepancy <= 1e-10);
        CHECK(parseval_quadrature_check(make_quadratic_phase(AlphaSpec::parse("sqrt2")), 10.0, 2048)
                  .relative_discrepancy <= 1e-8);
        CHECK_THROWS_AS(parseval_quadrature_check(make_exponential(), 5.0, 100), std::invalid_argument);
    }

    TEST_CASE("product moduli fit") {
        const ModulusFit fit = product_modulus_fit(0.5, 2000);
        CHECK(fit.rho == doctest::Approx(2.0));
        CHECK(fit.slope >= 0.475);
        CHECK(fit.slope <= 0.525);
        CHECK(fit.sigma > 0.0);
        CHECK(fit.sigma == doctest::Approx(std::exp(fit.c * fit.rho) / (std::exp(1.0) * fit.rho)));
    }

    TEST_CASE("rescaled frames") {
        const std::vector<double> radii{0.25, 0.5, 1.0};
        const auto theta = uniform_angles(64);
        const AzarinFrame a = azarin_rescale(make_exponential(), 20.0, radii, theta, 1.0, ReferenceIndicator::cosine());
        CHECK(a.u.size() == radii.size() * theta.size());
        CHECK(a.sup_deviation < 1e-9);
    }

    TEST_CASE("reference indicators") {
        CHECK(ReferenceIndicator::parse("cos")(0.0) == 1.0);
        CHECK(ReferenceIndicator::parse("-cos")(0.0) == -1.0);
        CHECK(ReferenceIndicator::parse("0.25")(1.0) == 0.25);
        CHECK_THROWS_AS(ReferenceIndicator::parse("sin"), std::invalid_argument);
    }
}
