#include "support.hpp"

#include "pitlab/eval.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace pitlab;
using testing::hp;
using testing::hp_dist;

TEST_SUITE("eval") {
    TEST_CASE("truncation against direct tail sums") {
        const auto e = make_exponential();
        CHECK(choose_truncation(e, 1e-300, 0.5) == 0);

        const std::size_t N = choose_truncation(e, 10.0, 1e-30);
        long double term = 1.0L, tail = 0.0L;
        for (std::size_t n = 1; n <= N + 400; ++n) {
            term *= 10.0L / static_cast<long double>(n);
            if (n > N) tail += term;
        }
        CHECK(tail <= 1e-30L);
        CHECK(N < 80);

        // product moduli: tail of c_n 5^n with c_{n+1} = c_n b_n
        const auto pm = make_product_moduli(0.5, 0.0);
        const std::size_t M = choose_truncation(pm, 5.0, 1e-20);
        long double c = 1.0L, b = 1.0L, rn = 1.0L, tail5 = 0.0L;
        for (std::size_t n = 0; n <= M + 400; ++n) {
            if (n > M) tail5 += c * rn;
            c *= b;
            b *= (static_cast<long double>(n) + 0.5L) / static_cast<long double>(n + 1);
            rn *= 5.0L;
        }
        CHECK(tail5 <= 1e-20L);
    }

    TEST_CASE("working precision formula") {
        CHECK(choose_precision(0.0, std::ldexp(1.0, -53), 2) == 86);
        CHECK(choose_precision(40.0, 1e-10, 128) == 131);
        CHECK(choose_precision(20.0, 1e-20, 96) == 135);
    }

    TEST_CASE("majorant sum") {
        CHECK(log_majorant_sum(make_exponential(), 10.0) == doctest::Approx(10.0));
        CHECK(log_majorant_sum(make_quadratic_phase(AlphaSpec::parse("sqrt2")), 3.0) == doctest::Approx(3.0));
    }

    TEST_CASE("values of f") {
        const auto e = make_exponential();
        const EvalResult one = eval_f(e, std::complex<double>(1.0, 0.0), 1e-20);
        CHECK(hp_dist(one.value, hp("2.718281828459045235360287471352662497757", "0")) <= one.total_bound());
        CHECK(one.total_bound() <= 1e-20);

        const auto m = make_rational_phase(1, 2);
        const EvalResult r = eval_f(m, std::complex<double>(3.0, 0.0), 1e-30);
        CHECK(hp_dist(r.value, hp("0.04978706836786394297934241565006177663169959", "0")) <= r.total_bound() + 1e-40);

        // quadratic alpha = sqrt2 at z = 5, reference from an independent 40-digit summation
        const auto f = make_quadratic_phase(AlphaSpec::parse("sqrt2"));
        const EvalResult v = eval_f(f, std::complex<double>(5.0, 0.0), 1e-30);
        CHECK(hp_dist(v.value, hp("-49.55289457563797580351561446441662645577", "-23.72051740985133004493007269155563433535")) <=
              v.total_bound() + 1e-38);

        // same sum at 4x the precision and twice the terms
        EvalOptions big;
        big.precision = 4 * v.precision_bits;
        big.terms = 2 * v.terms_used;
        const EvalResult w = eval_f(f, HPComplex(std::complex<double>(5.0, 0.0), 4 * v.precision_bits), 1e-30, big);
        CHECK(hp_dist(v.value, w.value) <= v.total_bound() + w.total_bound());
    }

    TEST_CASE("values of f'") {
        const auto e = make_exponential();
        CHECK(hp_dist(eval_fprime(e, std::complex<double>(0.0, 0.0), 1e-30).value, {1.0, 0.0}) < 1e-30);

        const auto f = make_quadratic_phase(AlphaSpec::parse("sqrt2"));
        const EvalResult d0 = eval_fprime(f, std::complex<double>(0.0, 0.0), 1e-30);
        CHECK(hp_dist(d0.value, f.coefficient(1)) < 1e-30);

        // f'(z) = q f(z e^{i beta}) with beta = 4 pi alpha, at z = 2 + i
        const std::complex<double> z(2.0, 1.0);
        const EvalResult lhs = eval_fprime(f, z, 1e-30);
        const double beta = 4.0 * M_PI * std::sqrt(2.0);
        const std::complex<double> q = std::polar(1.0, 2.0 * M_PI * std::sqrt(2.0));
        const std::complex<double> rhs = q * eval_f(f, z * std::polar(1.0, beta), 1e-30).approx();
        CHECK(std::abs(lhs.approx() - rhs) < 1e-13);
    }

    TEST_CASE("disc series G") {
        CHECK(hp_dist(eval_G(make_exponential(), {0.0, 0.0}, 1e-30).value, {0.0, 0.0}) == 0.0);
        const EvalResult g1 = eval_G(make_exponential(), {0.5, 0.0}, 1e-30);
        CHECK(hp_dist(g1.value, {1.0, 0.0}) <= g1.total_bound() + 1e-30);
        const EvalResult g2 = eval_G(make_rational_phase(1, 2), {1.0 / 3.0, 0.0}, 1e-30);
        CHECK(hp_dist(g2.value, {0.25, 0.0}) <= g2.total_bound() + 1e-16);
        CHECK_THROWS_AS(eval_G(make_exponential(), {0.9995, 0.0}, 1e-30), std::domain_error);
    }

    TEST_CASE("grid values") {
        const auto e = make_exponential();
        GridSpec g;
        g.r_values = {10.0};
        g.n_theta = 8;
        const GridTable t = eval_grid(e, g);
        CHECK(t.at(0, 0).log_abs_f == doctest::Approx(-10.0));  // theta = -pi
        CHECK(t.at(0, 4).log_abs_f == doctest::Approx(10.0));   // theta = 0

        const auto f = make_quadratic_phase(AlphaSpec::parse("sqrt2"));
        GridSpec h;
        h.r_values = {20.0};
        h.n_theta = 512;
        const GridTable s = eval_grid(f, h);
        double top = -INFINITY;
        for (const GridPoint& p : s.points) {
            if (p.flag) continue;
            CHECK(p.log_abs_f <= 20.0 + 1e-12);
            top = std::max(top, p.log_abs_f);
        }
        CHECK(top >= 20.0 - 0.25 * std::log(20.0) - 1.0);
    }

    TEST_CASE("parallel grid matches the serial reference") {
        const auto f = make_quadratic_phase(AlphaSpec::parse("sqrt2"));
        GridSpec g;
        g.r_values = {1.0, 5.0, 12.0, 25.0};
        g.n_theta = 96;
        CHECK(grid_to_csv(eval_grid(f, g)) == grid_to_csv(eval_grid_serial(f, g)));

        GridSpec bad;
        bad.r_values = {2.0, 1.0};
        CHECK_THROWS_AS(eval_grid(f, bad), std::invalid_argument);
    }
}
