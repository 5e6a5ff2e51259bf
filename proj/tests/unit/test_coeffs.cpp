#include "support.hpp"

#include "pitlab/coeffs.hpp"

#include <doctest.h>

#include <cmath>

using namespace pitlab;
using testing::hp;
using testing::hp_dist;

TEST_SUITE("coeffs") {
    TEST_CASE("quadratic phase: first coefficients") {
        const auto f = make_quadratic_phase(AlphaSpec::parse("sqrt2"));
        CHECK(hp_dist(f.coefficient(0), {1.0, 0.0}) == 0.0);
        CHECK(f.rho() == 1.0);
        CHECK_FALSE(f.period().has_value());

        // alpha = 1/2 as a quadratic phase: e^{9 pi i} / 3! = -1/6
        const auto half = make_quadratic_phase(AlphaSpec::parse("0.5"));
        CHECK(hp_dist(half.coefficient(3), hp("-0.16666666666666666666666666666666666666666666666667", "0")) < 1e-49);
    }

    TEST_CASE("quadratic phase: reduction of 25 sqrt2 modulo 1") {
        // frac(25 sqrt2) = 0.35533905932737622004221810524245196424...
        const auto f = make_quadratic_phase(AlphaSpec::parse("sqrt2"));
        HPComplex expected(320);
        unit_from_turns(expected, Real::from_string("0.3553390593273762200422181052424519642418", 320));
        Real inv120 = Real::from_string("120", 320);
        mpfr_ui_div(inv120.get(), 1, inv120.get(), MPFR_RNDN);
        mul_real(expected, expected, inv120);
        CHECK(hp_dist(f.coefficient(5), expected) < 1e-40);

        // the phase at n = 1000 still carries the full precision of alpha
        const auto g = make_quadratic_phase(AlphaSpec::parse("sqrt2"), 256);
        const auto h = make_quadratic_phase(AlphaSpec::parse("sqrt2"), 512);
        const HPComplex a = g.coefficient(1000);
        const HPComplex b = h.coefficient(1000);
        HPComplex d(640);
        sub(d, a, b);
        CHECK(d.log_abs() - b.log_abs() < -240.0 * std::log(2.0));
    }

    TEST_CASE("rational phase: periods and values") {
        const auto m = make_rational_phase(1, 2);
        CHECK(m.period() == 2);
        CHECK(hp_dist(m.coefficient(7), hp("-0.000198412698412698412698412698412698412698412698412698", "0")) < 1e-53);

        const auto q4 = make_rational_phase(1, 4);
        CHECK(q4.period() == 2);
        CHECK(hp_dist(q4.coefficient(1), {0.0, 1.0}) == 0.0);
        CHECK(hp_dist(q4.coefficient(2), {0.5, 0.0}) == 0.0);
        CHECK(hp_dist(q4.coefficient(3), {0.0, 1.0 / 6.0}) < 1e-17);

        const auto one = make_rational_phase(1, 1);
        CHECK(one.period() == 1);
        CHECK(hp_dist(one.coefficient(4), {1.0 / 24.0, 0.0}) < 1e-17);

        CHECK(quadratic_residue_period(1, 24) == 12);
        CHECK(quadratic_residue_period(5, 24) == 12);
        CHECK(quadratic_residue_period(1, 3) == 3);
    }

    TEST_CASE("psi phase") {
        const auto zero = make_psi_phase({0.0}, {1.0});
        CHECK(hp_dist(zero.coefficient(3), {1.0 / 6.0, 0.0}) < 1e-17);

        const auto one = make_psi_phase({1.0}, {1.0});
        CHECK(hp_dist(one.coefficient(0), {std::cos(1.0), std::sin(1.0)}) < 1e-15);
        CHECK(hp_dist(one.coefficient(1), {std::cos(std::exp(-1.0)), std::sin(std::exp(-1.0))}) < 1e-15);

        // a_2 = e^{i (2 e^-2 - e^-4)} / 2
        const auto two = make_psi_phase({2.0, -1.0}, {1.0, 2.0});
        CHECK(hp_dist(two.coefficient(2), hp("0.48416355860060294691182059284277", "0.12484249486132723146802546060799")) <
              1e-15);

        CHECK_THROWS_AS(make_psi_phase({1.0}, {0.0}), std::invalid_argument);
        CHECK_THROWS_AS(make_psi_phase({1.0, 2.0}, {1.0}), std::invalid_argument);
    }

    TEST_CASE("Hardy family") {
        const auto plain = make_hardy(0.0, 0.0, 1.0);
        CHECK(hp_dist(plain.coefficient(0), {0.0, 0.0}) == 0.0);
        CHECK(hp_dist(plain.coefficient(4), {1.0 / 24.0, 0.0}) < 1e-17);

        const auto e1 = make_hardy(0.0, 1.0, 1.0);
        CHECK(hp_dist(e1.coefficient(1), {std::cos(std::log(2.0)), std::sin(std::log(2.0))}) < 1e-15);

        // e^{i log 3.5} / 6
        const auto e2 = make_hardy(0.0, 1.0, 0.5);
        CHECK(hp_dist(e2.coefficient(3), hp("0.052116524590264159354200973715450", "0.15830870362178501831356457978664")) <
              1e-15);

        CHECK_THROWS_AS(make_hardy(0.5, 1.0, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(make_hardy(0.0, 1.0, 0.0), std::invalid_argument);
    }

    TEST_CASE("product moduli") {
        const auto f = make_product_moduli(0.5, 0.0);
        CHECK(f.rho() == doctest::Approx(2.0));
        CHECK(hp_dist(f.coefficient(1), {1.0, 0.0}) == 0.0);
        CHECK(hp_dist(f.coefficient(2), {0.5, 0.0}) == 0.0);
        CHECK(hp_dist(f.coefficient(3), {0.1875, 0.0}) == 0.0);

        const auto b = hadamard_multipliers(0.5, 4, 128);
        CHECK(b[2].to_double() == 0.375);
        CHECK(b[3].to_double() == 0.3125);

        CHECK_THROWS_AS(make_product_moduli(0.0, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(make_product_moduli(1.0, 0.0), std::invalid_argument);
    }

    TEST_CASE("Parseval second moment") {
        // e^z at r = 1: sqrt(I_0(2)) = 1.5098295606908970794557319656700...
        const auto e = make_exponential();
        const BoundedValue m = parseval_m2(e, 1.0);
        CHECK(m.value == doctest::Approx(1.5098295606908971).epsilon(1e-15));
        CHECK(m.error_bound <= 1e-13);

        // unit phases do not change m2
        const auto f = make_quadratic_phase(AlphaSpec::parse("sqrt2"));
        CHECK(parseval_m2(f, 7.0).value == doctest::Approx(parseval_m2(e, 7.0).value).epsilon(1e-15));
        CHECK(parseval_m2(f, 1e-9).value == doctest::Approx(1.0));
        // no overflow far out
        CHECK(std::isfinite(parseval_m2(e, 300.0).value));
    }

    TEST_CASE("combination of even and odd parts") {
        const auto e = make_exponential();
        const auto same = combine_Q(e, e, 0.0, 0.0);
        for (std::size_t n = 0; n < 6; ++n) CHECK(hp_dist(same.coefficient(n), e.coefficient(n)) < 1e-70);

        const auto flip = combine_Q(e, e, 0.0, M_PI);
        // the angle pi is rounded to double before use
        CHECK(hp_dist(flip.coefficient(2), {0.5, 0.0}) < 1e-16);
        CHECK(hp_dist(flip.coefficient(3), {-1.0 / 6.0, 0.0}) < 1e-16);
        CHECK(flip.unit_phase());

        const auto pm = make_product_moduli(0.5, 0.0);
        CHECK_THROWS_AS(combine_Q(pm, e, 0.0, 0.0), std::invalid_argument);
    }

    TEST_CASE("derived series") {
        const auto e = make_exponential();
        const auto d = derivative(e);
        CHECK(hp_dist(d.coefficient(3), e.coefficient(3)) < 1e-70);
        const auto G = disc_series(make_rational_phase(1, 2));
        CHECK(hp_dist(G.coefficient(0), {0.0, 0.0}) == 0.0);
        CHECK(hp_dist(G.coefficient(1), {1.0, 0.0}) == 0.0);
        CHECK(hp_dist(G.coefficient(2), {-1.0, 0.0}) == 0.0);
    }

    TEST_CASE("JSON round trip") {
        const auto f = make_psi_phase({2.0, -1.0}, {1.0, 2.0});
        const auto g = sequence_from_json(to_json(f));
        for (std::size_t n = 0; n < 5; ++n) CHECK(hp_dist(f.coefficient(n), g.coefficient(n)) == 0.0);

        const auto s2 = make_product_moduli(0.5, AlphaSpec::parse("sqrt2"));
        const auto s2b = sequence_from_json(to_json(s2));
        CHECK(hp_dist(s2.coefficient(17), s2b.coefficient(17)) == 0.0);

        CHECK_THROWS(sequence_from_json(nlohmann::json{{"phase", {{"kind", "nope"}}}}));
    }
}
