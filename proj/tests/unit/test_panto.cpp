#include "support.hpp"

#include "pitlab/panto.hpp"

#include <doctest.h>

#include <cmath>

using namespace pitlab;
using testing::hp;
using testing::hp_dist;

TEST_SUITE("panto") {
    TEST_CASE("trigonometric sums: terms") {
        const TrigSum minus = trig_sum_reduction(1, 2);
        REQUIRE(minus.terms.size() == 1);
        CHECK(hp_dist(minus.terms[0].c, {1.0, 0.0}) == 0.0);
        CHECK(hp_dist(minus.terms[0].b, {-1.0, 0.0}) == 0.0);

        const TrigSum plus = trig_sum_reduction(1, 1);
        REQUIRE(plus.terms.size() == 1);
        CHECK(hp_dist(plus.terms[0].c, {1.0, 0.0}) == 0.0);
        CHECK(hp_dist(plus.terms[0].b, {1.0, 0.0}) == 0.0);

        // period-2 sequence (1, i): c = (1+i)/2 at b = +1 and (1-i)/2 at b = -1
        const TrigSum four = trig_sum_reduction(1, 4);
        REQUIRE(four.terms.size() == 2);
        CHECK(four.period == 2);
        CHECK(hp_dist(four.terms[0].b, {1.0, 0.0}) == 0.0);
        CHECK(hp_dist(four.terms[0].c, {0.5, 0.5}) <= four.terms[0].c_error);
        CHECK(hp_dist(four.terms[1].b, {-1.0, 0.0}) == 0.0);
        CHECK(hp_dist(four.terms[1].c, {0.5, -0.5}) <= four.terms[1].c_error);
        CHECK(four.roots_of_unity_ok());
    }

    TEST_CASE("trigonometric sums: values") {
        const EvalResult e3 = eval_trig_sum(trig_sum_reduction(1, 2), HPComplex(std::complex<double>(3.0, 0.0), 256));
        CHECK(hp_dist(e3.value, hp("0.04978706836786394297934241565006177663169959", "0")) <= e3.total_bound() + 1e-44);

        // ((1+i) e + (1-i) e^{-1}) / 2
        const HPComplex one(std::complex<double>(1.0, 0.0), 256);
        const EvalResult v = eval_trig_sum(trig_sum_reduction(1, 4), one);
        CHECK(hp_dist(v.value, hp("1.543080634815243778477905620757061682602", "1.175201193643801456882381850595600815156")) <=
              v.total_bound() + 1e-39);
        const EvalResult s = eval_f(make_rational_phase(1, 4), one, 1e-40);
        CHECK(hp_dist(v.value, s.value) <= v.total_bound() + s.total_bound());

        TrigSum empty;
        CHECK(hp_dist(eval_trig_sum(empty, one).value, {0.0, 0.0}) == 0.0);
    }

    TEST_CASE("trigonometric sums: exact round trip and cyclotomic polynomials") {
        for (auto [p, q] : {std::pair<long, long>{1, 2}, {1, 3}, {2, 5}, {5, 24}, {7, 24}, {1, 12}, {3, 16}}) {
            CHECK(trig_sum_roundtrip_exact(p, q));
        }
        CHECK(cyclotomic_polynomial(1) == std::vector<std::int64_t>{-1, 1});
        CHECK(cyclotomic_polynomial(6) == std::vector<std::int64_t>{1, -1, 1});
        CHECK(cyclotomic_polynomial(12) == std::vector<std::int64_t>{1, 0, -1, 0, 1});
        CHECK(cyclotomic_polynomial(9) == std::vector<std::int64_t>{1, 0, 0, 1, 0, 0, 1});
        CHECK_THROWS_AS(trig_sum_reduction(2, 4), std::invalid_argument);
    }

    TEST_CASE("pantograph identity") {
        const auto f = make_quadratic_phase(AlphaSpec::parse("sqrt2"));
        const Residual far = pantograph_residual(f, HPComplex(std::polar(7.0, M_PI / 5.0), 160), 160);
        CHECK(far.ok());
        CHECK(far.residual <= 1e-25);
        CHECK(pantograph_residual(f, HPComplex(std::complex<double>(0.0, 0.0), 160)).ok());

        const auto m = make_rational_phase(1, 2);
        for (double x : {-3.0, 0.5, 4.0}) CHECK(pantograph_residual(m, HPComplex(std::complex<double>(x, 0.0), 256)).ok());

        CHECK_THROWS_AS(pantograph_residual(make_psi_phase({1.0}, {1.0}), HPComplex(std::complex<double>(1.0, 0.0), 128)),
                        std::invalid_argument);
    }

    TEST_CASE("Hadamard composition") {
        // sum binom(2n,n)/4^n/n! = e^{1/2} I_0(1/2)
        const auto e = make_exponential();
        const EvalResult d = hadamard_direct(e, 0.5, {1.0, 0.0});
        CHECK(hp_dist(d.value, hp("1.753387654377090395721946355212090821042", "0")) <= d.total_bound() + 1e-35);
        const EvalResult c = hadamard_compose(e, 0.5, {1.0, 0.0}, contour_for({1.0, 0.0}, 1.5));
        CHECK(hp_dist(c.value, d.value) <= 1e-12);

        // H(w) = 1/(1-w) is the identity
        const auto f = make_quadratic_phase(AlphaSpec::parse("sqrt2"));
        const std::complex<double> z(1.5, -2.0);
        const EvalResult id = hadamard_compose(f, 1.0, z, contour_for(z, 1.5));
        CHECK(std::abs(id.approx() - eval_f(f, z, 1e-30).approx()) < 1e-11);

        CHECK_THROWS_AS(contour_for(z, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(hadamard_compose(f, 0.5, z, ContourSpec{{0.0, 0.0}, 2.0, 64}), std::invalid_argument);
    }

    TEST_CASE("composed functional equation") {
        const auto pm = make_product_moduli(0.5, AlphaSpec::parse("sqrt2"));
        const CompositionReport at0 = composition_residual(pm, {0.0, 0.0});
        CHECK(at0.direct.residual == 0.0);
        const CompositionReport r = composition_residual(pm, std::polar(2.0, M_PI / 7.0));
        CHECK(r.direct.residual <= 1e-15);
        CHECK(r.direct.ok());
        CHECK(r.path_difference <= 1e-10);
        CHECK(r.contour.residual <= 1e-10);
    }

    TEST_CASE("multiplication estimate") {
        const auto f = make_quadratic_phase(AlphaSpec::parse("sqrt2"));
        CHECK(hadamard_estimate_check(f, 0.5, {3.0, 0.0}, 0.5).pass);
        CHECK(hadamard_estimate_check(f, 0.5, std::polar(10.0, M_PI / 3.0), 0.25).pass);
        const EstimateReport id = hadamard_estimate_check(f, 1.0, {2.0, 1.0}, 0.5);
        CHECK(id.K >= 1.0);
        CHECK(id.pass);
        CHECK_THROWS_AS(hadamard_estimate_check(f, 0.5, {1.0, 0.0}, 1.0), std::invalid_argument);
    }

    TEST_CASE("complex log Gamma") {
        CHECK(std::abs(log_gamma({0.5, 0.0}) - std::complex<double>(0.5 * std::log(M_PI), 0.0)) < 1e-14);
        CHECK(std::abs(log_gamma({3.0, 4.0}) - std::complex<double>(-1.75662678460378411053, 4.74266443803465792819)) <
              1e-13);
        // imaginary part modulo 2 pi
        const std::complex<double> g = log_gamma({-2.5, 0.5});
        const std::complex<double> ref(-0.935085621298277478683, -8.87096288524745919865);
        CHECK(std::abs(g.real() - ref.real()) < 1e-13);
        CHECK(std::abs(std::remainder(g.imag() - ref.imag(), 2.0 * M_PI)) < 1e-13);
    }

    TEST_CASE("line integral representation") {
        const auto zero = make_psi_phase({0.0}, {1.0});
        CHECK(std::abs(mellin_barnes_eval(zero, {1.0, 0.0}, 0.5) - std::exp(-1.0)) < 1e-8);

        const auto one = make_psi_phase({1.0}, {1.0});
        CHECK(std::abs(mellin_barnes_eval(one, {2.0, 0.0}, 0.5) - eval_f(one, std::complex<double>(-2.0, 0.0), 1e-30).approx()) < 1e-6);

        const auto two = make_psi_phase({2.0, -1.0}, {1.0, 2.0});
        const std::complex<double> z = std::polar(5.0, M_PI / 4.0);
        CHECK(std::abs(mellin_barnes_eval(two, z, 1.0) - eval_f(two, -z, 1e-30).approx()) < 1e-5);

        CHECK_THROWS_AS(mellin_barnes_eval(one, std::polar(1.0, M_PI / 2.0), 0.5), std::invalid_argument);
        CHECK_THROWS_AS(mellin_barnes_eval(one, {1.0, 0.0}, 0.5, 1e-9), std::invalid_argument);
        CHECK_THROWS_AS(mellin_barnes_eval(make_exponential(), {1.0, 0.0}, 0.5), std::invalid_argument);
    }
}
