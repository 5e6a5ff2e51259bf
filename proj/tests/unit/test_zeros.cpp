#include "pitlab/zeros.hpp"

#include <doctest.h>

#include <cmath>

using namespace pitlab;

TEST_SUITE("zeros") {
    TEST_CASE("zero-free exponentials") {
        const auto e = make_exponential();
        CHECK(winding_number(e, SectorBox::disc(25.0)).winding == 0);
        CHECK(count_zeros(e, 25.0).count == 0);
        CHECK(count_zeros(make_rational_phase(1, 2), 20.0).count == 0);
        const ZeroSet zs = locate_zeros(e, SectorBox::disc(10.0));
        CHECK(zs.zeros.empty());
        CHECK(zs.completeness_certificate);
    }

    TEST_CASE("quarter phase: zeros on the imaginary axis") {
        // (1+i)/2 e^z + (1-i)/2 e^{-z} vanishes at z = i (pi/4 + pi k)
        const auto f = make_rational_phase(1, 4);
        const ZeroSet zs = locate_zeros(f, SectorBox::disc(10.0));
        REQUIRE(zs.completeness_certificate);
        REQUIRE(zs.zeros.size() == 6);
        for (const Zero& z : zs.zeros) {
            CHECK(z.multiplicity == 1);
            CHECK_FALSE(z.unresolved);
            const double k = (z.z().imag() - M_PI / 4.0) / M_PI;
            CHECK(std::abs(z.z().real()) < 1e-30);
            CHECK(std::abs(k - std::round(k)) < 1e-30);
            CHECK(z.enclosure_radius > 0.0);
            CHECK(z.enclosure_radius < 1.0);
        }

        // partial lattice sum over the same zeros, against 1/(i x) summed directly
        std::complex<double> lattice{0.0, 0.0};
        for (int k = -3; k <= 2; ++k) lattice += 1.0 / std::complex<double>(0.0, M_PI / 4.0 + M_PI * k);
        CHECK(std::abs(reciprocal_sum(zs, 10.0) - lattice) < 1e-14);

        // symmetric partial sums approach -i
        const ZeroSet wide = locate_zeros(f, SectorBox::disc(60.0));
        REQUIRE(wide.completeness_certificate);
        const std::complex<double> s = reciprocal_sum(wide, 60.0);
        CHECK(std::abs(s - std::complex<double>(0.0, -1.0)) < 0.02);
        CHECK(std::abs(s - std::complex<double>(0.0, -1.0)) < std::abs(reciprocal_sum(zs, 10.0) - std::complex<double>(0.0, -1.0)));

        const SeparationReport sep = separation_report(zs);
        CHECK(sep.min_distance == doctest::Approx(M_PI).epsilon(1e-12));
        for (double d : sep.nearest_normalized) CHECK(d == doctest::Approx(M_PI / std::sqrt(2.0 * M_PI)).epsilon(1e-12));
        REQUIRE(sep.histogram.size() == 16);
        CHECK(sep.histogram[5] == 6);
        CHECK(sep.multiple.empty());
    }

    TEST_CASE("quadratic phase: counts and certified zeros") {
        const auto f = make_quadratic_phase(AlphaSpec::parse("sqrt2"));
        const WindingResult w = winding_number(f, SectorBox::disc(30.0));
        CHECK(w.winding >= 24);
        CHECK(w.winding <= 36);
        CHECK(w.snap_distance < 0.1);
        WindingOptions dense;
        dense.step_scale = 0.5;
        CHECK(winding_number(f, SectorBox::disc(30.0), dense).winding == w.winding);

        const ZeroSet zs = locate_zeros(f, SectorBox::disc(20.0));
        REQUIRE(zs.completeness_certificate);
        CHECK(zs.total_multiplicity() == zs.box_winding);
        for (const Zero& z : zs.zeros) {
            CHECK(z.multiplicity == 1);
            CHECK(z.newton_residual <= 1e3 * z.eval_bound);
        }
        CHECK(separation_report(zs).min_distance > 0.1);

        const AngularDensity ad = angular_density(zs, 20.0, 4);
        REQUIRE(ad.sectors.size() == 4);
        int total = 0;
        for (const SectorCount& s : ad.sectors) {
            total += s.count;
            CHECK(s.expected == doctest::Approx(5.0));
        }
        CHECK(total == zs.total_multiplicity());
        CHECK_THROWS_AS(angular_density(zs, 25.0, 4), std::invalid_argument);
    }

    TEST_CASE("sector boxes") {
        CHECK_THROWS_AS((SectorBox{2.0, 1.0, 0.0, 1.0}.validate()), std::invalid_argument);
        CHECK_THROWS_AS((SectorBox{0.0, 1.0, 0.0, 7.0}.validate()), std::invalid_argument);
        const SectorBox q{1.0, 2.0, 0.0, M_PI / 2.0};
        CHECK(q.contains({1.0, 1.0}));
        CHECK_FALSE(q.contains({-1.0, 1.0}));
        CHECK_FALSE(q.contains({0.5, 0.5}));
        CHECK(SectorBox::disc(3.0).full_circle());
        CHECK(std::abs(winding_on_circle(make_rational_phase(1, 4), {0.0, M_PI / 4.0}, 0.5).winding) == 1);
    }
}
