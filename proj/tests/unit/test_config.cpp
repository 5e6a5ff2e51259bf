#include "pitlab/config.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>

using namespace pitlab;
using nlohmann::json;

TEST_SUITE("config") {
    TEST_CASE("alpha tokens") {
        CHECK(sequence_from_json(family_for_alpha("1/3")).period() == 3);
        const auto a = sequence_from_json(family_for_alpha("sqrt2"));
        const auto b = make_quadratic_phase(AlphaSpec::parse("sqrt2"));
        CHECK(a.coefficient(5).to_complex() == b.coefficient(5).to_complex());
        CHECK_NOTHROW(family_for_alpha("0.25"));
        CHECK_THROWS_AS(family_for_alpha("1/0"), ConfigError);
        CHECK_THROWS_AS(family_for_alpha("banana"), ConfigError);
    }

    TEST_CASE("parsing") {
        const json j = {{"alpha", "1/4"},
                        {"params", {{"rmax", 12}}},
                        {"out", "z.csv"},
                        {"tolerance", 1e-20},
                        {"precision_bits", 192},
                        {"threads", 2}};
        const ExperimentConfig c = ExperimentConfig::from_json(j);
        CHECK(c.params["rmax"] == 12);
        CHECK(c.out == "z.csv");
        CHECK(c.tolerance == 1e-20);
        CHECK(c.precision_bits == Bits{192});
        CHECK(c.threads == 2);
        CHECK(c.sequence().period() == 2);

        CHECK(ExperimentConfig().sequence().rho() == 1.0);
        CHECK_THROWS_AS(ExperimentConfig::from_json({{"colour", 1}}), ConfigError);
        CHECK_THROWS_AS(ExperimentConfig::from_json({{"threads", "four"}}), ConfigError);
        CHECK_THROWS_AS(ExperimentConfig::from_json({{"alpha", "1/3"}, {"family", json::object()}}), ConfigError);
        CHECK_THROWS_AS(ExperimentConfig::from_json(json::array()), ConfigError);
    }

    TEST_CASE("files") {
        const std::string path = "pitlab_config_test.json";
        {
            std::ofstream out(path);
            out << R"({"alpha": "golden", "params": {"ntheta": 64}})";
        }
        const ExperimentConfig c = ExperimentConfig::load(path);
        CHECK(c.params["ntheta"] == 64);
        std::remove(path.c_str());
        CHECK_THROWS_AS(ExperimentConfig::load("does_not_exist.json"), ConfigError);
    }
}
