#include <string>

#include <doctest.h>

#include "rscma/harness.hpp"

using namespace rscma;

namespace {

std::string error_of(const std::string& text, bool with_base) {
    try {
        if (with_base) {
            parse_config(text, desk_preset());
        } else {
            parse_config(text);
        }
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("presets round-trip through JSON") {
    for (const ExperimentConfig& cfg : {desk_preset(), paper_preset()}) {
        const std::string text = config_to_json(cfg);
        CHECK(config_to_json(parse_config(text)) == text);
    }
}

TEST_CASE("overrides on top of a preset") {
    const ExperimentConfig cfg =
        parse_config(R"({"channel": {"trials": 7}, "signal": {"snr_db": 20}})", desk_preset());
    CHECK(cfg.channel.trials == 7);
    CHECK(cfg.channel.length == 32);
    CHECK(cfg.signal.snr_db == 20.0);
    CHECK(cfg.algorithms.size() == desk_preset().algorithms.size());
}

TEST_CASE("errors name the offending key") {
    CHECK(error_of(R"({"bogus": 1})", true).find("'bogus'") != std::string::npos);
    CHECK(error_of(R"({"channel": {"lenght": 3}})", true).find("channel.lenght") != std::string::npos);
    CHECK(error_of(R"({"algorithms": [{"name": "cma", "mu": 1e-3, "rho": 1}]})", true)
              .find("algorithms[0].rho") != std::string::npos);
    CHECK(error_of(R"({"algorithms": [{"name": "scma_p", "mu": 1e-3, "p": 0.5}]})", true)
              .find("algorithms[0].rho") != std::string::npos);
    CHECK(error_of(R"({"equalizer_length": "many"})", true).find("equalizer_length") != std::string::npos);
    CHECK(error_of(R"({"equalizer_length": 8})", false).find("master_seed") != std::string::npos);
    CHECK(error_of("{", true).find("JSON") != std::string::npos);
    CHECK(error_of(R"({"algorithms": [{"name": "rscma", "mu": 1e-3, "p": 0.5,
                       "prox": {"mode": "quarter", "lambda_r": 1, "lambda_i": 1}}]})", true)
              .find("prox.mode") != std::string::npos);
}

TEST_CASE("semantic validation") {
    CHECK_THROWS(parse_config(R"({"equalizer_length": 0})", desk_preset()));
    CHECK_THROWS(parse_config(R"({"channel": {"length": 4}})", desk_preset()));
    CHECK_THROWS(parse_config(R"({"algorithms": [{"name": "rscma", "mu": 1e-3, "p": 1.5}]})", desk_preset()));
    CHECK_THROWS_AS(preset_from_string("huge"), ConfigError);
}
