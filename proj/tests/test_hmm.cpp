#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <limits>
#include <random>

#include "hmm_oracle.hpp"
#include "onramp/errors.hpp"
#include "onramp/hmm.hpp"

using namespace onramp;
using doctest::Approx;

TEST_SUITE("hmm") {

TEST_CASE("default parameters match the reference transition table") {
    const HmmParams p = default_params();
    CHECK(p.transition[0][0] == Approx(0.9894).epsilon(1e-12));
    const double table[4][4] = {
        {98.94, 1.03, 0.03, 0.00}, {1.46, 97.53, 1.01, 0.00}, {0.47, 8.28, 86.17, 5.08}, {0.00, 0.33, 5.98, 93.69}};
    for (int i = 0; i < 4; ++i) {
        double row = 0.0;
        for (int j = 0; j < 4; ++j) row += table[i][j];
        double sum = 0.0;
        for (int j = 0; j < 4; ++j) {
            CHECK(std::abs(p.transition[i][j] - table[i][j] / row) < 1e-12);
            CHECK(std::abs(p.transition[i][j] - table[i][j] / 100.0) < 1e-3);
            sum += p.transition[i][j];
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);
        CHECK(p.initial[i] == 0.25);
    }
    const double mean[4] = {0.09, 0.33, 0.53, 0.89};
    const double sd[4] = {0.06, 0.08, 0.09, 0.11};
    const double kappa[4] = {0.0, 0.0, 1.0, 1.0};
    for (int i = 0; i < 4; ++i) {
        REQUIRE(p.emissions[i].components.size() == 1);
        const auto& c = p.emissions[i].components[0];
        CHECK(c.mean[0] == mean[i]);
        CHECK(c.std[0] == sd[i]);
        CHECK(c.mean[1] == kappa[i]);
        CHECK(c.std[1] == kKappaStdFloor);
    }
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("emission density at and around the mean") {
    const HmmParams p = default_params();
    const double two_pi = 2.0 * std::acos(-1.0);
    for (int s = 0; s < 4; ++s) {
        const auto& c = p.emissions[s].components[0];
        const double peak = -std::log(c.std[0] * std::sqrt(two_pi)) - std::log(c.std[1] * std::sqrt(two_pi));
        const Observation at_mean{c.mean[0], c.mean[1]};
        CHECK(emission_logpdf(static_cast<Primitive>(s), at_mean, p) == Approx(peak).epsilon(1e-14));
        const Observation one_sd{c.mean[0] + c.std[0], c.mean[1]};
        CHECK(emission_logpdf(static_cast<Primitive>(s), one_sd, p) == Approx(peak - 0.5).epsilon(1e-14));
    }
}

TEST_CASE("emission density against an independent long double evaluation") {
    const HmmParams p = default_params();
    const Observation o{0.4123, 0.87};
    for (int s = 0; s < 4; ++s) {
        const auto& c = p.emissions[s].components[0];
        long double total = 0.0L;
        for (int k = 0; k < 2; ++k) {
            const long double x = k == 0 ? o.d_c : o.kappa;
            const long double z = (x - c.mean[k]) / c.std[k];
            total += -0.5L * z * z - std::log(static_cast<long double>(c.std[k])) -
                     0.5L * std::log(2.0L * 3.14159265358979323846264338327950288L);
        }
        CHECK(std::abs(emission_logpdf(static_cast<Primitive>(s), o, p) - static_cast<double>(total)) < 1e-12);
    }
}

TEST_CASE("mixture emissions use log-sum-exp") {
    HmmParams p = default_params();
    p.emissions[1].components = {GaussianComponent{0.3, {0.2, 0.0}, {0.05, 0.1}},
                                 GaussianComponent{0.7, {0.4, 0.0}, {0.1, 0.1}}};
    const Observation o{0.31, 0.05};
    auto pdf = [&](const GaussianComponent& c) {
        double v = 1.0;
        for (int k = 0; k < 2; ++k) {
            const double x = k == 0 ? o.d_c : o.kappa;
            const double z = (x - c.mean[k]) / c.std[k];
            v *= std::exp(-0.5 * z * z) / (c.std[k] * std::sqrt(2.0 * std::acos(-1.0)));
        }
        return v;
    };
    const double expected = std::log(0.3 * pdf(p.emissions[1].components[0]) + 0.7 * pdf(p.emissions[1].components[1]));
    CHECK(emission_logpdf(Primitive::Approach, o, p) == Approx(expected).epsilon(1e-12));
}

TEST_CASE("single observation picks the best emission") {
    const HmmParams p = default_params();
    const std::vector<Observation> obs{{0.89, 1.0}};
    const auto r = viterbi(obs, p);
    REQUIRE(r.labels.size() == 1);
    CHECK(r.labels[0] == Primitive::Change);
    int best = 0;
    for (int s = 1; s < 4; ++s) {
        if (emission_logpdf(static_cast<Primitive>(s), obs[0], p) >
            emission_logpdf(static_cast<Primitive>(best), obs[0], p)) {
            best = s;
        }
    }
    CHECK(best == 3);
}

TEST_CASE("steady lane keeping decodes as idle") {
    const std::vector<Observation> obs(50, Observation{0.09, 0.0});
    const auto r = viterbi(obs, default_params());
    for (Primitive l : r.labels) CHECK(l == Primitive::Idle);
}

TEST_CASE("a clean lane-change profile decodes in primitive order") {
    // d_c ramps 0 -> 1 while kappa is on from 0.25 onward.
    std::vector<Observation> obs;
    for (int i = 0; i < 120; ++i) {
        const double d = std::min(1.0, i / 100.0);
        obs.push_back({d, d > 0.25 ? 1.0 : 0.0});
    }
    const auto r = viterbi(obs, default_params());
    CHECK(r.labels.front() == Primitive::Idle);
    CHECK(r.labels.back() == Primitive::Change);
    for (std::size_t i = 1; i < r.labels.size(); ++i) CHECK(r.labels[i] >= r.labels[i - 1]);
    for (Primitive p : {Primitive::Approach, Primitive::Cross}) {
        CHECK(std::find(r.labels.begin(), r.labels.end(), p) != r.labels.end());
    }

    // 12-frame downsample against the exhaustive oracle.
    std::vector<Observation> small;
    for (int i = 0; i < 120; i += 10) small.push_back(obs[static_cast<std::size_t>(i)]);
    const auto fast = viterbi(small, default_params());
    const auto slow = testing::brute_force_viterbi(small, default_params());
    CHECK(fast.labels == slow.path);
}

TEST_CASE("decoding matches exhaustive enumeration on random models") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        const HmmParams p = testing::random_params(rng);
        const auto obs = testing::random_observations(rng, 1 + trial % 7);
        const auto fast = viterbi(obs, p);
        const auto slow = testing::brute_force_viterbi(obs, p);
        REQUIRE(fast.labels == slow.path);
        CHECK(fast.log_likelihood == slow.score);
    }
}

TEST_CASE("log likelihood equals the recomputed path probability") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const auto obs = testing::random_observations(rng, 40);
        const auto r = viterbi(obs, default_params());
        CHECK(std::abs(r.log_likelihood - path_log_probability(r.labels, obs, default_params())) < 1e-9);
    }
}

TEST_CASE("zero-probability transitions are never decoded") {
    const HmmParams p = default_params();
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 200; ++trial) {
        const auto obs = testing::random_observations(rng, 60);
        const auto r = viterbi(obs, p);
        for (std::size_t i = 1; i < r.labels.size(); ++i) {
            CHECK(p.transition[static_cast<std::size_t>(r.labels[i - 1])][static_cast<std::size_t>(r.labels[i])] > 0.0);
        }
    }
}

TEST_CASE("decoding is deterministic") {
    std::mt19937_64 rng(17);
    const auto obs = testing::random_observations(rng, 500);
    const auto a = viterbi(obs, default_params());
    const auto b = viterbi(obs, default_params());
    CHECK(a.labels == b.labels);
    CHECK(a.log_likelihood == b.log_likelihood);
}

TEST_CASE("invalid observation series") {
    CHECK_THROWS_AS(viterbi(std::vector<Observation>{}, default_params()), InputError);
    std::vector<Observation> obs(5, Observation{0.1, 0.0});
    obs[3].d_c = std::numeric_limits<double>::quiet_NaN();
    try {
        viterbi(obs, default_params());
        FAIL("expected an error");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("frame 3") != std::string::npos);
    }
}

TEST_CASE("parameter JSON round trip and validation") {
    const HmmParams p = default_params();
    const HmmParams back = parse_hmm_params(hmm_params_to_json(p));
    CHECK(back.transition == p.transition);
    CHECK(back.initial == p.initial);
    for (int s = 0; s < 4; ++s) {
        REQUIRE(back.emissions[s].components.size() == 1);
        CHECK(back.emissions[s].components[0].mean == p.emissions[s].components[0].mean);
        CHECK(back.emissions[s].components[0].std == p.emissions[s].components[0].std);
    }

    HmmParams bad = p;
    bad.transition[1][1] += 0.01;
    CHECK_THROWS_AS(bad.validate(), InputError);
    bad = p;
    bad.initial[0] = -0.25;
    bad.initial[1] = 0.75;
    CHECK_THROWS_AS(bad.validate(), InputError);
    bad = p;
    bad.emissions[2].components[0].std[0] = 0.0;
    CHECK_THROWS_AS(bad.validate(), InputError);
    CHECK_THROWS_AS(parse_hmm_params("{\"A\": []}"), InputError);
}

TEST_CASE("the shipped parameter file holds the defaults") {
    std::ifstream in(std::string(ONRAMP_SOURCE_DIR) + "/data/hmm_params.json");
    REQUIRE(in);
    std::stringstream buf;
    buf << in.rdbuf();
    const HmmParams p = parse_hmm_params(buf.str());
    CHECK(p.transition == default_params().transition);
    CHECK(p.initial == default_params().initial);
}

}  // TEST_SUITE
