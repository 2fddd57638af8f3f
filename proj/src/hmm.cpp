#include "onramp/hmm.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "onramp/errors.hpp"

namespace onramp {

using nlohmann::json;

const char* to_string(Primitive p) {
    switch (p) {
        case Primitive::Idle: return "Idle";
        case Primitive::Approach: return "Approach";
        case Primitive::Cross: return "Cross";
        case Primitive::Change: return "Change";
    }
    return "?";
}

void HmmParams::validate() const {
    constexpr double kTol = 1e-9;
    auto check_dist = [&](std::span<const double> p, const std::string& what) {
        double sum = 0.0;
        for (double x : p) {
            if (!(x >= 0.0) || !std::isfinite(x)) throw InputError(what + " has a negative or non-finite entry");
            sum += x;
        }
        if (std::abs(sum - 1.0) > kTol) throw InputError(what + " does not sum to 1");
    };
    for (int i = 0; i < kNumPrimitives; ++i) {
        check_dist(transition[static_cast<std::size_t>(i)], "transition row " + std::to_string(i));
    }
    check_dist(initial, "initial distribution");
    for (int i = 0; i < kNumPrimitives; ++i) {
        const auto& e = emissions[static_cast<std::size_t>(i)];
        if (e.components.empty()) throw InputError("emission " + std::to_string(i) + " has no components");
        double wsum = 0.0;
        for (const auto& c : e.components) {
            if (!(c.weight > 0.0)) throw InputError("emission weight must be > 0");
            for (double s : c.std) {
                if (!(s > 0.0) || !std::isfinite(s)) throw InputError("emission std must be > 0");
            }
            for (double m : c.mean) {
                if (!std::isfinite(m)) throw InputError("emission mean must be finite");
            }
            wsum += c.weight;
        }
        if (std::abs(wsum - 1.0) > kTol) throw InputError("emission weights do not sum to 1");
    }
}

HmmParams default_params() {
    constexpr double kPercent[kNumPrimitives][kNumPrimitives] = {
        {98.94, 1.03, 0.03, 0.00},
        {1.46, 97.53, 1.01, 0.00},
        {0.47, 8.28, 86.17, 5.08},
        {0.00, 0.33, 5.98, 93.69},
    };
    constexpr double kDcMean[kNumPrimitives] = {0.09, 0.33, 0.53, 0.89};
    constexpr double kDcStd[kNumPrimitives] = {0.06, 0.08, 0.09, 0.11};
    constexpr double kKappaMean[kNumPrimitives] = {0.0, 0.0, 1.0, 1.0};

    HmmParams p;
    for (std::size_t i = 0; i < kNumPrimitives; ++i) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < kNumPrimitives; ++j) {
            p.transition[i][j] = kPercent[i][j] / 100.0;
            row_sum += p.transition[i][j];
        }
        for (double& a : p.transition[i]) a /= row_sum;
        p.initial[i] = 1.0 / kNumPrimitives;
        p.emissions[i].components = {GaussianComponent{1.0, {kDcMean[i], kKappaMean[i]}, {kDcStd[i], kKappaStdFloor}}};
    }
    return p;
}

namespace {

std::array<double, 2> pair_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw InputError("hmm params: " + what + " must be a 2-element numeric array");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

HmmParams parse_hmm_params(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("hmm params: ") + e.what());
    }
    HmmParams p;
    try {
        const json& a = root.at("A");
        if (!a.is_array() || a.size() != kNumPrimitives) throw InputError("hmm params: A must be 4x4");
        for (std::size_t i = 0; i < kNumPrimitives; ++i) {
            if (!a[i].is_array() || a[i].size() != kNumPrimitives) throw InputError("hmm params: A must be 4x4");
            for (std::size_t j = 0; j < kNumPrimitives; ++j) p.transition[i][j] = a[i][j].get<double>();
        }
        const json& pi = root.at("pi");
        if (!pi.is_array() || pi.size() != kNumPrimitives) throw InputError("hmm params: pi must have 4 entries");
        for (std::size_t i = 0; i < kNumPrimitives; ++i) p.initial[i] = pi[i].get<double>();
        const json& em = root.at("emissions");
        if (!em.is_array() || em.size() != kNumPrimitives) throw InputError("hmm params: need 4 emissions");
        for (std::size_t i = 0; i < kNumPrimitives; ++i) {
            auto& comps = p.emissions[i].components;
            if (em[i].contains("components")) {
                for (const json& c : em[i]["components"]) {
                    comps.push_back({c.value("weight", 1.0), pair_from_json(c.at("mean"), "mean"),
                                     pair_from_json(c.at("std"), "std")});
                }
            } else {
                comps.push_back({1.0, pair_from_json(em[i].at("mean"), "mean"), pair_from_json(em[i].at("std"), "std")});
            }
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("hmm params: ") + e.what());
    }
    p.validate();
    return p;
}

HmmParams load_hmm_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open hmm params file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_hmm_params(buf.str());
}

std::string hmm_params_to_json(const HmmParams& p) {
    json root;
    root["A"] = p.transition;
    root["pi"] = p.initial;
    root["emissions"] = json::array();
    for (const auto& e : p.emissions) {
        if (e.components.size() == 1) {
            root["emissions"].push_back({{"mean", e.components[0].mean}, {"std", e.components[0].std}});
        } else {
            json comps = json::array();
            for (const auto& c : e.components) comps.push_back({{"weight", c.weight}, {"mean", c.mean}, {"std", c.std}});
            root["emissions"].push_back({{"components", comps}});
        }
    }
    return root.dump(2) + "\n";
}

namespace {

double gaussian_logpdf(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

double component_logpdf(const GaussianComponent& c, const Observation& obs) {
    return gaussian_logpdf(obs.d_c, c.mean[0], c.std[0]) + gaussian_logpdf(obs.kappa, c.mean[1], c.std[1]);
}

double safe_log(double p) { return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity(); }

}  // namespace

double emission_logpdf(Primitive state, const Observation& obs, const HmmParams& params) {
    const auto& comps = params.emissions[static_cast<std::size_t>(state)].components;
    if (comps.size() == 1) return component_logpdf(comps[0], obs);
    // log-sum-exp over mixture components
    double hi = -std::numeric_limits<double>::infinity();
    std::vector<double> terms;
    terms.reserve(comps.size());
    for (const auto& c : comps) {
        terms.push_back(std::log(c.weight) + component_logpdf(c, obs));
        hi = std::max(hi, terms.back());
    }
    if (!std::isfinite(hi)) return hi;
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - hi);
    return hi + std::log(acc);
}

PrimitiveSeries viterbi(std::span<const Observation> obs, const HmmParams& params) {
    constexpr int N = kNumPrimitives;
    if (obs.empty()) throw InputError("viterbi: empty observation series");
    for (std::size_t t = 0; t < obs.size(); ++t) {
        if (!std::isfinite(obs[t].d_c) || !std::isfinite(obs[t].kappa)) {
            throw InputError("viterbi: non-finite observation at frame " + std::to_string(t));
        }
    }

    std::array<std::array<double, N>, N> log_a{};
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) log_a[i][j] = safe_log(params.transition[i][j]);
    }

    const std::size_t T = obs.size();
    std::vector<std::array<std::int8_t, N>> back(T);
    std::array<double, N> delta{};
    for (int s = 0; s < N; ++s) {
        delta[s] = safe_log(params.initial[s]) + emission_logpdf(static_cast<Primitive>(s), obs[0], params);
    }
    for (std::size_t t = 1; t < T; ++t) {
        std::array<double, N> next{};
        for (int s = 0; s < N; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            int arg = 0;
            for (int p = 0; p < N; ++p) {
                const double cand = delta[p] + log_a[p][s];
                if (cand > best) {
                    best = cand;
                    arg = p;
                }
            }
            back[t][s] = static_cast<std::int8_t>(arg);
            next[s] = best + emission_logpdf(static_cast<Primitive>(s), obs[t], params);
        }
        delta = next;
    }

    int last = 0;
    for (int s = 1; s < N; ++s) {
        if (delta[s] > delta[last]) last = s;
    }

    PrimitiveSeries out;
    out.log_likelihood = delta[last];
    out.labels.resize(T);
    out.labels[T - 1] = static_cast<Primitive>(last);
    for (std::size_t t = T - 1; t > 0; --t) {
        last = back[t][last];
        out.labels[t - 1] = static_cast<Primitive>(last);
    }
    return out;
}

double path_log_probability(std::span<const Primitive> path, std::span<const Observation> obs,
                            const HmmParams& params) {
    if (path.size() != obs.size() || path.empty()) throw std::invalid_argument("path/observation length mismatch");
    auto idx = [](Primitive p) { return static_cast<std::size_t>(p); };
    double lp = safe_log(params.initial[idx(path[0])]) + emission_logpdf(path[0], obs[0], params);
    for (std::size_t t = 1; t < path.size(); ++t) {
        lp = lp + safe_log(params.transition[idx(path[t - 1])][idx(path[t])]);
        lp = lp + emission_logpdf(path[t], obs[t], params);
    }
    return lp;
}

}  // namespace onramp
