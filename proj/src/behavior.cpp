#include "onramp/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "onramp/categorization.hpp"
#include "onramp/ingest.hpp"

namespace onramp {

using nlohmann::ordered_json;

Ecdf::Ecdf(std::vector<double> samples) : sorted_(std::move(samples)) {
    if (sorted_.empty()) throw std::invalid_argument("ecdf: empty sample");
    for (double x : sorted_) {
        if (!std::isfinite(x)) throw std::invalid_argument("ecdf: non-finite sample");
    }
    std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double Ecdf::quantile(double p) const {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile level outside [0, 1]");
    const double h = static_cast<double>(sorted_.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted_.size()) return sorted_.back();
    return sorted_[lo] + (h - static_cast<double>(lo)) * (sorted_[lo + 1] - sorted_[lo]);
}

std::vector<std::pair<double, double>> Ecdf::curve() const {
    std::vector<std::pair<double, double>> out;
    const double n = static_cast<double>(sorted_.size());
    for (std::size_t i = 0; i < sorted_.size(); ++i) {
        if (i + 1 < sorted_.size() && sorted_[i + 1] == sorted_[i]) continue;
        out.emplace_back(sorted_[i], static_cast<double>(i + 1) / n);
    }
    return out;
}

std::optional<double> deciding_pet(const ScenarioRecord& rec) {
    std::optional<double> best;
    for (const PetResult& c : rec.challengers) {
        if (c.degenerate || !c.pet) continue;
        if (!best || std::abs(*c.pet) < std::abs(*best)) best = *c.pet;
    }
    return best;
}

namespace {

Quantiles quantiles_of(const Ecdf& e) {
    Quantiles q{};
    for (std::size_t i = 0; i < kReportQuantiles.size(); ++i) q[i] = e.quantile(kReportQuantiles[i]);
    return q;
}

double fraction_if(std::span<const double> xs, auto pred) {
    std::size_t n = 0;
    for (double x : xs) n += pred(x) ? 1 : 0;
    return static_cast<double>(n) / static_cast<double>(xs.size());
}

}  // namespace

BehaviorReport behavior_report(std::span<const ScenarioRecord> records) {
    BehaviorReport rep;
    rep.n_scenarios = records.size();
    for (Category c : {Category::Free, Category::InFront, Category::Behind, Category::Into, Category::Ambiguous}) {
        rep.category_counts[to_string(c)] = 0;
    }
    if (records.empty()) return rep;

    std::vector<double> starts;
    std::vector<double> ends;
    std::map<std::string, std::vector<double>> pets;
    for (const ScenarioRecord& r : records) {
        starts.push_back(r.maneuver_start_pos);
        ends.push_back(r.maneuver_end_pos);
        ++rep.category_counts[to_string(r.category)];
        if (r.category == Category::Behind || r.category == Category::InFront) {
            if (const auto p = deciding_pet(r)) pets[to_string(r.category)].push_back(std::abs(*p));
        } else if (r.category == Category::Into && r.accepted_gap) {
            pets[to_string(r.category)].push_back(*r.accepted_gap);
        }
        if (r.critical) {
            const auto p = deciding_pet(r);
            rep.critical.push_back({r.object_id, r.segment, p ? std::abs(*p) : 0.0});
        }
    }

    const Ecdf start_cdf(starts);
    const Ecdf end_cdf(ends);
    rep.start_quantiles = quantiles_of(start_cdf);
    rep.end_quantiles = quantiles_of(end_cdf);
    std::array<double, kStartFractionLevels.size()> below{};
    for (std::size_t i = 0; i < below.size(); ++i) {
        const double level = kStartFractionLevels[i];
        below[i] = fraction_if(starts, [&](double x) { return x < level; });
    }
    rep.start_fraction_below = below;
    rep.end_fraction_within_lane = fraction_if(ends, [](double x) { return x <= 1.0; });

    for (const auto& [cat, values] : pets) rep.pet_quantiles[cat] = quantiles_of(Ecdf(values));

    if (const auto it = pets.find(to_string(Category::Into)); it != pets.end()) {
        // Summing in sorted order keeps the result independent of record order.
        const Ecdf gap_cdf(it->second);
        const std::vector<double>& gaps = gap_cdf.sorted();
        double sum = 0.0;
        for (double g : gaps) sum += g;
        const double mean = sum / static_cast<double>(gaps.size());
        double ss = 0.0;
        for (double g : gaps) ss += (g - mean) * (g - mean);
        rep.accepted_gap_mean = mean;
        rep.accepted_gap_std = gaps.size() > 1 ? std::sqrt(ss / static_cast<double>(gaps.size() - 1)) : 0.0;
    }

    std::sort(rep.critical.begin(), rep.critical.end(), [](const CriticalEntry& a, const CriticalEntry& b) {
        return std::tie(a.object_id, a.segment, a.min_abs_pet) < std::tie(b.object_id, b.segment, b.min_abs_pet);
    });
    return rep;
}

namespace {

ordered_json quantiles_json(const Quantiles& q) {
    ordered_json j;
    for (std::size_t i = 0; i < q.size(); ++i) {
        j["q" + std::to_string(static_cast<int>(std::lround(kReportQuantiles[i] * 100)))] = q[i];
    }
    return j;
}

}  // namespace

std::string report_to_json(const BehaviorReport& rep) {
    ordered_json j;
    j["n_scenarios"] = rep.n_scenarios;
    j["start_position_quantiles"] = rep.start_quantiles ? quantiles_json(*rep.start_quantiles) : ordered_json(nullptr);
    j["end_position_quantiles"] = rep.end_quantiles ? quantiles_json(*rep.end_quantiles) : ordered_json(nullptr);
    if (rep.start_fraction_below) {
        ordered_json f;
        for (std::size_t i = 0; i < kStartFractionLevels.size(); ++i) {
            f[format_double(kStartFractionLevels[i])] = (*rep.start_fraction_below)[i];
        }
        j["start_fraction_below"] = f;
    } else {
        j["start_fraction_below"] = nullptr;
    }
    j["end_fraction_within_lane"] =
        rep.end_fraction_within_lane ? ordered_json(*rep.end_fraction_within_lane) : ordered_json(nullptr);
    j["category_counts"] = rep.category_counts;
    ordered_json pq = ordered_json::object();
    for (const auto& [cat, q] : rep.pet_quantiles) pq[cat] = quantiles_json(q);
    j["pet_quantiles"] = pq;
    j["accepted_gap_mean_s"] = rep.accepted_gap_mean ? ordered_json(*rep.accepted_gap_mean) : ordered_json(nullptr);
    j["accepted_gap_std_s"] = rep.accepted_gap_std ? ordered_json(*rep.accepted_gap_std) : ordered_json(nullptr);
    ordered_json crit = ordered_json::array();
    for (const CriticalEntry& c : rep.critical) {
        crit.push_back({{"object_id", c.object_id}, {"segment", c.segment}, {"min_abs_pet_s", c.min_abs_pet}});
    }
    j["critical"] = crit;
    return j.dump(2) + "\n";
}

void write_ecdf_csv(std::ostream& out, std::span<const ScenarioRecord> records) {
    out << "curve,x,F\n";
    if (records.empty()) return;
    std::vector<double> starts;
    std::vector<double> ends;
    for (const ScenarioRecord& r : records) {
        starts.push_back(r.maneuver_start_pos);
        ends.push_back(r.maneuver_end_pos);
    }
    for (const auto& [name, xs] : {std::pair{"start", starts}, std::pair{"end", ends}}) {
        for (const auto& [x, f] : Ecdf(xs).curve()) out << name << ',' << format_double(x) << ',' << format_double(f) << '\n';
    }
}

void write_pet_histogram_csv(std::ostream& out, std::span<const ScenarioRecord> records, double bin_width) {
    out << "category,bin_lo,bin_hi,count\n";
    std::map<std::string, std::vector<double>> values;
    for (const ScenarioRecord& r : records) {
        if (r.category == Category::Behind || r.category == Category::InFront) {
            if (const auto p = deciding_pet(r)) values[to_string(r.category)].push_back(std::abs(*p));
        } else if (r.category == Category::Into && r.accepted_gap) {
            values[to_string(r.category)].push_back(*r.accepted_gap);
        }
    }
    for (const auto& [cat, xs] : values) {
        const double hi = *std::max_element(xs.begin(), xs.end());
        const auto n_bins = static_cast<std::size_t>(std::floor(hi / bin_width)) + 1;
        std::vector<std::size_t> counts(n_bins, 0);
        for (double x : xs) ++counts[std::min(n_bins - 1, static_cast<std::size_t>(std::floor(x / bin_width)))];
        for (std::size_t b = 0; b < n_bins; ++b) {
            out << cat << ',' << format_double(static_cast<double>(b) * bin_width) << ','
                << format_double(static_cast<double>(b + 1) * bin_width) << ',' << counts[b] << '\n';
        }
    }
}

}  // namespace onramp
