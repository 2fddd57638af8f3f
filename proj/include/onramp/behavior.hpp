#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "onramp/scenario.hpp"

namespace onramp {

/// Empirical CDF, right-continuous: F(x) = #{samples <= x} / n.
class Ecdf {
public:
    /// Throws std::invalid_argument on an empty or non-finite sample.
    explicit Ecdf(std::vector<double> samples);

    double operator()(double x) const;
    /// Linear interpolation between the closest order statistics,
    /// h = (n - 1) p. Throws std::invalid_argument for p outside [0, 1].
    double quantile(double p) const;

    const std::vector<double>& sorted() const { return sorted_; }
    std::size_t size() const { return sorted_.size(); }

    /// Step curve as (x, F(x)) pairs at each distinct sample.
    std::vector<std::pair<double, double>> curve() const;

private:
    std::vector<double> sorted_;
};

inline constexpr std::array<double, 4> kReportQuantiles = {0.25, 0.50, 0.75, 0.90};
inline constexpr std::array<double, 3> kStartFractionLevels = {0.25, 0.50, 0.75};

using Quantiles = std::array<double, kReportQuantiles.size()>;

struct CriticalEntry {
    std::int64_t object_id = 0;
    int segment = 0;
    double min_abs_pet = 0.0;
};

struct BehaviorReport {
    std::size_t n_scenarios = 0;
    std::optional<Quantiles> start_quantiles;
    std::optional<Quantiles> end_quantiles;
    /// Fraction of start positions strictly below each kStartFractionLevels entry.
    std::optional<std::array<double, kStartFractionLevels.size()>> start_fraction_below;
    /// Fraction of end positions <= 1 (finished within the acceleration lane).
    std::optional<double> end_fraction_within_lane;
    std::map<std::string, std::size_t> category_counts;
    /// |PET| of the deciding challenger for behind / in_front, accepted gap for into.
    std::map<std::string, Quantiles> pet_quantiles;
    std::optional<double> accepted_gap_mean;
    std::optional<double> accepted_gap_std;
    std::vector<CriticalEntry> critical;
};

/// Smallest-|PET| non-degenerate challenger value, if any.
std::optional<double> deciding_pet(const ScenarioRecord& rec);

BehaviorReport behavior_report(std::span<const ScenarioRecord> records);

std::string report_to_json(const BehaviorReport& report);

/// `curve,x,F` rows for the start and end position ECDFs.
void write_ecdf_csv(std::ostream& out, std::span<const ScenarioRecord> records);

/// `category,bin_lo,bin_hi,count` with 1 s bins starting at 0.
void write_pet_histogram_csv(std::ostream& out, std::span<const ScenarioRecord> records, double bin_width = 1.0);

}  // namespace onramp
