#pragma once

// Financial ratios of a six-part statement (x1..x6) and of compositional
// centers. Because the ratio of geometric means equals the geometric mean
// of ratios, evaluating the ratio formulas at a compositional center yields
// the industry (or group) mean ratios directly.

#include "codafin/composition.hpp"
#include "codafin/records.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace codafin {

class FinancialStatement {
public:
    // Throws InvalidComposition unless all six parts are finite and > 0.
    explicit FinancialStatement(const std::array<double, kStatementParts>& parts);
    explicit FinancialStatement(std::span<const double> parts);

    double non_current_assets() const { return parts_[0]; }
    double current_assets() const { return parts_[1]; }
    double non_current_liabilities() const { return parts_[2]; }
    double current_liabilities() const { return parts_[3]; }
    double revenue() const { return parts_[4]; }
    double expenses() const { return parts_[5]; }

    double total_assets() const { return parts_[0] + parts_[1]; }
    double total_debt() const { return parts_[2] + parts_[3]; }
    double equity() const { return total_assets() - total_debt(); }
    const std::array<double, kStatementParts>& parts() const { return parts_; }

private:
    std::array<double, kStatementParts> parts_;
};

// leverage and roe are nullopt when equity <= 0.
struct RatioSet {
    double turnover = 0.0;                // x5 / (x1 + x2)
    double current_asset_turnover = 0.0;  // x5 / x2
    double profit_margin = 0.0;           // (x5 - x6) / x5
    std::optional<double> leverage;       // (x1 + x2) / (x1 + x2 - x3 - x4)
    double roa = 0.0;                     // (x5 - x6) / (x1 + x2)
    std::optional<double> roe;            // (x5 - x6) / (x1 + x2 - x3 - x4)
    double debt = 0.0;                    // (x3 + x4) / (x1 + x2)
    double short_term_debt = 0.0;         // x4 / (x1 + x2)
    double long_term_solvency = 0.0;      // (x1 + x2) / (x3 + x4)
    double short_term_solvency = 0.0;     // x2 / x4
    double asset_tangibility = 0.0;       // x1 / x2
    double debt_maturity = 0.0;           // x3 / x4

    static constexpr std::size_t count = 12;
    // Display order used in reports.
    std::array<std::optional<double>, count> values() const;
};

std::span<const std::string_view> ratio_names();

RatioSet firm_ratios(const FinancialStatement& s);
RatioSet center_ratios(const CompositionalCenter& c);

enum class GroupKey { year, nace, cluster, year_nace };

std::string_view to_string(GroupKey key);
// Throws ConfigError for unknown keys.
GroupKey parse_group_key(std::string_view text);

struct GroupLabel {
    std::optional<int> year;
    std::optional<std::string> nace;
    std::optional<int> cluster;

    std::string display() const;
    auto operator<=>(const GroupLabel&) const = default;
};

struct GroupRatios {
    GroupLabel label;
    std::size_t size = 0;
    CompositionalCenter center;
    RatioSet ratios;
};

// Groups are emitted in lexicographic (year, nace, cluster) order. The
// cluster key needs one cluster id per record in `clusters`.
std::vector<GroupRatios> grouped_center_ratios(std::span<const FirmYearRecord> rows, GroupKey key,
                                               std::span<const int> clusters = {});

}  // namespace codafin
