#include "codafin/ratios.hpp"

#include "codafin/errors.hpp"

#include <algorithm>
#include <map>

namespace codafin {

FinancialStatement::FinancialStatement(const std::array<double, kStatementParts>& parts)
    : parts_(parts) {
    validate_parts(parts_);
}

FinancialStatement::FinancialStatement(std::span<const double> parts) {
    if (parts.size() != kStatementParts) {
        throw DimensionMismatch("a financial statement has 6 parts, got " +
                                std::to_string(parts.size()));
    }
    std::copy(parts.begin(), parts.end(), parts_.begin());
    validate_parts(parts_);
}

std::array<std::optional<double>, RatioSet::count> RatioSet::values() const {
    return {turnover,     current_asset_turnover, profit_margin,      leverage,
            roa,          roe,                    debt,               short_term_debt,
            long_term_solvency, short_term_solvency, asset_tangibility, debt_maturity};
}

std::span<const std::string_view> ratio_names() {
    static constexpr std::string_view kNames[RatioSet::count] = {
        "turnover",     "current_asset_turnover", "profit_margin",       "leverage",
        "roa",          "roe",                    "debt",                "short_term_debt",
        "long_term_solvency", "short_term_solvency", "asset_tangibility", "debt_maturity"};
    return kNames;
}

namespace {

RatioSet ratios_of(std::span<const double> x) {
    const double assets = x[0] + x[1];
    const double debt = x[2] + x[3];
    const double equity = assets - debt;
    const double profit = x[4] - x[5];
    RatioSet r;
    r.turnover = x[4] / assets;
    r.current_asset_turnover = x[4] / x[1];
    r.profit_margin = profit / x[4];
    r.roa = profit / assets;
    if (equity > 0.0) {
        r.leverage = assets / equity;
        r.roe = profit / equity;
    }
    r.debt = debt / assets;
    r.short_term_debt = x[3] / assets;
    r.long_term_solvency = assets / debt;
    r.short_term_solvency = x[1] / x[3];
    r.asset_tangibility = x[0] / x[1];
    r.debt_maturity = x[2] / x[3];
    return r;
}

}  // namespace

RatioSet firm_ratios(const FinancialStatement& s) { return ratios_of(s.parts()); }

RatioSet center_ratios(const CompositionalCenter& c) {
    if (c.size() != kStatementParts) {
        throw DimensionMismatch("center_ratios needs a 6-part center, got " +
                                std::to_string(c.size()));
    }
    return ratios_of(c.parts());
}

std::string_view to_string(GroupKey key) {
    switch (key) {
        case GroupKey::year: return "year";
        case GroupKey::nace: return "nace";
        case GroupKey::cluster: return "cluster";
        case GroupKey::year_nace: return "year_nace";
    }
    return "year";
}

GroupKey parse_group_key(std::string_view text) {
    if (text == "year") return GroupKey::year;
    if (text == "nace") return GroupKey::nace;
    if (text == "cluster") return GroupKey::cluster;
    if (text == "year_nace" || text == "year*nace" || text == "yearxnace") return GroupKey::year_nace;
    throw ConfigError("unknown group key '" + std::string(text) +
                      "' (expected year, nace, cluster or year_nace)");
}

std::string GroupLabel::display() const {
    std::string out;
    auto add = [&](const std::string& part) {
        if (!out.empty()) out += '/';
        out += part;
    };
    if (year) add(std::to_string(*year));
    if (nace) add(*nace);
    if (cluster) add("cluster " + std::to_string(*cluster));
    return out.empty() ? "all" : out;
}

std::vector<GroupRatios> grouped_center_ratios(std::span<const FirmYearRecord> rows, GroupKey key,
                                               std::span<const int> clusters) {
    if (rows.empty()) throw DataError("grouped_center_ratios: no rows");
    if (key == GroupKey::cluster && clusters.size() != rows.size()) {
        throw DimensionMismatch("grouping by cluster needs one cluster id per row");
    }
    std::map<GroupLabel, std::vector<std::vector<double>>> groups;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        GroupLabel label;
        switch (key) {
            case GroupKey::year: label.year = rows[i].year; break;
            case GroupKey::nace: label.nace = rows[i].nace; break;
            case GroupKey::cluster: label.cluster = clusters[i]; break;
            case GroupKey::year_nace:
                label.year = rows[i].year;
                label.nace = rows[i].nace;
                break;
        }
        groups[label].emplace_back(rows[i].parts.begin(), rows[i].parts.end());
    }
    std::vector<GroupRatios> out;
    out.reserve(groups.size());
    for (const auto& [label, members] : groups) {
        CompositionalCenter c = center_of_rows(members);
        RatioSet r = center_ratios(c);
        out.push_back(GroupRatios{label, members.size(), std::move(c), r});
    }
    return out;
}

}  // namespace codafin
