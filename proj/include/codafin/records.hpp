#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace codafin {

inline constexpr std::size_t kStatementParts = 6;

enum class LegalForm { public_limited, private_limited, other };

std::string_view to_string(LegalForm form);
// Maps common spellings (SA, S.L., "sociedad anonima", ...) onto the enum.
// Returns nullopt for unrecognized text; the caller decides how to report it.
std::optional<LegalForm> parse_legal_form(std::string_view text);

// One firm-year: identifiers, covariates and the six accounting parts
//   x1 non-current assets, x2 current assets, x3 non-current liabilities,
//   x4 current liabilities, x5 revenue, x6 expenses.
struct FirmYearRecord {
    std::string firm_id;
    int year = 0;
    std::string nace;
    LegalForm legal_form = LegalForm::other;
    std::int64_t employees = 0;
    bool importer = false;
    bool exporter = false;
    std::array<double, kStatementParts> parts{};

    double total_assets() const { return parts[0] + parts[1]; }
};

std::vector<std::vector<double>> part_rows(const std::vector<FirmYearRecord>& records);

}  // namespace codafin
