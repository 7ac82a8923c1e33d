#pragma once

// Firm-year CSV ingestion and sample filtering.
//
// Header (exact): firm_id,year,nace,legal_form,employees,importer,exporter,x1,x2,x3,x4,x5,x6
// Rows are dropped when employees < threshold, or total assets (x1+x2),
// revenue (x5) or expenses (x6) is zero. Other zeros are kept for imputation.

#include "codafin/config.hpp"
#include "codafin/records.hpp"

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace codafin {

inline constexpr std::string_view kInputHeader =
    "firm_id,year,nace,legal_form,employees,importer,exporter,x1,x2,x3,x4,x5,x6";

namespace reason {
inline constexpr std::string_view below_employee_threshold = "below-employee-threshold";
inline constexpr std::string_view zero_total_assets = "zero-total-assets";
inline constexpr std::string_view inactive_revenue = "inactive-revenue";
inline constexpr std::string_view zero_expenses = "zero-expenses";
}  // namespace reason

struct ExcludedRow {
    std::size_t line = 0;  // 1-based line number in the input file
    std::string firm_id;
    int year = 0;
    std::string reason;
};

struct Dataset {
    std::vector<FirmYearRecord> records;
    std::vector<std::size_t> lines;  // source line of each kept record
    std::vector<ExcludedRow> excluded;
    std::vector<std::string> warnings;
    std::size_t ingested = 0;
    std::string input_sha256;
};

// Throws DataError (with the line number) on malformed rows and on a
// duplicate (firm_id, year).
Dataset ingest(const std::string& path, const RunConfig& config);
Dataset ingest_text(const std::string& content, const RunConfig& config);

std::string sha256_hex(std::string_view bytes);

// Writes records back in the input schema, full precision.
void write_records_csv(std::ostream& out, const std::vector<FirmYearRecord>& records);

}  // namespace codafin
