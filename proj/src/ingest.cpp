#include "codafin/ingest.hpp"

#include "codafin/errors.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace codafin {

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw NumericalError("sha256 digest failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xf]);
    }
    return out;
}

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw DataError("line " + std::to_string(line) + ": " + what);
}

// Comma-separated fields; double quotes may wrap a field and "" escapes a quote.
std::vector<std::string> split_csv(std::string_view line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(ch);
            }
        } else if (ch == '"' && cur.empty()) {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (quoted) fail(line_no, "unterminated quoted field");
    fields.push_back(std::move(cur));
    return fields;
}

std::string_view trimmed(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

double parse_amount(std::string_view text, std::size_t line, std::string_view column) {
    text = trimmed(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
        fail(line, "column " + std::string(column) + ": '" + std::string(text) +
                       "' is not a finite decimal number");
    }
    if (v < 0.0) {
        fail(line, "column " + std::string(column) + " is negative; accounting parts must be >= 0");
    }
    return v;
}

template <typename Int>
Int parse_integer(std::string_view text, std::size_t line, std::string_view column) {
    text = trimmed(text);
    Int v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        fail(line, "column " + std::string(column) + ": '" + std::string(text) +
                       "' is not an integer");
    }
    return v;
}

// true/false, yes/no, 1/0, or a declared trade volume (positive -> true).
bool parse_flag(std::string_view text, std::size_t line, std::string_view column) {
    text = trimmed(text);
    std::string lower;
    for (char ch : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    if (lower == "true" || lower == "yes" || lower == "y") return true;
    if (lower == "false" || lower == "no" || lower == "n" || lower.empty()) return false;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(lower.data(), lower.data() + lower.size(), v);
    if (ec == std::errc{} && ptr == lower.data() + lower.size() && std::isfinite(v) && v >= 0.0) {
        return v > 0.0;
    }
    fail(line, "column " + std::string(column) + ": '" + std::string(text) + "' is not a boolean");
}

}  // namespace

Dataset ingest_text(const std::string& content, const RunConfig& config) {
    Dataset ds;
    ds.input_sha256 = sha256_hex(content);

    std::istringstream in(content);
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::set<std::pair<std::string, int>> seen;
    static constexpr std::string_view kParts[] = {"x1", "x2", "x3", "x4", "x5", "x6"};

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!header_seen) {
            std::string_view h = line;
            if (h.starts_with("\xEF\xBB\xBF")) h.remove_prefix(3);
            if (h != kInputHeader) {
                fail(line_no, "header must be exactly '" + std::string(kInputHeader) + "'");
            }
            header_seen = true;
            continue;
        }
        if (trimmed(line).empty()) continue;
        const auto f = split_csv(line, line_no);
        if (f.size() != 13) {
            fail(line_no, "expected 13 fields, found " + std::to_string(f.size()));
        }
        FirmYearRecord r;
        r.firm_id = std::string(trimmed(f[0]));
        if (r.firm_id.empty()) fail(line_no, "empty firm_id");
        r.year = parse_integer<int>(f[1], line_no, "year");
        r.nace = std::string(trimmed(f[2]));
        if (r.nace.empty()) fail(line_no, "empty nace code");
        if (auto form = parse_legal_form(f[3])) {
            r.legal_form = *form;
        } else {
            r.legal_form = LegalForm::other;
            ds.warnings.push_back("line " + std::to_string(line_no) + ": legal form '" +
                                  std::string(trimmed(f[3])) + "' mapped to other");
        }
        r.employees = parse_integer<std::int64_t>(f[4], line_no, "employees");
        if (r.employees < 0) fail(line_no, "employees must be >= 0");
        r.importer = parse_flag(f[5], line_no, "importer");
        r.exporter = parse_flag(f[6], line_no, "exporter");
        for (std::size_t j = 0; j < kStatementParts; ++j) {
            r.parts[j] = parse_amount(f[7 + j], line_no, kParts[j]);
        }
        if (!seen.emplace(r.firm_id, r.year).second) {
            fail(line_no, "duplicate (firm_id, year) = (" + r.firm_id + ", " +
                              std::to_string(r.year) + ")");
        }
        ++ds.ingested;

        std::string_view why;
        if (r.employees < config.employee_threshold) why = reason::below_employee_threshold;
        else if (r.total_assets() == 0.0) why = reason::zero_total_assets;
        else if (r.parts[4] == 0.0) why = reason::inactive_revenue;
        else if (r.parts[5] == 0.0) why = reason::zero_expenses;

        if (!why.empty()) {
            ds.excluded.push_back(ExcludedRow{line_no, r.firm_id, r.year, std::string(why)});
        } else {
            ds.records.push_back(std::move(r));
            ds.lines.push_back(line_no);
        }
    }
    if (!header_seen) fail(1, "empty input (missing header)");
    return ds;
}

Dataset ingest(const std::string& path, const RunConfig& config) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read input file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ingest_text(ss.str(), config);
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

}  // namespace

void write_records_csv(std::ostream& out, const std::vector<FirmYearRecord>& records) {
    out << kInputHeader << '\n';
    for (const auto& r : records) {
        out << csv_field(r.firm_id) << ',' << r.year << ',' << csv_field(r.nace) << ','
            << to_string(r.legal_form) << ',' << r.employees << ','
            << (r.importer ? "true" : "false") << ',' << (r.exporter ? "true" : "false");
        for (double x : r.parts) out << ',' << format_double(x);
        out << '\n';
    }
}

}  // namespace codafin
