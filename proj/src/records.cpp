#include "codafin/records.hpp"

#include <algorithm>
#include <cctype>
#include <span>

namespace codafin {

std::string_view to_string(LegalForm form) {
    switch (form) {
        case LegalForm::public_limited: return "public_limited";
        case LegalForm::private_limited: return "private_limited";
        case LegalForm::other: return "other";
    }
    return "other";
}

std::optional<LegalForm> parse_legal_form(std::string_view text) {
    // Normalize: lowercase, keep letters only.
    std::string key;
    for (char ch : text) {
        const auto u = static_cast<unsigned char>(ch);
        if (std::isalpha(u)) key.push_back(static_cast<char>(std::tolower(u)));
    }
    static constexpr std::string_view kPublic[] = {
        "publiclimited", "public", "publiclimitedcompany", "sa", "plc", "sociedadanonima"};
    static constexpr std::string_view kPrivate[] = {
        "privatelimited", "private", "privatelimitedcompany", "sl", "srl", "ltd",
        "sociedadlimitada", "sociedadderesponsabilidadlimitada"};
    auto in = [&](std::span<const std::string_view> set) {
        return std::find(set.begin(), set.end(), key) != set.end();
    };
    if (in(kPublic)) return LegalForm::public_limited;
    if (in(kPrivate)) return LegalForm::private_limited;
    if (key == "other") return LegalForm::other;
    return std::nullopt;
}

std::vector<std::vector<double>> part_rows(const std::vector<FirmYearRecord>& records) {
    std::vector<std::vector<double>> rows;
    rows.reserve(records.size());
    for (const auto& r : records) rows.emplace_back(r.parts.begin(), r.parts.end());
    return rows;
}

}  // namespace codafin
