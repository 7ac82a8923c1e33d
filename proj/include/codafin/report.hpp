#pragma once

#include "codafin/pipeline.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace codafin {

// Writes every report the result has data for into out_dir (created if
// missing) and returns the file names written, in write order. Machine
// tables (.csv, .geometry, .summary) carry full precision; human tables
// (.txt) are rounded to 3 decimals. Every file embeds the config echo,
// seed and input digest. Throws DataError when out_dir is not writable.
std::vector<std::string> emit_reports(const RunResult& result, const std::filesystem::path& out_dir);

std::string format_fixed(double v, int decimals);

}  // namespace codafin
