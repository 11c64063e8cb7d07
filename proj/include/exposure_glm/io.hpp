#pragma once

// CSV ingestion and deterministic file output.
//
// Portfolio files: header `contract_id,exposure,loss_cost,x1,...,xq`, one
// contract per row, UTF-8, '.' as decimal separator, no quoting. Count files
// use `count` in place of `loss_cost`.

#include <exposure_glm/claim_count.hpp>
#include <exposure_glm/model.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace exposure_glm::io {

/// 17 significant digits ("%.17g"), enough to round-trip any double.
std::string format_number(double value);

Portfolio ingest_csv(const std::filesystem::path& path);
Portfolio parse_portfolio_csv(std::string_view text);

CountData ingest_count_csv(const std::filesystem::path& path);
CountData parse_count_csv(std::string_view text);

std::string portfolio_to_csv(const Portfolio& portfolio);

/// Writes to a temporary sibling file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace exposure_glm::io
