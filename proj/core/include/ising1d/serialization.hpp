#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "ising1d/bounds.hpp"
#include "ising1d/chain_model.hpp"
#include "ising1d/random_current.hpp"

namespace ising1d {

// Instance files are JSON objects {"J": [...], "h": [...]}. Anything that
// does not decode to a valid ChainParams (bad syntax, wrong types, length
// mismatch, non-finite entries) raises ParseError.

[[nodiscard]] ChainParams chain_params_from_json(std::string_view text);
[[nodiscard]] ChainParams load_chain_params(const std::filesystem::path& path);
[[nodiscard]] std::string to_json(const ChainParams& params);

/// Flat object: i, j, exact, thm1, thm2, lemma3, zero_field and the four
/// slack_* keys; absent bounds are null. exact_enum is added when present.
[[nodiscard]] std::string to_json(const BoundReport& report);

/// Column order shared by every BoundReport CSV writer.
[[nodiscard]] std::string bound_report_csv_header();
/// One row without trailing newline; absent bounds are empty cells.
[[nodiscard]] std::string to_csv_row(const BoundReport& report);

/// {"mean": ..., "std_error": ..., "samples": ...}
[[nodiscard]] std::string to_json(const McEstimate& estimate);
[[nodiscard]] McEstimate mc_estimate_from_json(std::string_view text);

/// Shortest round-trip-safe text: 17 significant digits, "%.17g".
[[nodiscard]] std::string format_real(double value);

}  // namespace ising1d
