#pragma once

#include <filesystem>

#include "json.hpp"

#include "pdo/sampling.hpp"

namespace pdo {

/// {"grid": {"n", "L", "N"}, "k", "decay", "values"} where values holds one
/// entry per grid point (row-major flat order), each a k x k array of rows
/// of [re, im] pairs.
nlohmann::ordered_json to_json(const ModuleFunction& f);
/// Throws InvalidInput when the document is malformed or its shape does not
/// match the declared grid and k.
ModuleFunction module_function_from_json(const nlohmann::ordered_json& j);

/// As for fields with "space": "phase", a second grid "grid_xi" and values
/// indexed [x point][xi point].
nlohmann::ordered_json to_json(const SampledSymbol& a);
SampledSymbol sampled_symbol_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json to_json(const GridSpec& g);
GridSpec grid_from_json(const nlohmann::ordered_json& j);

/// Reads a JSON document; throws Error naming the path on I/O or parse failure.
nlohmann::ordered_json read_json_file(const std::filesystem::path& path);
void write_json_file(const nlohmann::ordered_json& j, const std::filesystem::path& path);

}  // namespace pdo
