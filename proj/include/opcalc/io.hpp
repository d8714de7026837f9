#pragma once

#include <filesystem>

#include "json.hpp"
#include "opcalc/evolution.hpp"
#include "opcalc/linalg.hpp"

namespace opcalc::io {

using json = nlohmann::json;

/// {"dim": d, "entries": [[re, im], ...]} with d*d row-major pairs.
json to_json(const Operator& m);
Operator operator_from_json(const json& j);

/// Generator description:
///   {"dim": d, "structure": "constant" | "commuting" | "general",
///    "matrix": <matrix>             (constant; general, see below)
///    "base": <matrix>, "profile": "<expr in t>"   (commuting)
///    "horizon": [0, T]}
/// For "general", matrix entries may also be expression strings in t or
/// [re_expr, im_expr] pairs; their t-derivatives are then exact.
evolution::GeneratorFamily generator_from_json(const json& j);

json read_json_file(const std::filesystem::path& path);

}  // namespace opcalc::io
