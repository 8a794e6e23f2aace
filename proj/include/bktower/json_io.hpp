#pragma once

#include <memory>
#include <string>

#include "bktower/chain.hpp"
#include "json.hpp"

namespace bkt {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Canonical text form: sorted keys, two-space indent, trailing newline.
/// deserialize(serialize(x)) = x byte-for-byte on normalised values.
std::string canonical_dump(const json& j);

/// Parse with library errors mapped to Err::ParseError.
json parse_json_text(const std::string& text);
json load_json_file(const std::string& path);
/// Empty path or "-" writes to stdout.
void write_json_output(const std::string& path, const json& j);

// ---- elements -------------------------------------------------------------
//
// {"coeffs": [[degree, valuation, "unit"], ...], "kappa": k, "level": n,
//  "scale" is implicit in the valuations, "tag": "frakS"|"S"|"fracS",
//  "udeg": u};  kappa = -1 encodes an exact element, udeg = -1 a complete
// polynomial.  Units are decimal strings so windows of any size fit.

json element_to_json(const TowerElement& x);
TowerElement element_from_json(const json& j, const PrecisionContext& ctx);

// ---- context --------------------------------------------------------------

json context_to_json(const PrecisionContext& ctx);
std::shared_ptr<PrecisionContext> context_from_json(const json& j);

// ---- modules --------------------------------------------------------------
//
// {p, e, E, N, M, depth, d, r, A, B, semantics, schema_version} with A, B as
// row-major arrays of serialized elements and "semantics" discriminating the
// base ring: "frakS" for the power-series side, "S" for the divided-power
// side.

json module_to_json(const FilteredBkModule& m, bool divided_power_semantics = false);

struct ModuleDoc {
  std::shared_ptr<PrecisionContext> ctx;  // owns the context the module points at
  FilteredBkModule mod;
  bool divided_power_semantics = false;
};
ModuleDoc module_from_json(const json& j);

// ---- chains ---------------------------------------------------------------
//
// {"module_ref": <module object>, "depth": D,
//  "elems": [{"n": 0, "w": [element, ...]}, ...], "schema_version": 1}

json chain_to_json(const ModuleChain& c, bool divided_power_semantics = false);

struct ChainDoc {
  std::shared_ptr<PrecisionContext> ctx;
  ModuleChain chain;
  bool divided_power_semantics = false;
};
ChainDoc chain_from_json(const json& j);

}  // namespace bkt
