#pragma once

#include "hsprg/common.hpp"
#include "hsprg/halfspace.hpp"
#include "hsprg/kwise.hpp"
#include "hsprg/sandwich.hpp"
#include "hsprg/schedule.hpp"
#include "hsprg/unipoly.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace hsprg {

// Field order of every JSON object is fixed (ordered_json), so identical
// inputs give byte-identical output.
using Json = nlohmann::ordered_json;

/// {"weights": [...], "theta": ...}
Json to_json(const Halfspace& h);
Halfspace halfspace_from_json(const Json& j);

/// {"n", "k", "s", "construction", "modulus"}
Json to_json(const SpaceDescriptor& d);
SpaceDescriptor descriptor_from_json(const Json& j);

/// {"interval": [lo, hi], "basis": "chebyshev", "coeffs": [decimal strings]}
Json to_json(const UniPoly& p);
/// Coefficients are parsed at `bits` of precision (0: enough for the longest
/// string).
UniPoly poly_from_json(const Json& j, unsigned bits = 0);

/// {"branch", "gap_u", "gap_l", "bound_10eps", "mode", "ci"}; ci is null for
/// exhaustive runs.
Json to_json(const GapReport& g);

Json to_json(const Rational& r);

struct RunConfig {
    std::string command;
    double eps = 0.2;
    double C_const = 1.0;
    double c_const = 1.0;
    ScheduleMode mode = ScheduleMode::empirical;
    LogBase log_base = LogBase::natural;
    std::string input;
    std::string output;
    unsigned precision_bits = 0;
    std::optional<std::uint64_t> rng_seed;
    Limits limits;

    bool operator==(const RunConfig& other) const;
};

Json to_json(const RunConfig& c);
RunConfig config_from_json(const Json& j);

/// Reads and parses a JSON file; throws InvalidInput with the path on failure.
Json read_json_file(const std::string& path);

/// Writes text to path ("-" or empty means the given fallback stream is used
/// by the caller). Throws Error on IO failure.
void write_text_file(const std::string& path, const std::string& text);

} // namespace hsprg
