#pragma once

#include "levlab/dichotomy.hpp"
#include "levlab/dyadic.hpp"
#include "levlab/weights.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace levlab::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
/// Hash of the compact dump of the config, as 16 hex digits.
std::string config_hash(const Json& config);
/// Fields every report starts with: schema_version, command, config, config_hash, seed.
Json header(const std::string& command, const Json& config, std::uint64_t seed);

/// Finite doubles as numbers; inf and nan as the strings "inf", "-inf", "nan".
Json number(double x);
/// Shortest round-trip text of a double (same rule as the JSON dump).
std::string format_double(double x);

Json to_json(const LevinsonVerdict& v);
Json to_json(const dichotomy::DensityReport& r, bool with_span = false);
Json to_json(const dichotomy::EnergyBound& b);
Json to_json(const dichotomy::LadderReport& r);
Json to_json(const dichotomy::SincProduct& p);
/// Parameters and certificates; the sampled payload goes to CSV.
Json to_json(const dichotomy::WitnessFunction& w);
Json to_json(const dichotomy::EstimateReport& r);
Json to_json(const dyadic::NodeWeights& w);

/// Pretty JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const Json& j);

/// CSV whose first line is "# " followed by the compact header JSON.
void write_csv(const std::filesystem::path& path, const Json& head, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

} // namespace levlab::io
