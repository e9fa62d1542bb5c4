#pragma once

#include "hypadams/adams.hpp"
#include "hypadams/functional.hpp"
#include "hypadams/kernels.hpp"

#include <json.hpp>

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace hypadams::report {

using Json = nlohmann::ordered_json;

// 17 significant digits, enough to round-trip a double.
std::string number(double x);

// Header row, then one comma-separated row per entry.
void write_csv(std::ostream& out, std::span<const std::string> header, const std::vector<std::vector<double>>& rows);

Json to_json(const TheoremReport& r);
Json to_json(const BoundReport& r);
Json to_json(const AdamsReport& r);
Json to_json(const PlancherelCheck& c);
Json to_json(const ConformalIdentityCheck& c);
Json to_json(const PotentialRepresentationCheck& c);

// Two-space indentation, trailing newline; non-finite numbers become null.
std::string dump(const Json& j);

} // namespace hypadams::report
