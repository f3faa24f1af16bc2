#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "meshinit/geomnet.hpp"

namespace meshinit {

/// Raised for unreadable files and malformed network documents.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// JSON document:
///   {"side": "<decimal>", "radius": "<decimal>", "seed": <integer>,
///    "nodes": [[x, y], ...]}
/// side and radius are strings, coordinates are numbers; every value is
/// written with round-trip precision.
std::string network_to_json(const Network& net);
Network network_from_json(const std::string& text);

void write_network(std::ostream& out, const Network& net);
Network read_network(std::istream& in);

/// Shortest decimal string that parses back to exactly `v`.
std::string round_trip_decimal(double v);

}  // namespace meshinit
