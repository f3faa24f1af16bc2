#include "meshinit/network_io.hpp"

#include <charconv>
#include <istream>
#include <iterator>
#include <ostream>

#include <json.hpp>

namespace meshinit {

std::string round_trip_decimal(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_decimal(const nlohmann::json& field, const char* name) {
  if (field.is_string()) {
    const std::string& s = field.get_ref<const std::string&>();
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
      throw FormatError(std::string("network file: bad decimal in '") + name + "'");
    return v;
  }
  if (field.is_number()) return field.get<double>();
  throw FormatError(std::string("network file: '") + name + "' must be a decimal string");
}

}  // namespace

std::string network_to_json(const Network& net) {
  nlohmann::ordered_json doc;
  doc["side"] = round_trip_decimal(net.side());
  doc["radius"] = round_trip_decimal(net.radius());
  doc["seed"] = net.seed();
  auto nodes = nlohmann::ordered_json::array();
  for (const Point& p : net.nodes()) nodes.push_back({p.x, p.y});
  doc["nodes"] = std::move(nodes);
  return doc.dump() + "\n";
}

Network network_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("network file: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("network file: top level must be an object");
  for (const char* key : {"side", "radius", "seed", "nodes"}) {
    if (!doc.contains(key)) throw FormatError(std::string("network file: missing '") + key + "'");
  }
  const double side = parse_decimal(doc["side"], "side");
  const double radius = parse_decimal(doc["radius"], "radius");
  if (!doc["seed"].is_number_integer()) throw FormatError("network file: 'seed' must be an integer");
  const auto seed = doc["seed"].get<std::uint64_t>();
  if (!doc["nodes"].is_array()) throw FormatError("network file: 'nodes' must be an array");
  std::vector<Point> nodes;
  nodes.reserve(doc["nodes"].size());
  for (const auto& pair : doc["nodes"]) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
      throw FormatError("network file: each node must be an [x, y] pair");
    nodes.push_back(Point{pair[0].get<double>(), pair[1].get<double>()});
  }
  if (nodes.empty()) throw FormatError("network file: no nodes");
  try {
    return Network(side, radius, seed, std::move(nodes));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("network file: ") + e.what());
  }
}

void write_network(std::ostream& out, const Network& net) { out << network_to_json(net); }

Network read_network(std::istream& in) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return network_from_json(text);
}

}  // namespace meshinit
