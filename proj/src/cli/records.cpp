#include <cmath>
#include <istream>
#include <string>

#include "json.hpp"

#include "obbreg/cli.hpp"
#include "obbreg/geometry.hpp"

namespace obbreg::cli {
namespace {

using nlohmann::json;

template <std::size_t N>
std::array<double, N> numbers(const json& j, std::string_view field, std::string_view where) {
  if (!j.is_array() || j.size() != N) {
    throw InputError(std::string(where) + ": field \"" + std::string(field) + "\" must be an array of " +
                     std::to_string(N) + " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    if (!j[i].is_number()) {
      throw InputError(std::string(where) + ": field \"" + std::string(field) + "[" + std::to_string(i) +
                       "]\" is not a number");
    }
    out[i] = j[i].get<double>();
    if (!std::isfinite(out[i])) {
      throw InputError(std::string(where) + ": field \"" + std::string(field) + "[" + std::to_string(i) +
                       "]\" is not finite");
    }
  }
  return out;
}

}  // namespace

BoxRecord parse_record(std::string_view text, std::string_view where) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string(where) + ": invalid JSON (" + e.what() + ")");
  }
  if (!j.is_object()) throw InputError(std::string(where) + ": record must be a JSON object");

  BoxRecord r;
  const bool has_rbox = j.contains("rbox");
  const bool has_quad = j.contains("quad");
  if (has_rbox == has_quad) {
    throw InputError(std::string(where) + ": exactly one of fields \"rbox\" and \"quad\" is required");
  }
  if (has_rbox) {
    auto v = numbers<5>(j["rbox"], "rbox", where);
    if (!(v[2] > 0.0)) throw InputError(std::string(where) + ": field \"rbox[2]\" (w) must be positive");
    if (!(v[3] > 0.0)) throw InputError(std::string(where) + ": field \"rbox[3]\" (h) must be positive");
    if (!(v[4] >= -90.0 && v[4] < 0.0)) {
      throw InputError(std::string(where) + ": field \"rbox[4]\" (theta_deg) must lie in [-90, 0)");
    }
    r.rbox_deg = v;
  } else {
    r.quad = numbers<8>(j["quad"], "quad", where);
  }
  if (j.contains("score")) {
    if (!j["score"].is_number()) throw InputError(std::string(where) + ": field \"score\" is not a number");
    const double s = j["score"].get<double>();
    if (!(s >= 0.0 && s <= 1.0)) throw InputError(std::string(where) + ": field \"score\" must lie in [0, 1]");
    r.score = s;
  }
  if (j.contains("class_id")) {
    if (!j["class_id"].is_number_integer()) {
      throw InputError(std::string(where) + ": field \"class_id\" must be an integer");
    }
    r.class_id = j["class_id"].get<int>();
  }
  return r;
}

std::vector<BoxRecord> parse_records(std::istream& in, std::string_view source) {
  std::vector<BoxRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_record(line, std::string(source) + ":" + std::to_string(lineno)));
  }
  return out;
}

Quad record_quad(const BoxRecord& r, std::string_view where) {
  try {
    if (r.rbox_deg) {
      const auto& v = *r.rbox_deg;
      return rbox5_to_quad({v[0], v[1], v[2], v[3], deg_to_rad(v[4])});
    }
    const auto& v = *r.quad;
    return order_corners({Point2{v[0], v[1]}, Point2{v[2], v[3]}, Point2{v[4], v[5]}, Point2{v[6], v[7]}});
  } catch (const DegenerateQuad& e) {
    throw InputError(std::string(where) + ": field \"quad\": " + e.what());
  }
}

RBox5 record_rbox(const BoxRecord& r, std::string_view where) {
  if (r.rbox_deg) {
    const auto& v = *r.rbox_deg;
    return {v[0], v[1], v[2], v[3], deg_to_rad(v[4])};
  }
  try {
    return quad_to_rbox5(record_quad(r, where));
  } catch (const NotARectangle& e) {
    throw InputError(std::string(where) + ": field \"quad\": " + e.what());
  }
}

}  // namespace obbreg::cli
