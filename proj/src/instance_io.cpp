#include "bbfair/instance_io.hpp"

#include "bbfair/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace bbfair {

using nlohmann::json;

namespace {

std::optional<double> parse_decimal(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_scalar(std::string_view s) {
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) return parse_decimal(s);
  const auto p = parse_decimal(s.substr(0, slash));
  const auto q = parse_decimal(s.substr(slash + 1));
  if (!p || !q || *q == 0.0) return std::nullopt;
  return *p / *q;
}

std::string location(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json parse_json(std::string_view text, const std::string& what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    if (const auto pos = msg.find(": ", msg.find("parse error")); pos != std::string::npos) msg = msg.substr(pos + 2);
    throw InputError(what + ": malformed JSON at " + location(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + msg);
  }
}

std::vector<std::string> names(const json& doc, const char* key) {
  std::vector<std::string> out;
  if (!doc.contains(key)) return out;
  const auto& a = doc.at(key);
  if (!a.is_array()) throw InputError(std::string("field '") + key + "': expected an array of strings");
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!a[k].is_string())
      throw InputError(std::string("field '") + key + "[" + std::to_string(k) + "]': expected a string");
    out.push_back(a[k].get<std::string>());
  }
  return out;
}

}  // namespace

double parse_number(const json& value, const std::string& field) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const auto s = value.get<std::string>();
    if (const auto v = parse_scalar(s)) return *v;
    throw InputError("field '" + field + "': cannot parse \"" + s + "\" as a number or fraction p/q");
  }
  throw InputError("field '" + field + "': expected a number or fraction string, got " + value.type_name());
}

ProblemInstance parse_instance(std::string_view text) {
  const json doc = parse_json(text, "instance");
  if (!doc.is_object()) throw InputError("instance: top-level value must be an object");
  for (const char* key : {"entitlements", "requirements"})
    if (!doc.contains(key)) throw InputError(std::string("instance: missing field '") + key + "'");

  const auto& e = doc.at("entitlements");
  if (!e.is_array()) throw InputError("field 'entitlements': expected an array");
  const auto& r = doc.at("requirements");
  if (!r.is_array()) throw InputError("field 'requirements': expected an array of rows");

  ProblemInstance inst;
  inst.entitlements.resize(static_cast<Eigen::Index>(e.size()));
  for (std::size_t i = 0; i < e.size(); ++i)
    inst.entitlements[static_cast<Eigen::Index>(i)] = parse_number(e[i], "entitlements[" + std::to_string(i) + "]");

  const std::size_t m = r.empty() || !r[0].is_array() ? 0 : r[0].size();
  inst.requirements.resize(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < r.size(); ++i) {
    const std::string row = "requirements[" + std::to_string(i) + "]";
    if (!r[i].is_array()) throw InputError("field '" + row + "': expected an array");
    if (r[i].size() != m)
      throw InputError("field '" + row + "': has " + std::to_string(r[i].size()) + " entries, expected " +
                       std::to_string(m));
    for (std::size_t j = 0; j < m; ++j)
      inst.requirements(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          parse_number(r[i][j], row + "[" + std::to_string(j) + "]");
  }
  inst.user_names = names(doc, "users");
  inst.resource_names = names(doc, "resources");
  return inst;
}

ProblemInstance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_instance(buf.str());
  } catch (const InputError& err) {
    throw InputError(path + ": " + err.what());
  }
}

json instance_to_json(const ProblemInstance& inst) {
  json doc;
  doc["entitlements"] = std::vector<double>(inst.entitlements.data(), inst.entitlements.data() + inst.entitlements.size());
  json rows = json::array();
  for (Eigen::Index i = 0; i < inst.requirements.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < inst.requirements.cols(); ++j) row.push_back(inst.requirements(i, j));
    rows.push_back(std::move(row));
  }
  doc["requirements"] = std::move(rows);
  if (!inst.user_names.empty()) doc["users"] = inst.user_names;
  if (!inst.resource_names.empty()) doc["resources"] = inst.resource_names;
  return doc;
}

Allocation parse_allocation(std::string_view text) {
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) throw InputError("allocation: empty input");
  std::vector<double> values;
  if (text[first] == '[' || text[first] == '{') {
    json doc = parse_json(text, "allocation");
    if (doc.is_object()) {
      if (!doc.contains("x")) throw InputError("allocation: object has no field 'x'");
      doc = doc.at("x");
    }
    if (!doc.is_array()) throw InputError("allocation: expected an array");
    for (std::size_t i = 0; i < doc.size(); ++i) values.push_back(parse_number(doc[i], "x[" + std::to_string(i) + "]"));
  } else {
    std::size_t start = 0;
    const std::string s(text);
    while (true) {
      const auto comma = s.find(',', start);
      const auto token = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      std::string trimmed = token;
      trimmed.erase(0, trimmed.find_first_not_of(" \t\r\n"));
      trimmed.erase(trimmed.find_last_not_of(" \t\r\n") + 1);
      const auto v = parse_scalar(trimmed);
      if (!v) throw InputError("allocation: entry " + std::to_string(values.size() + 1) + " (\"" + trimmed +
                               "\") is not a number or fraction");
      values.push_back(*v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i])) throw InputError("allocation: entry " + std::to_string(i + 1) + " is not finite");
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void renormalize_entitlements(ProblemInstance& inst) {
  const double s = inst.entitlements.sum();
  if (!(s > 0.0)) throw InputError("entitlements sum to zero; cannot renormalize");
  inst.entitlements /= s;
}

}  // namespace bbfair
