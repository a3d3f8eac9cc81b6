#include "fairprice/config.hpp"

#include <boost/property_tree/ini_parser.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fairprice {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s)
{
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& raw, const std::string& what)
{
  const std::string s = trim(raw);
  double value = 0.0;
  const auto* begin = s.data();
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || s.empty()) {
    throw ConfigError("cannot parse '" + s + "' as a number for " + what);
  }
  return value;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in)
{
  KeyValueConfig cfg;
  try {
    pt::read_ini(in, cfg.tree_);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse(in);
}

void KeyValueConfig::write(std::ostream& out) const { pt::write_ini(out, tree_); }

void KeyValueConfig::save(const std::filesystem::path& path) const
{
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  write(out);
}

bool KeyValueConfig::has(const std::string& key) const
{
  return tree_.get_optional<std::string>(key).has_value();
}

std::optional<std::string> KeyValueConfig::get_string(const std::string& key) const
{
  auto v = tree_.get_optional<std::string>(key);
  if (!v) return std::nullopt;
  return trim(*v);
}

std::optional<double> KeyValueConfig::get_double(const std::string& key) const
{
  auto s = get_string(key);
  if (!s) return std::nullopt;
  return parse_double(*s, key);
}

std::optional<long long> KeyValueConfig::get_int(const std::string& key) const
{
  auto d = get_double(key);
  if (!d) return std::nullopt;
  if (std::floor(*d) != *d) throw ConfigError(key + " must be an integer");
  return static_cast<long long>(*d);
}

std::optional<Vector> KeyValueConfig::get_vector(const std::string& key) const
{
  auto s = get_string(key);
  if (!s) return std::nullopt;
  return parse_vector(*s);
}

double KeyValueConfig::require_double(const std::string& key) const
{
  auto v = get_double(key);
  if (!v) throw ConfigError("missing config key " + key);
  return *v;
}

Vector KeyValueConfig::require_vector(const std::string& key) const
{
  auto v = get_vector(key);
  if (!v) throw ConfigError("missing config key " + key);
  return *v;
}

std::string KeyValueConfig::require_string(const std::string& key) const
{
  auto v = get_string(key);
  if (!v) throw ConfigError("missing config key " + key);
  return *v;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) { tree_.put(key, value); }
void KeyValueConfig::set(const std::string& key, double value) { tree_.put(key, format_double(value)); }
void KeyValueConfig::set(const std::string& key, long long value) { tree_.put(key, std::to_string(value)); }
void KeyValueConfig::set(const std::string& key, const Vector& value) { tree_.put(key, format_vector(value)); }

void KeyValueConfig::merge(const KeyValueConfig& other)
{
  for (const auto& [section, children] : other.tree_) {
    if (children.empty()) {
      tree_.put(section, children.data());
      continue;
    }
    for (const auto& [key, value] : children) {
      tree_.put(pt::ptree::path_type(section + "." + key), value.data());
    }
  }
}

std::string format_double(double v)
{
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

std::string format_vector(const Vector& v)
{
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_double(v[i]);
  }
  return out;
}

Vector parse_vector(const std::string& s)
{
  std::vector<double> values;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    values.push_back(parse_double(item, "vector '" + s + "'"));
  }
  return Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace fairprice
