#pragma once

// INI-style configuration: `[section]` headers and `key = value` lines.
// Vectors are comma separated. Backed by Boost.PropertyTree.

#include "fairprice/common.hpp"

#include <boost/property_tree/ptree.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fairprice {

class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig load(const std::filesystem::path& path);
  void write(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;

  bool has(const std::string& key) const;
  /// Keys use dotted form, e.g. "seller.delta".
  std::optional<std::string> get_string(const std::string& key) const;
  std::optional<double> get_double(const std::string& key) const;
  std::optional<long long> get_int(const std::string& key) const;
  std::optional<Vector> get_vector(const std::string& key) const;

  double require_double(const std::string& key) const;
  Vector require_vector(const std::string& key) const;
  std::string require_string(const std::string& key) const;

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, long long value);
  void set(const std::string& key, const Vector& value);

  /// Copies every key of `other` into this config, overwriting duplicates.
  void merge(const KeyValueConfig& other);

 private:
  boost::property_tree::ptree tree_;
};

/// Shortest round-trippable decimal form of a double.
std::string format_double(double v);
std::string format_vector(const Vector& v);
Vector parse_vector(const std::string& s);

}  // namespace fairprice
