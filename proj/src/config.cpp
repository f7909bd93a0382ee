#include "rbheat/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rbheat {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_text(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               " is not of the form key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               " has an empty key");
    if (cfg.find(key))
      throw std::runtime_error("duplicate config key '" + key + "'");
    cfg.entries_.emplace_back(key, value);
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_text(os.str());
}

const std::string* KeyValueConfig::find(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return &v;
  return nullptr;
}

bool KeyValueConfig::has(const std::string& key) const {
  return find(key) != nullptr;
}

std::string KeyValueConfig::get_string(const std::string& key) const {
  const std::string* v = find(key);
  if (!v) throw std::runtime_error("missing config key '" + key + "'");
  return *v;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  const std::string* v = find(key);
  return v ? *v : fallback;
}

double KeyValueConfig::get_double(const std::string& key) const {
  const std::string s = get_string(key);
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("config key '" + key + "' is not a number: " + s);
  }
  if (pos != s.size())
    throw std::runtime_error("config key '" + key + "' is not a number: " + s);
  return v;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

int KeyValueConfig::get_int(const std::string& key) const {
  const double v = get_double(key);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw std::runtime_error("config key '" + key + "' is not an integer");
  return i;
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key,
                                      std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string s = get_string(key);
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw std::runtime_error("config key '" + key +
                             "' is not an unsigned integer: " + s);
  }
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_)
    if (k == key) {
      v = value;
      return;
    }
  entries_.emplace_back(key, value);
}

void KeyValueConfig::require_known(const std::set<std::string>& allowed) const {
  for (const auto& [k, v] : entries_)
    if (!allowed.count(k))
      throw std::runtime_error("unknown config key '" + k + "'");
}

std::string KeyValueConfig::text() const {
  std::ostringstream os;
  for (const auto& [k, v] : entries_) os << k << " = " << v << "\n";
  return os.str();
}

}  // namespace rbheat
