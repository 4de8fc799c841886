#include "text.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qrc/error.hpp"

namespace qrc {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + path.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

void check_schema(const boost::property_tree::ptree& tree,
                  const std::map<std::string, std::set<std::string>>& schema,
                  std::string_view document) {
  for (const auto& [section, body] : tree) {
    const auto it = schema.find(section);
    if (it == schema.end()) {
      throw Error(ErrorKind::Parse,
                  std::string(document) + ": unknown section [" + section + "]", section);
    }
    if (!body.data().empty()) {
      throw Error(ErrorKind::Parse,
                  std::string(document) + ": key '" + section + "' outside any section", section);
    }
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) {
        throw Error(ErrorKind::Parse,
                    std::string(document) + ": unknown field " + section + "." + key,
                    section + "." + key);
      }
    }
  }
}

std::string get_string(const boost::property_tree::ptree& tree, const std::string& key,
                       const std::string& fallback) {
  const auto value = tree.get_optional<std::string>(key);
  return value ? std::string(trim(*value)) : fallback;
}

double parse_double(std::string_view text, const std::string& field) {
  text = trim(text);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw Error(ErrorKind::Parse, "field " + field + ": '" + std::string(text) + "' is not a finite number", field);
  }
  return value;
}

long long parse_integer(std::string_view text, const std::string& field) {
  text = trim(text);
  long long value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw Error(ErrorKind::Parse, "field " + field + ": '" + std::string(text) + "' is not an integer", field);
  }
  return value;
}

double get_double(const boost::property_tree::ptree& tree, const std::string& key,
                  double fallback) {
  const auto value = tree.get_optional<std::string>(key);
  return value ? parse_double(*value, key) : fallback;
}

long long get_integer(const boost::property_tree::ptree& tree, const std::string& key,
                      long long fallback) {
  const auto value = tree.get_optional<std::string>(key);
  return value ? parse_integer(*value, key) : fallback;
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> items;
  text = trim(text);
  if (text.empty()) return items;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    items.emplace_back(trim(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

std::vector<QubitPair> parse_pair_list(std::string_view text, const std::string& field) {
  std::vector<QubitPair> pairs;
  for (const auto& item : split_list(text)) {
    const auto dash = item.find('-');
    if (dash == std::string::npos || dash == 0) {
      throw Error(ErrorKind::Parse, "field " + field + ": expected i-j pair, got '" + item + "'", field);
    }
    const auto a = parse_integer(std::string_view(item).substr(0, dash), field);
    const auto b = parse_integer(std::string_view(item).substr(dash + 1), field);
    pairs.emplace_back(static_cast<int>(a), static_cast<int>(b));
  }
  return pairs;
}

std::string format_pair_list(const std::vector<QubitPair>& pairs) {
  std::string out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(pairs[i].first) + "-" + std::to_string(pairs[i].second);
  }
  return out;
}

}  // namespace qrc
