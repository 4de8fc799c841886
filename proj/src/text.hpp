#pragma once

// Helpers shared by the noise-profile and experiment-config readers.

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "qrc/circuit.hpp"

namespace qrc {

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// Rejects sections or keys outside `schema`, naming the offending field.
void check_schema(const boost::property_tree::ptree& tree,
                  const std::map<std::string, std::set<std::string>>& schema,
                  std::string_view document);

std::string get_string(const boost::property_tree::ptree& tree, const std::string& key,
                       const std::string& fallback);
double get_double(const boost::property_tree::ptree& tree, const std::string& key,
                  double fallback);
long long get_integer(const boost::property_tree::ptree& tree, const std::string& key,
                      long long fallback);

double parse_double(std::string_view text, const std::string& field);
long long parse_integer(std::string_view text, const std::string& field);

// "0-1, 2-3" -> {(0,1), (2,3)}; empty text gives an empty list.
std::vector<QubitPair> parse_pair_list(std::string_view text, const std::string& field);
std::string format_pair_list(const std::vector<QubitPair>& pairs);

// Comma-separated values.
std::vector<std::string> split_list(std::string_view text);

std::string_view trim(std::string_view text);

// Shortest text that parses back to the same double.
std::string format_double(double value);

}  // namespace qrc
