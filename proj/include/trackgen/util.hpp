#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace trackgen {

// Shortest round-trip decimal representation, locale independent.
std::string format_double(double v);

double parse_double(const std::string& s);
long parse_long(const std::string& s);

std::vector<std::string> split(const std::string& s, char sep);
std::string trim(const std::string& s);

std::uint64_t fnv1a(std::span<const unsigned char> bytes);
std::uint64_t fnv1a(const std::string& s);
std::string hex64(std::uint64_t v);

double mean_of(std::span<const double> xs);
// Sample standard deviation (n-1 divisor). Requires xs.size() >= 2.
double sample_stddev(std::span<const double> xs);

} // namespace trackgen
