#ifndef DHSC_CSV_HPP
#define DHSC_CSV_HPP

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace dhsc::csv
{

/// Round-trippable, locale-independent text form of a double.
std::string format(double x);

/// Splits one CSV line on commas (no quoting; fields here are plain tokens).
std::vector<std::string> split(std::string_view line);

/// Reads the header row and throws ArgumentError unless it equals `expected`.
void expect_header(std::istream& is, std::string_view expected);

double to_double(const std::string& field);
long long to_integer(const std::string& field);

} // namespace dhsc::csv

#endif /* DHSC_CSV_HPP */
