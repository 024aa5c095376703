#include "dhsc/csv.hpp"

#include <charconv>
#include <cmath>

#include "dhsc/types.hpp"

namespace dhsc::csv
{

std::string format(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::vector<std::string> split(std::string_view line)
{
    if (!line.empty() && line.back() == '\r')
        line.remove_suffix(1);
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            break;
        }
        out.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

void expect_header(std::istream& is, std::string_view expected)
{
    std::string line;
    if (!std::getline(is, line))
        throw ArgumentError("csv: missing header, expected '" + std::string(expected) + "'");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != expected)
        throw ArgumentError("csv: header '" + line + "' does not match '" +
                            std::string(expected) + "'");
}

double to_double(const std::string& field)
{
    if (field == "nan")
        return std::nan("");
    if (field == "inf")
        return INFINITY;
    if (field == "-inf")
        return -INFINITY;
    double x = 0.0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), x);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size())
        throw ArgumentError("csv: not a number: '" + field + "'");
    return x;
}

long long to_integer(const std::string& field)
{
    long long x = 0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), x);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size())
        throw ArgumentError("csv: not an integer: '" + field + "'");
    return x;
}

} // namespace dhsc::csv
