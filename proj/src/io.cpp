#include "blab/io.hpp"

#include "blab/error.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace blab {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

std::string format_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string digest_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<Eigen::Vector2d> read_cloud_csv(std::istream& in) {
    std::vector<Eigen::Vector2d> points;
    std::string line;
    int number = 0;
    bool first_row = true;
    while (std::getline(in, line)) {
        ++number;
        const std::string_view row = trim(line);
        if (row.empty() || row.front() == '#') continue;
        const auto comma = row.find(',');
        double x = 0, y = 0;
        const bool two_fields = comma != std::string_view::npos && row.find(',', comma + 1) == std::string_view::npos;
        const bool x_ok = two_fields && parse_double(row.substr(0, comma), x);
        const bool y_ok = two_fields && parse_double(row.substr(comma + 1), y);
        if (!(x_ok && y_ok)) {
            if (first_row && two_fields && !x_ok && !y_ok) {
                first_row = false;  // header
                continue;
            }
            throw DomainError("malformed CSV at line " + std::to_string(number) + ": '" + std::string(row) + "'");
        }
        first_row = false;
        points.emplace_back(x, y);
    }
    return points;
}

std::vector<Eigen::Vector2d> read_cloud_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open '" + path + "'");
    return read_cloud_csv(in);
}

void write_cloud_csv(std::ostream& out, const std::vector<Eigen::Vector2d>& points, std::string_view x_name,
                     std::string_view y_name, std::string_view digest) {
    out << "# config_digest=" << digest << '\n' << x_name << ',' << y_name << '\n';
    for (const auto& p : points) out << format_number(p.x()) << ',' << format_number(p.y()) << '\n';
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError("cannot write '" + path + "'");
    out << contents;
    if (!out) throw DomainError("failed writing '" + path + "'");
}

}  // namespace blab
