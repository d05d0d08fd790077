#ifndef BLAB_IO_HPP
#define BLAB_IO_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace blab {

/// 17 significant digits, "%.17g".
std::string format_number(double value);

/// 64-bit FNV-1a as 16 lowercase hex digits.
std::string digest_hex(std::string_view bytes);

/// Reads a two-column numeric CSV. Lines starting with '#' are skipped and a
/// non-numeric first row is taken as the header. Malformed rows raise
/// DomainError naming the 1-based line number.
std::vector<Eigen::Vector2d> read_cloud_csv(std::istream& in);
std::vector<Eigen::Vector2d> read_cloud_csv_file(const std::string& path);

void write_cloud_csv(std::ostream& out, const std::vector<Eigen::Vector2d>& points, std::string_view x_name,
                     std::string_view y_name, std::string_view digest);

/// Writes `contents` to `path`, raising DomainError when the file cannot be opened.
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace blab

#endif  // BLAB_IO_HPP
