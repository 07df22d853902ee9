#ifndef RFIM_FORMAT_HPP
#define RFIM_FORMAT_HPP

#include <string>
#include <string_view>

namespace rfim {

inline constexpr std::string_view kVersion = "0.1.0";

/// Shortest text that is guaranteed to round-trip: 17 significant digits.
std::string format_double(double value);

/// Writes `content` to `path` through a temporary file and a rename.
void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace rfim

#endif  // RFIM_FORMAT_HPP
