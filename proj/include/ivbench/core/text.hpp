#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace ivbench {

// Splits one delimited-text record. Double-quoted fields may contain the
// delimiter; surrounding whitespace is trimmed from unquoted fields.
std::vector<std::string> split_record(std::string_view line, char delimiter);

// Reads the next non-blank line; strips a trailing '\r'. Returns false at EOF.
bool read_record_line(std::istream& in, std::string& line);

// Shortest round-trippable decimal form; identical bytes for identical doubles.
std::string format_number(double value);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::string& path);

}  // namespace ivbench
