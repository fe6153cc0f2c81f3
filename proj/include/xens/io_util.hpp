#ifndef XENS_IO_UTIL_HPP
#define XENS_IO_UTIL_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace xens {

// Timestamp recorded in provenance blocks. Honors SOURCE_DATE_EPOCH so that
// reruns with identical inputs produce byte-identical artifacts; without it
// the timestamp is 0 ("unset") — wall clock is never consulted.
std::int64_t artifact_timestamp();

std::vector<std::string> split_tsv(const std::string& line);
std::string join_tsv(const std::vector<std::string>& fields);

// Shortest decimal form that round-trips a double (%.17g fallback).
std::string format_double(double v);
// Fixed precision, locale-independent.
std::string format_fixed(double v, int decimals);

void ensure_dir(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);
std::vector<std::string> read_lines(const std::string& path);

// Regular files under root, as sorted root-relative paths with '/' separators.
std::vector<std::string> list_files_recursive(const std::string& root);

bool file_exists(const std::string& path);

}  // namespace xens

#endif
