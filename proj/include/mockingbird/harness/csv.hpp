#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mockingbird/core.hpp"

namespace mockingbird::harness {

class CsvError : public Error {
 public:
  using Error::Error;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// RFC 4180: comma separated, double-quoted fields with "" escapes, CRLF or LF.
/// The first record is the header; every row must have the header's width.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace mockingbird::harness
