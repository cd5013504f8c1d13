#include "fallrec/csv.hpp"

#include <charconv>
#include <filesystem>

namespace fallrec {

std::string format_cell(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& header,
                     uint64_t manifest_hash, bool append)
    : columns_(header.size()) {
  std::error_code ec;
  const bool continuing =
      append && std::filesystem::file_size(path, ec) > 0 && !ec;
  out_.open(path, continuing ? std::ios::app : std::ios::out);
  if (!out_) throw ConfigError("cannot open CSV for writing: " + path);
  if (continuing) return;
  out_ << "# manifest_hash=" << manifest_hash << "\n";
  for (size_t i = 0; i < header.size(); ++i)
    out_ << header[i] << (i + 1 < header.size() ? "," : "\n");
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_cell(v));
  row(cells);
}

void CsvWriter::row(const std::vector<std::string>& values) {
  if (values.size() != columns_)
    throw ConfigError("CSV row width does not match header");
  for (size_t i = 0; i < values.size(); ++i)
    out_ << values[i] << (i + 1 < values.size() ? "," : "\n");
}

}  // namespace fallrec
