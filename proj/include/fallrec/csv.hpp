#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "fallrec/types.hpp"

namespace fallrec {

// CSV with a provenance comment line ("# manifest_hash=...") followed by a
// header row. Numeric cells are written with enough digits to round-trip.
class CsvWriter {
 public:
  // With append=true an existing non-empty file is continued without
  // rewriting the comment/header lines (used when resuming training).
  CsvWriter(const std::string& path, const std::vector<std::string>& header,
            uint64_t manifest_hash, bool append = false);

  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& values);
  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
  size_t columns_ = 0;
};

std::string format_cell(double v);

}  // namespace fallrec
