#ifndef RSDESIGN_CSV_IO_HPP
#define RSDESIGN_CSV_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "rsdesign/model.hpp"

namespace rsdesign {

/// Reads a design: `#` lines and blank lines are skipped, the first other
/// line must be the header x1,...,xq, and every later line one run.
/// Throws ConfigError on malformed input; the message names the line.
Design read_design_csv(std::istream& is, const std::string& source = "<stream>");
/// Throws ConfigError when the file cannot be opened.
Design read_design_file(const std::string& path);

/// Header x1..xq then one row per run, numbers in shortest round-trip form.
void write_design_csv(std::ostream& os, const Design& design,
                      const std::vector<std::string>& comments = {});

/// Shortest decimal string that reads back to exactly `v`.
std::string format_number(double v);

/// 64-bit FNV-1a hash of a file's bytes as 16 hex digits, for provenance
/// metadata in outputs. Empty string when the file cannot be read.
std::string file_hash(const std::string& path);

}  // namespace rsdesign

#endif  // RSDESIGN_CSV_IO_HPP
