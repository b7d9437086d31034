#pragma once
// Deterministic CSV and text output: '.' decimal point, LF line endings,
// %.17g float formatting (round-trip exact), and atomic write-to-temp plus
// rename so failed runs leave no partial files.

#include <string>
#include <vector>

namespace wavebc {

std::string format_double(double x);  // %.17g

// One CSV row as preformatted cells.
using CsvRow = std::vector<std::string>;

// Write header + rows to path atomically. Throws std::runtime_error on I/O
// failure; the temporary file is removed on error.
void write_csv_atomic(const std::string& path, const CsvRow& header,
                      const std::vector<CsvRow>& rows);

// Write plain text atomically (used for summary.txt).
void write_text_atomic(const std::string& path, const std::string& text);

}  // namespace wavebc
