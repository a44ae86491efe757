#pragma once

#include <string>
#include <vector>

namespace upfn {

// Fixed-precision text form of a double; stable across runs and thread counts.
std::string format_double(double v);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

// Writes via a temporary file and rename, so failed runs leave no partial
// report behind.
void write_csv_atomic(const Table& t, const std::string& path);
void write_json_atomic(const Table& t, const std::string& path);

struct ConstantEntry {
    std::string name;
    double value = 0.0;
    std::string provenance;  // "stated", "derived" or "assumed"
};

void write_constants_manifest(const std::vector<ConstantEntry>& entries,
                              const std::string& path, bool json);

}  // namespace upfn
