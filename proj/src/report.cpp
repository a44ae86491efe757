#include "upfn/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace upfn {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open for writing: " + tmp);
        os << content;
        if (!os) throw std::runtime_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("rename failed: " + path);
}

}  // namespace

void write_csv_atomic(const Table& t, const std::string& path) {
    std::string out;
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        if (c) out += ',';
        out += csv_escape(t.columns[c]);
    }
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += csv_escape(row[c]);
        }
        out += '\n';
    }
    atomic_write(path, out);
}

void write_json_atomic(const Table& t, const std::string& path) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& row : t.rows) {
        nlohmann::json obj;
        for (std::size_t c = 0; c < row.size() && c < t.columns.size(); ++c)
            obj[t.columns[c]] = row[c];
        arr.push_back(obj);
    }
    atomic_write(path, arr.dump(2) + "\n");
}

void write_constants_manifest(const std::vector<ConstantEntry>& entries,
                              const std::string& path, bool json) {
    Table t;
    t.columns = {"name", "value", "provenance"};
    for (const auto& e : entries)
        t.rows.push_back({e.name, format_double(e.value), e.provenance});
    if (json)
        write_json_atomic(t, path);
    else
        write_csv_atomic(t, path);
}

}  // namespace upfn
