#include "wavebc/csvio.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace wavebc {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {

void write_file_atomic(const std::string& path, const std::string& payload) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
        out.write(payload.data(), (std::streamsize)payload.size());
        out.flush();
        if (!out) {
            std::remove(tmp.c_str());
            throw std::runtime_error("write failed: " + tmp);
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("rename failed: " + path);
    }
}

}  // namespace

void write_csv_atomic(const std::string& path, const CsvRow& header,
                      const std::vector<CsvRow>& rows) {
    std::string payload;
    auto append_row = [&payload](const CsvRow& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) payload += ',';
            payload += row[i];
        }
        payload += '\n';
    };
    append_row(header);
    for (const CsvRow& row : rows) append_row(row);
    write_file_atomic(path, payload);
}

void write_text_atomic(const std::string& path, const std::string& text) {
    write_file_atomic(path, text);
}

}  // namespace wavebc
