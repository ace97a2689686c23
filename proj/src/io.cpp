// SPDX-License-Identifier: Apache-2.0
#include "io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "util.hpp"

namespace lse {

namespace {
constexpr char kMagic[4] = {'L', 'S', 'E', '1'};
}

void paths_write_csv(const PathEnsemble& paths, const std::string& file) {
    std::ofstream out(file);
    require(out.good(), Errc::Io, "cannot open '" + file + "' for writing");
    out << "replicate,index,value\n";
    for (long r = 0; r < paths.rows(); ++r) {
        const double* row = paths.row(r);
        for (long i = 0; i < paths.n; ++i)
            out << r << "," << (i + 1) << "," << format_double(row[i]) << "\n";
    }
    require(out.good(), Errc::Io, "write to '" + file + "' failed");
}

void paths_write_bin(const PathEnsemble& paths, const std::string& file) {
    std::ofstream out(file, std::ios::binary);
    require(out.good(), Errc::Io, "cannot open '" + file + "' for writing");
    uint32_t rows = static_cast<uint32_t>(paths.rows());
    uint32_t cols = static_cast<uint32_t>(paths.n);
    uint32_t reserved = 0;
    out.write(kMagic, 4);
    out.write(reinterpret_cast<const char*>(&rows), 4);
    out.write(reinterpret_cast<const char*>(&cols), 4);
    out.write(reinterpret_cast<const char*>(&reserved), 4);
    out.write(reinterpret_cast<const char*>(paths.values.data()),
              static_cast<std::streamsize>(paths.values.size() * sizeof(double)));
    require(out.good(), Errc::Io, "write to '" + file + "' failed");
}

PathEnsemble paths_read(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    require(in.good(), Errc::Io, "cannot open '" + file + "'");
    char magic[4] = {};
    in.read(magic, 4);
    require(in.gcount() == 4, Errc::Io, "'" + file + "' is too short");

    PathEnsemble p;
    if (std::memcmp(magic, kMagic, 4) == 0) {
        uint32_t rows = 0, cols = 0, reserved = 0;
        in.read(reinterpret_cast<char*>(&rows), 4);
        in.read(reinterpret_cast<char*>(&cols), 4);
        in.read(reinterpret_cast<char*>(&reserved), 4);
        require(in.good(), Errc::Io, "'" + file + "' has a truncated header");
        require(rows >= 1 && cols >= 1, Errc::Io, "'" + file + "' has an empty matrix");
        p.reps = static_cast<long>(rows);
        p.n = static_cast<long>(cols);
        p.values.resize(static_cast<std::size_t>(rows) * cols);
        in.read(reinterpret_cast<char*>(p.values.data()),
                static_cast<std::streamsize>(p.values.size() * sizeof(double)));
        require(in.gcount() ==
                    static_cast<std::streamsize>(p.values.size() * sizeof(double)),
                Errc::Io, "'" + file + "' data is truncated");
        return p;
    }

    // CSV fallback
    in.close();
    std::ifstream txt(file);
    std::string line;
    std::getline(txt, line);
    require(line.rfind("replicate,index,value", 0) == 0, Errc::Io,
            "'" + file + "' is neither an LSE1 matrix nor a path CSV");
    std::vector<std::vector<double>> rows;
    while (std::getline(txt, line)) {
        if (line.empty()) continue;
        auto parts = split(line, ',');
        require(parts.size() == 3, Errc::Io, "malformed CSV line: '" + line + "'");
        auto r = static_cast<std::size_t>(parse_long(parts[0], "replicate"));
        if (rows.size() <= r) rows.resize(r + 1);
        rows[r].push_back(parse_double(parts[2], "value"));
    }
    require(!rows.empty() && !rows[0].empty(), Errc::Io, "'" + file + "' contains no data");
    p.reps = static_cast<long>(rows.size());
    p.n = static_cast<long>(rows[0].size());
    for (auto& r : rows)
        require(static_cast<long>(r.size()) == p.n, Errc::Io,
                "'" + file + "' has ragged replicate rows");
    p.values.reserve(static_cast<std::size_t>(p.reps) * p.n);
    for (auto& r : rows) p.values.insert(p.values.end(), r.begin(), r.end());
    return p;
}

void write_text_file(const std::string& file, const std::string& content) {
    std::ofstream out(file, std::ios::binary);
    require(out.good(), Errc::Io, "cannot open '" + file + "' for writing");
    out << content;
    require(out.good(), Errc::Io, "write to '" + file + "' failed");
}

std::string read_text_file(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    require(in.good(), Errc::Io, "cannot open '" + file + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace lse
