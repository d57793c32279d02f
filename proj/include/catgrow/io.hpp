// Copyright 2026 The catgrow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Field export: CSV (x,p,w) and raw little-endian float64 with a JSON sidecar.

#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "catgrow/config.hpp"
#include "catgrow/decoherence.hpp"
#include "catgrow/phase_space.hpp"

namespace catgrow {

inline constexpr const char *kVersion = "0.1.0";

/// Shortest round-trip decimal for a double.
inline std::string format_double(double v) {
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

/// Metadata carried by every output file.
inline Json base_metadata() {
    Json m;
    m["tool"] = "catgrow";
    m["version"] = kVersion;
    m["constants"] = {{"hbar", kHbar}, {"k_B", kBoltzmann}};
    m["tolerances"] = {{"hermiticity", 1e-10}, {"merge_key", 1e-9}, {"normalization", 1e-10}};
    return m;
}

/// Writes `# key: value` lines for each top-level metadata entry.
inline void write_comment_header(std::ostream &out, const Json &meta) {
    for (const auto &[k, v] : meta.items()) out << "# " << k << ": " << v.dump() << "\n";
}

inline void write_field_csv(const std::string &path, const Field &f, const Json &meta) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    write_comment_header(out, meta);
    out << "x,p,w\n";
    for (int i = 0; i < f.grid.nx; ++i) {
        std::string xs = format_double(f.grid.x(i));
        for (int j = 0; j < f.grid.np; ++j) {
            out << xs << ',' << format_double(f.grid.p(j)) << ',' << format_double(f.at(i, j)) << '\n';
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

/// Row-major (x outer, p inner) float64 matrix plus `<path>.json`.
inline void write_field_binary(const std::string &path, const Field &f, const Json &meta) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    for (double v : f.values) {
        uint64_t bits = std::bit_cast<uint64_t>(v);
        unsigned char b[8];
        for (int k = 0; k < 8; ++k) b[k] = (unsigned char)(bits >> (8 * k));
        out.write(reinterpret_cast<const char *>(b), 8);
    }
    if (!out) throw IoError("write failed: " + path);
    Json side = meta;
    side["layout"] = {{"dtype", "float64"}, {"byte_order", "little"}, {"order", "row-major, x outer, p inner"}};
    side["grid"] = {{"x_min", f.grid.x_min}, {"x_max", f.grid.x_max}, {"p_min", f.grid.p_min},
                    {"p_max", f.grid.p_max}, {"nx", f.grid.nx},       {"np", f.grid.np}};
    std::ofstream js(path + ".json");
    if (!js) throw IoError("cannot write " + path + ".json");
    js << side.dump(2) << "\n";
}

inline Field read_field_binary(const std::string &path) {
    Json side = read_json_file(path + ".json");
    Grid g;
    g.x_min = side.at("grid").at("x_min");
    g.x_max = side.at("grid").at("x_max");
    g.p_min = side.at("grid").at("p_min");
    g.p_max = side.at("grid").at("p_max");
    g.nx = side.at("grid").at("nx");
    g.np = side.at("grid").at("np");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    Field f{g, std::vector<double>(size_t(g.nx) * g.np)};
    for (double &v : f.values) {
        unsigned char b[8];
        if (!in.read(reinterpret_cast<char *>(b), 8)) throw IoError("truncated file " + path);
        uint64_t bits = 0;
        for (int k = 0; k < 8; ++k) bits |= uint64_t(b[k]) << (8 * k);
        v = std::bit_cast<double>(bits);
    }
    return f;
}

/// Simple CSV table with a metadata comment header.
class CsvWriter {
   public:
    CsvWriter(const std::string &path, const Json &meta, const std::vector<std::string> &columns)
        : out_(path, std::ios::binary), path_(path) {
        if (!out_) throw IoError("cannot write " + path);
        write_comment_header(out_, meta);
        for (size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
        out_ << "\n";
    }
    void row(const std::vector<std::string> &cells) {
        for (size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << "\n";
        if (!out_) throw IoError("write failed: " + path_);
    }

   private:
    std::ofstream out_;
    std::string path_;
};

}  // namespace catgrow
