#pragma once

/// CSV tables (17 significant digits) and the binary grid-field dump.
///
/// Dump layout, little-endian throughout:
///   "HGF1" | u32 dims | u32 nodes_per_axis | f64 h | f64 lower | f64 eps
///   | u64 run count | runs of (u8 kind, u64 length) over the nodes in linear order
///     (kind 0 unused, 1 active, 2 Dirichlet)
///   | u64 value count | f64 values of the active and Dirichlet nodes in linear order

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>
#include <vector>

#include "hessgreen/error.hpp"
#include "hessgreen/grid_solver.hpp"

namespace hessgreen {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_csv(std::ostream& out, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        out << (i ? "," : "") << header[i];
    }
    out << '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size()) {
            throw InvalidArgument("write_csv: row width differs from the header");
        }
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << format_double(row[i]);
        }
        out << '\n';
    }
}

inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InvalidArgument("write_csv: cannot open " + path);
    }
    write_csv(out, header, rows);
}

/// Nodes of the (x1, y1, 0, 0) plane that are active or Dirichlet: x1, y1, value, kind.
inline std::vector<std::vector<double>> grid_slice(const GridField& field) {
    const auto& g = *field.grid;
    std::vector<std::vector<double>> rows;
    const int c = g.half();
    for (int i = 0; i < g.nodes_per_axis(); ++i) {
        for (int j = 0; j < g.nodes_per_axis(); ++j) {
            const auto lin = g.linear({i, j, c, c});
            const auto kind = g.kind(lin);
            if (kind == Grid4::Kind::Unused) {
                continue;
            }
            rows.push_back({(i - c) * g.h(), (j - c) * g.h(), field.at(lin), kind == Grid4::Kind::Active ? 1.0 : 2.0});
        }
    }
    return rows;
}

namespace detail {

template <class T>
void put_le(std::ostream& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::uint64_t bits = 0;
    std::memcpy(&bits, &value, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        out.put(static_cast<char>((bits >> (8 * i)) & 0xffu));
    }
}

template <class T>
T get_le(std::istream& in) {
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        const int c = in.get();
        if (c == std::char_traits<char>::eof()) {
            throw InvalidArgument("read_field_dump: truncated file");
        }
        bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
    }
    T value;
    std::memcpy(&value, &bits, sizeof(T));
    return value;
}

inline std::uint8_t kind_code(Grid4::Kind k) {
    return k == Grid4::Kind::Unused ? 0 : (k == Grid4::Kind::Active ? 1 : 2);
}

}  // namespace detail

inline void write_field_dump(std::ostream& out, const GridField& field) {
    const auto& g = *field.grid;
    out.write("HGF1", 4);
    detail::put_le<std::uint32_t>(out, kGridDim);
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.nodes_per_axis()));
    detail::put_le<double>(out, g.h());
    detail::put_le<double>(out, g.lower());
    detail::put_le<double>(out, g.eps());

    std::vector<std::pair<std::uint8_t, std::uint64_t>> runs;
    std::vector<double> values;
    for (std::int64_t lin = 0; lin < g.total_nodes(); ++lin) {
        const auto code = detail::kind_code(g.kind(lin));
        if (runs.empty() || runs.back().first != code) {
            runs.emplace_back(code, 0);
        }
        ++runs.back().second;
        if (code != 0) {
            values.push_back(field.at(lin));
        }
    }
    detail::put_le<std::uint64_t>(out, runs.size());
    for (const auto& [code, length] : runs) {
        detail::put_le<std::uint8_t>(out, code);
        detail::put_le<std::uint64_t>(out, length);
    }
    detail::put_le<std::uint64_t>(out, values.size());
    for (double v : values) {
        detail::put_le<double>(out, v);
    }
}

inline void write_field_dump(const std::string& path, const GridField& field) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InvalidArgument("write_field_dump: cannot open " + path);
    }
    write_field_dump(out, field);
}

struct FieldDump {
    std::uint32_t dims = 0;
    std::uint32_t nodes_per_axis = 0;
    double h = 0.0;
    double lower = 0.0;
    double eps = 0.0;
    std::vector<std::uint8_t> kinds;   ///< per node, linear order
    std::vector<double> values;        ///< active and Dirichlet nodes, linear order
};

inline FieldDump read_field_dump(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "HGF1", 4) != 0) {
        throw InvalidArgument("read_field_dump: bad magic");
    }
    FieldDump d;
    d.dims = detail::get_le<std::uint32_t>(in);
    d.nodes_per_axis = detail::get_le<std::uint32_t>(in);
    d.h = detail::get_le<double>(in);
    d.lower = detail::get_le<double>(in);
    d.eps = detail::get_le<double>(in);
    const auto runs = detail::get_le<std::uint64_t>(in);
    for (std::uint64_t r = 0; r < runs; ++r) {
        const auto code = detail::get_le<std::uint8_t>(in);
        const auto length = detail::get_le<std::uint64_t>(in);
        d.kinds.insert(d.kinds.end(), length, code);
    }
    const auto count = detail::get_le<std::uint64_t>(in);
    d.values.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        d.values.push_back(detail::get_le<double>(in));
    }
    std::uint64_t expected_nodes = 1;
    for (std::uint32_t a = 0; a < d.dims; ++a) {
        expected_nodes *= d.nodes_per_axis;
    }
    if (d.kinds.size() != expected_nodes) {
        throw InvalidArgument("read_field_dump: mask does not cover the grid");
    }
    return d;
}

inline FieldDump read_field_dump(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InvalidArgument("read_field_dump: cannot open " + path);
    }
    return read_field_dump(in);
}

}  // namespace hessgreen
