#pragma once

// PLY 1.0 reader/writer for point clouds (ascii and binary_little_endian).
//
// The vertex element must carry x, y, z. nx, ny, nz are read as normals and
// red, green, blue as 8-bit colors when all three are present. Other vertex
// properties and other elements (faces, ...) are parsed and discarded.

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pcqa/detail/text.hpp"
#include "pcqa/error.hpp"
#include "pcqa/point_cloud.hpp"

namespace pcqa {

enum class PlyFormat { Ascii, BinaryLittleEndian };

namespace ply_detail {

enum class Scalar { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

inline std::optional<Scalar> parse_scalar(std::string_view name) {
    if (name == "char" || name == "int8") return Scalar::Int8;
    if (name == "uchar" || name == "uint8") return Scalar::UInt8;
    if (name == "short" || name == "int16") return Scalar::Int16;
    if (name == "ushort" || name == "uint16") return Scalar::UInt16;
    if (name == "int" || name == "int32") return Scalar::Int32;
    if (name == "uint" || name == "uint32") return Scalar::UInt32;
    if (name == "float" || name == "float32") return Scalar::Float32;
    if (name == "double" || name == "float64") return Scalar::Float64;
    return std::nullopt;
}

inline std::size_t scalar_size(Scalar s) {
    switch (s) {
        case Scalar::Int8:
        case Scalar::UInt8: return 1;
        case Scalar::Int16:
        case Scalar::UInt16: return 2;
        case Scalar::Int32:
        case Scalar::UInt32:
        case Scalar::Float32: return 4;
        case Scalar::Float64: return 8;
    }
    return 0;
}

inline bool is_integral(Scalar s) { return s != Scalar::Float32 && s != Scalar::Float64; }

struct Property {
    std::string name;
    Scalar type = Scalar::Float32;
    bool is_list = false;
    Scalar count_type = Scalar::UInt8;
};

struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<Property> properties;
};

struct Header {
    PlyFormat format = PlyFormat::Ascii;
    std::vector<Element> elements;
    std::size_t payload_offset = 0;
    std::size_t payload_line = 0;  // 1-based line of the first payload line
};

inline Header parse_header(std::string_view data, const std::string& source) {
    Header header;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    bool have_format = false;
    const auto fail = [&](const std::string& msg) -> ParseError {
        return ParseError(source + ":" + std::to_string(line_no) + ": " + msg);
    };
    for (;;) {
        if (pos >= data.size()) {
            ++line_no;
            throw fail("header ended before end_header");
        }
        const auto eol = data.find('\n', pos);
        const auto raw = data.substr(pos, eol == std::string_view::npos ? data.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? data.size() : eol + 1;
        ++line_no;
        const auto line = detail::trim(raw);
        std::vector<std::string_view> tok;
        for (auto t : detail::split(line, ' ')) {
            if (!detail::trim(t).empty()) tok.push_back(detail::trim(t));
        }
        if (line_no == 1) {
            if (line != "ply") throw fail("not a PLY file (missing 'ply' magic)");
            continue;
        }
        if (tok.empty()) continue;
        if (tok[0] == "comment" || tok[0] == "obj_info") continue;
        if (tok[0] == "format") {
            if (tok.size() != 3) throw fail("malformed format line");
            if (tok[1] == "ascii") header.format = PlyFormat::Ascii;
            else if (tok[1] == "binary_little_endian") header.format = PlyFormat::BinaryLittleEndian;
            else throw fail("unsupported format variant '" + std::string(tok[1]) + "'");
            if (tok[2] != "1.0") throw fail("unsupported PLY version '" + std::string(tok[2]) + "'");
            have_format = true;
        } else if (tok[0] == "element") {
            if (tok.size() != 3) throw fail("malformed element line");
            std::size_t count = 0;
            const auto [p, ec] = std::from_chars(tok[2].data(), tok[2].data() + tok[2].size(), count);
            if (ec != std::errc{} || p != tok[2].data() + tok[2].size()) throw fail("bad element count");
            header.elements.push_back({std::string(tok[1]), count, {}});
        } else if (tok[0] == "property") {
            if (header.elements.empty()) throw fail("property before any element");
            Property prop;
            if (tok.size() == 5 && tok[1] == "list") {
                const auto ct = parse_scalar(tok[2]);
                const auto it = parse_scalar(tok[3]);
                if (!ct || !it || !is_integral(*ct)) throw fail("bad list property types");
                prop = {std::string(tok[4]), *it, true, *ct};
            } else if (tok.size() == 3) {
                const auto t = parse_scalar(tok[1]);
                if (!t) throw fail("unknown property type '" + std::string(tok[1]) + "'");
                prop = {std::string(tok[2]), *t, false, Scalar::UInt8};
            } else {
                throw fail("malformed property line");
            }
            header.elements.back().properties.push_back(prop);
        } else if (tok[0] == "end_header") {
            if (!have_format) throw fail("missing format line");
            header.payload_offset = pos;
            header.payload_line = line_no + 1;
            return header;
        } else {
            throw fail("unexpected header keyword '" + std::string(tok[0]) + "'");
        }
    }
}

// Sequential reader over the payload producing doubles carrying the exact
// value of the declared type.
class PayloadReader {
public:
    PayloadReader(std::string_view data, const Header& header, std::string source)
        : data_(data), pos_(header.payload_offset), line_(header.payload_line), format_(header.format),
          source_(std::move(source)) {}

    double read(Scalar type, std::string_view what) {
        return format_ == PlyFormat::Ascii ? read_ascii(type, what) : read_binary(type, what);
    }

    std::string location() const {
        if (format_ == PlyFormat::Ascii) return source_ + ":" + std::to_string(line_);
        return source_ + ": byte " + std::to_string(pos_);
    }

private:
    static double narrow(Scalar type, double v) {
        if (type == Scalar::Float32) return static_cast<double>(static_cast<float>(v));
        return v;
    }

    double read_ascii(Scalar type, std::string_view what) {
        while (pos_ < data_.size() && std::isspace(static_cast<unsigned char>(data_[pos_]))) {
            if (data_[pos_] == '\n') ++line_;
            ++pos_;
        }
        if (pos_ >= data_.size()) {
            throw ParseError(location() + ": truncated payload while reading " + std::string(what));
        }
        std::size_t end = pos_;
        while (end < data_.size() && !std::isspace(static_cast<unsigned char>(data_[end]))) ++end;
        const auto token = data_.substr(pos_, end - pos_);
        const auto value = detail::parse_double(token);
        if (!value) {
            throw ParseError(location() + ": '" + std::string(token) + "' is not a number (" + std::string(what) + ")");
        }
        if (is_integral(type) && *value != std::floor(*value)) {
            throw ParseError(location() + ": integer property " + std::string(what) + " has value '" +
                             std::string(token) + "'");
        }
        pos_ = end;
        return narrow(type, *value);
    }

    template <typename T>
    T load() {
        T v;
        std::memcpy(&v, data_.data() + pos_, sizeof(T));
        if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
            auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
            std::reverse(bytes.begin(), bytes.end());
            v = std::bit_cast<T>(bytes);
        }
        pos_ += sizeof(T);
        return v;
    }

    double read_binary(Scalar type, std::string_view what) {
        if (data_.size() - pos_ < scalar_size(type)) {
            throw ParseError(location() + ": truncated payload while reading " + std::string(what));
        }
        switch (type) {
            case Scalar::Int8: return load<std::int8_t>();
            case Scalar::UInt8: return load<std::uint8_t>();
            case Scalar::Int16: return load<std::int16_t>();
            case Scalar::UInt16: return load<std::uint16_t>();
            case Scalar::Int32: return load<std::int32_t>();
            case Scalar::UInt32: return load<std::uint32_t>();
            case Scalar::Float32: return load<float>();
            case Scalar::Float64: return load<double>();
        }
        return 0.0;
    }

    std::string_view data_;
    std::size_t pos_;
    std::size_t line_;
    PlyFormat format_;
    std::string source_;
};

inline std::optional<std::size_t> find_property(const Element& e, std::string_view name) {
    for (std::size_t i = 0; i < e.properties.size(); ++i) {
        if (!e.properties[i].is_list && e.properties[i].name == name) return i;
    }
    return std::nullopt;
}

}  // namespace ply_detail

inline PointCloud parse_ply_data(std::string_view data, const std::string& source = "<memory>") {
    using namespace ply_detail;
    const Header header = parse_header(data, source);

    const auto vertex_it = std::find_if(header.elements.begin(), header.elements.end(),
                                        [](const Element& e) { return e.name == "vertex"; });
    if (vertex_it == header.elements.end()) throw ParseError(source + ": no vertex element");
    const Element& vertex = *vertex_it;

    std::array<std::size_t, 3> xyz{};
    const char* axes[] = {"x", "y", "z"};
    for (int k = 0; k < 3; ++k) {
        const auto idx = find_property(vertex, axes[k]);
        if (!idx) throw ParseError(source + ": vertex element has no '" + axes[k] + "' property");
        xyz[k] = *idx;
    }
    const auto nx = find_property(vertex, "nx"), ny = find_property(vertex, "ny"), nz = find_property(vertex, "nz");
    const auto r = find_property(vertex, "red"), g = find_property(vertex, "green"), b = find_property(vertex, "blue");
    const bool with_normals = nx && ny && nz;
    const bool with_colors = r && g && b;

    PointCloud cloud;
    cloud.positions.reserve(vertex.count);
    if (with_normals) cloud.normals.emplace().reserve(vertex.count);
    if (with_colors) cloud.colors.emplace().reserve(vertex.count);

    PayloadReader reader(data, header, source);
    std::vector<double> values;
    for (const Element& element : header.elements) {
        const bool is_vertex = &element == &vertex;
        for (std::size_t n = 0; n < element.count; ++n) {
            values.assign(element.properties.size(), 0.0);
            for (std::size_t p = 0; p < element.properties.size(); ++p) {
                const Property& prop = element.properties[p];
                const std::string what = element.name + " " + std::to_string(n) + " property " + prop.name;
                if (prop.is_list) {
                    const double count = reader.read(prop.count_type, what);
                    if (count < 0) throw ParseError(reader.location() + ": negative list length");
                    for (std::size_t k = 0; k < static_cast<std::size_t>(count); ++k) reader.read(prop.type, what);
                } else {
                    values[p] = reader.read(prop.type, what);
                }
            }
            if (!is_vertex) continue;
            cloud.positions.push_back({values[xyz[0]], values[xyz[1]], values[xyz[2]]});
            if (with_normals) cloud.normals->push_back({values[*nx], values[*ny], values[*nz]});
            if (with_colors) {
                Rgb c{};
                const std::size_t idx[] = {*r, *g, *b};
                for (int k = 0; k < 3; ++k) {
                    const double v = values[idx[k]];
                    if (!(v >= 0.0 && v <= 255.0) || v != std::floor(v)) {
                        throw ParseError(reader.location() + ": color component " + detail::format_exact(v) +
                                         " of vertex " + std::to_string(n) + " is not in 0..255");
                    }
                    c[k] = static_cast<std::uint8_t>(v);
                }
                cloud.colors->push_back(c);
            }
        }
    }
    try {
        validate(cloud);
    } catch (const ValidationError& e) {
        throw ParseError(source + ": " + e.what());
    }
    return cloud;
}

inline PointCloud parse_ply(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_ply_data(data, path);
}

struct PlyWriteOptions {
    PlyFormat format = PlyFormat::BinaryLittleEndian;
    bool double_precision = false;  // positions and normals as double instead of float
};

inline std::string write_ply_data(const PointCloud& cloud, const PlyWriteOptions& opts = {}) {
    std::ostringstream out;
    const char* real = opts.double_precision ? "double" : "float";
    out << "ply\nformat " << (opts.format == PlyFormat::Ascii ? "ascii" : "binary_little_endian") << " 1.0\n";
    out << "element vertex " << cloud.size() << '\n';
    out << "property " << real << " x\nproperty " << real << " y\nproperty " << real << " z\n";
    if (cloud.normals) out << "property " << real << " nx\nproperty " << real << " ny\nproperty " << real << " nz\n";
    if (cloud.colors) out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    out << "end_header\n";

    const auto put_real = [&](double v, bool last) {
        if (opts.format == PlyFormat::Ascii) {
            char buf[64];
            const auto res = opts.double_precision ? std::to_chars(buf, buf + sizeof buf, v)
                                                   : std::to_chars(buf, buf + sizeof buf, static_cast<float>(v));
            out.write(buf, res.ptr - buf);
            out << (last ? '\n' : ' ');
            return;
        }
        const auto put = [&](auto x) {
            auto bytes = std::bit_cast<std::array<char, sizeof(x)>>(x);
            if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
            out.write(bytes.data(), bytes.size());
        };
        if (opts.double_precision) put(v);
        else put(static_cast<float>(v));
    };
    const auto put_byte = [&](std::uint8_t v, bool last) {
        if (opts.format == PlyFormat::Ascii) {
            out << static_cast<int>(v) << (last ? '\n' : ' ');
        } else {
            out.put(static_cast<char>(v));
        }
    };

    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const bool tail_normals = !!cloud.normals, tail_colors = !!cloud.colors;
        for (int k = 0; k < 3; ++k) put_real(cloud.positions[i][k], k == 2 && !tail_normals && !tail_colors);
        if (tail_normals) {
            for (int k = 0; k < 3; ++k) put_real((*cloud.normals)[i][k], k == 2 && !tail_colors);
        }
        if (tail_colors) {
            for (int k = 0; k < 3; ++k) put_byte((*cloud.colors)[i][k], k == 2);
        }
    }
    return out.str();
}

inline void write_ply(const PointCloud& cloud, const std::string& path, const PlyWriteOptions& opts = {}) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    const auto data = write_ply_data(cloud, opts);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace pcqa
