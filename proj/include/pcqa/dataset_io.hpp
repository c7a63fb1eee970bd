#pragma once

// Annotated-sample CSV files, built-in compression-parameter grids and the
// coefficient text format.
//
// Sample CSV:
//     content_id,codec,condition,geom_param,attr_param,mos
//     longdress,VPCC,lossyG_lossyA,28,37,4.1
//     soldier,GPCC,losslessG_lossyA,,43,3.8
// An empty parameter field means the channel is lossless.
//
// Coefficient file, one `codec.field = value` entry per line:
//     VPCC.c1_a = -0.0089
//     VPCC.geometry_form = NaturalLog
// Blank lines and lines starting with '#' are ignored.

#include <array>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "pcqa/codec_params.hpp"
#include "pcqa/detail/text.hpp"
#include "pcqa/error.hpp"
#include "pcqa/model_fitting.hpp"
#include "pcqa/quality_model.hpp"

namespace pcqa {

// ---------------------------------------------------------------------------
// Built-in parameter grids

struct GridRow {
    std::optional<double> geom;
    std::optional<double> attr;

    friend bool operator==(const GridRow&, const GridRow&) = default;
};

struct ParameterGrid {
    Codec codec;
    CompressionCondition condition;
    std::array<GridRow, 5> rows;

    CodecParams params(std::size_t i) const { return {codec, condition, rows.at(i).attr, rows.at(i).geom}; }
};

// Five-level parameter grid used to generate the distorted point clouds for
// each codec and compression condition.
inline ParameterGrid builtin_grid(Codec codec, CompressionCondition condition) {
    using C = CompressionCondition;
    const auto geom_only = [](std::array<double, 5> g) {
        std::array<GridRow, 5> r;
        for (std::size_t i = 0; i < 5; ++i) r[i] = {g[i], std::nullopt};
        return r;
    };
    const auto attr_only = [](std::array<double, 5> a) {
        std::array<GridRow, 5> r;
        for (std::size_t i = 0; i < 5; ++i) r[i] = {std::nullopt, a[i]};
        return r;
    };
    const auto both = [](std::array<double, 5> g, std::array<double, 5> a) {
        std::array<GridRow, 5> r;
        for (std::size_t i = 0; i < 5; ++i) r[i] = {g[i], a[i]};
        return r;
    };

    switch (codec) {
        case Codec::VPCC:  // geomQP, textureQP
            switch (condition) {
                case C::LossyGeoLosslessAttr: return {codec, condition, geom_only({22, 32, 37, 42, 51})};
                case C::LosslessGeoLossyAttr: return {codec, condition, attr_only({32, 37, 42, 47, 51})};
                case C::LossyGeoLossyAttr:
                    return {codec, condition, both({24, 28, 32, 36, 40}, {32, 37, 42, 47, 51})};
            }
            break;
        case Codec::GPCC:  // positionQuantizationScale, qp
            switch (condition) {
                case C::LossyGeoLosslessAttr:
                    return {codec, condition, geom_only({0.75, 0.5, 0.25, 0.125, 0.0625})};
                case C::LosslessGeoLossyAttr: return {codec, condition, attr_only({35, 39, 43, 47, 51})};
                case C::LossyGeoLossyAttr:
                    return {codec, condition, both({0.75, 0.5, 0.25, 0.125, 0.0625}, {35, 39, 43, 47, 51})};
            }
            break;
        case Codec::AVS:  // geom_quant_step, attr_quant_param
            switch (condition) {
                case C::LossyGeoLosslessAttr: return {codec, condition, geom_only({2, 4, 8, 12, 16})};
                case C::LosslessGeoLossyAttr: return {codec, condition, attr_only({24, 32, 40, 44, 48})};
                case C::LossyGeoLossyAttr: return {codec, condition, both({2, 4, 8, 12, 16}, {24, 32, 40, 44, 48})};
            }
            break;
    }
    throw ValidationError("no built-in grid for this codec/condition");
}

// ---------------------------------------------------------------------------
// Sample CSV

inline constexpr std::string_view kSampleHeader = "content_id,codec,condition,geom_param,attr_param,mos";

struct RejectedRow {
    std::size_t line = 0;
    std::string message;
};

struct DatasetManifest {
    std::vector<AnnotatedSample> samples;
    std::string source_path;
    std::size_t row_count = 0;
    std::vector<RejectedRow> rejected;
};

struct LoadOptions {
    // Accept scores outside [1, 5] (z-score normalized datasets).
    bool relax_mos_bounds = false;
    // Require exactly 225 rows: 5 contents x 3 codecs x 3 conditions x 5 levels.
    bool require_full_dataset = false;
    // Collect invalid rows in `rejected` instead of failing on them.
    bool skip_invalid_rows = false;
};

inline constexpr std::size_t kFullDatasetRows = 225;

namespace detail {

inline AnnotatedSample parse_sample_row(std::string_view line, const LoadOptions& opts) {
    const auto fields = split(line, ',');
    if (fields.size() != 6) {
        throw ValidationError("expected 6 fields, found " + std::to_string(fields.size()));
    }
    AnnotatedSample s;
    s.content_id = std::string(trim(fields[0]));
    if (s.content_id.empty()) throw ValidationError("empty content_id");
    s.params.codec = parse_codec(fields[1]);
    s.params.condition = parse_condition(fields[2]);
    const auto optional_number = [](std::string_view token, const char* name) -> std::optional<double> {
        token = trim(token);
        if (token.empty()) return std::nullopt;
        const auto v = parse_double(token);
        if (!v) throw ValidationError(std::string(name) + " '" + std::string(token) + "' is not a number");
        return v;
    };
    s.params.geom = optional_number(fields[3], "geom_param");
    s.params.attr = optional_number(fields[4], "attr_param");
    const auto mos = parse_double(fields[5]);
    if (!mos) throw ValidationError("mos '" + std::string(trim(fields[5])) + "' is not a number");
    s.mos = *mos;
    if (!opts.relax_mos_bounds && !(s.mos >= 1.0 && s.mos <= 5.0)) {
        throw ValidationError("mos " + format_exact(s.mos) + " is outside [1, 5]");
    }
    to_quant_steps(s.params);  // presence and range checks
    return s;
}

}  // namespace detail

inline DatasetManifest read_samples(std::istream& in, std::string source, const LoadOptions& opts = {}) {
    DatasetManifest manifest;
    manifest.source_path = std::move(source);
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto view = detail::trim(line);
        if (view.empty()) continue;
        if (!have_header) {
            if (view != kSampleHeader) {
                throw ParseError(manifest.source_path + ":" + std::to_string(line_no) + ": missing header '" +
                                 std::string(kSampleHeader) + "'");
            }
            have_header = true;
            continue;
        }
        try {
            manifest.samples.push_back(detail::parse_sample_row(view, opts));
        } catch (const ValidationError& e) {
            const std::string msg = manifest.source_path + ":" + std::to_string(line_no) + ": " + e.what();
            if (!opts.skip_invalid_rows) throw ValidationError(msg);
            manifest.rejected.push_back({line_no, msg});
        }
    }
    if (!have_header) {
        throw ParseError(manifest.source_path + ": missing header '" + std::string(kSampleHeader) + "'");
    }
    manifest.row_count = manifest.samples.size();
    if (opts.require_full_dataset && manifest.row_count != kFullDatasetRows) {
        throw ValidationError(manifest.source_path + ": expected " + std::to_string(kFullDatasetRows) +
                              " rows for a full dataset, found " + std::to_string(manifest.row_count));
    }
    return manifest;
}

inline DatasetManifest load_samples(const std::string& path, const LoadOptions& opts = {}) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return read_samples(in, path, opts);
}

inline void write_samples(std::ostream& out, std::span<const AnnotatedSample> samples) {
    out << kSampleHeader << '\n';
    const auto opt = [](const std::optional<double>& v) { return v ? detail::format_exact(*v) : std::string(); };
    for (const auto& s : samples) {
        out << s.content_id << ',' << to_string(s.codec()) << ',' << to_string(s.condition()) << ','
            << opt(s.params.geom) << ',' << opt(s.params.attr) << ',' << detail::format_exact(s.mos) << '\n';
    }
}

inline void save_samples(std::span<const AnnotatedSample> samples, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_samples(out, samples);
    if (!out) throw IoError("failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// Coefficient files

// Values are written in the shortest form that reads back to the same double,
// so table constants appear exactly as printed (e.g. -0.0089).
inline void write_coefficients(std::ostream& out, std::span<const ModelCoefficients> models) {
    for (const auto& m : models) {
        const auto codec = to_string(m.codec);
        out << codec << ".c1_a = " << detail::format_exact(m.c1_a) << '\n'
            << codec << ".c2_a = " << detail::format_exact(m.c2_a) << '\n'
            << codec << ".c1_g = " << detail::format_exact(m.c1_g) << '\n'
            << codec << ".c2_g = " << detail::format_exact(m.c2_g) << '\n'
            << codec << ".geometry_form = " << to_string(m.geometry_form) << '\n';
    }
}

inline void save_coefficients(std::span<const ModelCoefficients> models, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_coefficients(out, models);
    if (!out) throw IoError("failed writing '" + path + "'");
}

// Codecs are returned in order of first appearance. A codec without a
// geometry_form entry gets the codec default and a warning.
inline std::vector<ModelCoefficients> read_coefficients(std::istream& in, const std::string& source,
                                                        std::vector<std::string>* warnings = nullptr) {
    struct Partial {
        std::optional<double> c1_a, c2_a, c1_g, c2_g;
        std::optional<GeometryForm> form;
    };
    std::vector<Codec> order;
    std::map<Codec, Partial> partial;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto view = detail::trim(line);
        if (view.empty() || view.front() == '#') continue;
        const auto where = source + ":" + std::to_string(line_no) + ": ";
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) throw ParseError(where + "expected 'codec.field = value'");
        const auto key = detail::trim(view.substr(0, eq));
        const auto value = detail::trim(view.substr(eq + 1));
        const auto dot = key.find('.');
        if (dot == std::string_view::npos) throw ParseError(where + "key '" + std::string(key) + "' has no codec prefix");
        Codec codec;
        try {
            codec = parse_codec(key.substr(0, dot));
        } catch (const ValidationError& e) {
            throw ParseError(where + e.what());
        }
        const auto field = key.substr(dot + 1);
        auto [it, inserted] = partial.try_emplace(codec);
        if (inserted) order.push_back(codec);
        Partial& p = it->second;

        const auto conflict = [&] {
            return ValidationError(where + "duplicate entry for " + std::string(key));
        };
        if (field == "geometry_form") {
            if (p.form) throw conflict();
            try {
                p.form = parse_geometry_form(value);
            } catch (const ValidationError& e) {
                throw ParseError(where + e.what());
            }
            continue;
        }
        std::optional<double>* slot = nullptr;
        if (field == "c1_a") slot = &p.c1_a;
        else if (field == "c2_a") slot = &p.c2_a;
        else if (field == "c1_g") slot = &p.c1_g;
        else if (field == "c2_g") slot = &p.c2_g;
        else throw ParseError(where + "unknown key '" + std::string(key) + "'");
        if (slot->has_value()) throw conflict();
        const auto number = detail::parse_double(value);
        if (!number) throw ParseError(where + "value '" + std::string(value) + "' is not a number");
        *slot = number;
    }

    std::vector<ModelCoefficients> models;
    for (Codec codec : order) {
        const Partial& p = partial.at(codec);
        const auto name = std::string(to_string(codec));
        const auto require = [&](const std::optional<double>& v, const char* field) {
            if (!v) throw ParseError(source + ": missing " + name + "." + field);
            return *v;
        };
        ModelCoefficients m{codec, require(p.c1_a, "c1_a"), require(p.c2_a, "c2_a"), require(p.c1_g, "c1_g"),
                            require(p.c2_g, "c2_g"), default_geometry_form(codec)};
        if (p.form) {
            m.geometry_form = *p.form;
        } else if (warnings) {
            warnings->push_back(source + ": " + name + ".geometry_form missing, using " +
                                std::string(to_string(m.geometry_form)));
        }
        models.push_back(m);
    }
    return models;
}

inline std::vector<ModelCoefficients> load_coefficients(const std::string& path,
                                                        std::vector<std::string>* warnings = nullptr) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return read_coefficients(in, path, warnings);
}

inline std::vector<ModelCoefficients> default_coefficient_set() {
    return {default_coefficients(Codec::VPCC), default_coefficients(Codec::GPCC), default_coefficients(Codec::AVS)};
}

// Looks up one codec in a loaded set.
inline const ModelCoefficients& find_coefficients(std::span<const ModelCoefficients> models, Codec codec) {
    for (const auto& m : models) {
        if (m.codec == codec) return m;
    }
    throw ValidationError("no coefficients for " + std::string(to_string(codec)));
}

}  // namespace pcqa
