#pragma once

// Conversion of codec-specific compression parameters (V-PCC textureQP/geomQP,
// G-PCC qp/positionQuantizationScale, AVS attr_quant_param/geom_quant_step)
// into a unified quantization step Qs per channel.

#include <array>
#include <cctype>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "pcqa/detail/text.hpp"
#include "pcqa/error.hpp"

namespace pcqa {

enum class Codec { VPCC, GPCC, AVS };

enum class CompressionCondition {
    LosslessGeoLossyAttr,
    LossyGeoLosslessAttr,
    LossyGeoLossyAttr,
};

inline constexpr std::array<Codec, 3> kAllCodecs{Codec::VPCC, Codec::GPCC, Codec::AVS};
inline constexpr std::array<CompressionCondition, 3> kAllConditions{
    CompressionCondition::LosslessGeoLossyAttr,
    CompressionCondition::LossyGeoLosslessAttr,
    CompressionCondition::LossyGeoLossyAttr,
};

constexpr std::string_view to_string(Codec codec) {
    switch (codec) {
        case Codec::VPCC: return "VPCC";
        case Codec::GPCC: return "GPCC";
        case Codec::AVS: return "AVS";
    }
    return "?";
}

constexpr std::string_view to_string(CompressionCondition condition) {
    switch (condition) {
        case CompressionCondition::LosslessGeoLossyAttr: return "losslessG_lossyA";
        case CompressionCondition::LossyGeoLosslessAttr: return "lossyG_losslessA";
        case CompressionCondition::LossyGeoLossyAttr: return "lossyG_lossyA";
    }
    return "?";
}

// Codec names are matched case-insensitively ("vpcc" on the command line,
// "VPCC" in data files).
inline Codec parse_codec(std::string_view token) {
    std::string upper;
    for (char c : detail::trim(token)) upper += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    for (Codec codec : kAllCodecs) {
        if (upper == to_string(codec)) return codec;
    }
    throw ValidationError("unknown codec '" + std::string(token) + "' (expected VPCC, GPCC or AVS)");
}

// Condition tokens are case-sensitive.
inline CompressionCondition parse_condition(std::string_view token) {
    token = detail::trim(token);
    for (CompressionCondition condition : kAllConditions) {
        if (token == to_string(condition)) return condition;
    }
    throw ValidationError("unknown compression condition '" + std::string(token) +
                          "' (expected losslessG_lossyA, lossyG_losslessA or lossyG_lossyA)");
}

constexpr bool attribute_is_lossy(CompressionCondition c) {
    return c != CompressionCondition::LossyGeoLosslessAttr;
}

constexpr bool geometry_is_lossy(CompressionCondition c) {
    return c != CompressionCondition::LosslessGeoLossyAttr;
}

// Raw encoder parameters. `attr` is textureQP (V-PCC), qp (G-PCC) or
// attr_quant_param (AVS); `geom` is geomQP (V-PCC), positionQuantizationScale
// (G-PCC) or geom_quant_step (AVS). A channel coded losslessly has no value.
struct CodecParams {
    Codec codec = Codec::VPCC;
    CompressionCondition condition = CompressionCondition::LossyGeoLossyAttr;
    std::optional<double> attr;
    std::optional<double> geom;

    friend bool operator==(const CodecParams&, const CodecParams&) = default;
};

struct QuantSteps {
    std::optional<double> qs_a;
    std::optional<double> qs_g;

    friend bool operator==(const QuantSteps&, const QuantSteps&) = default;
};

namespace detail {

inline std::string describe(double v) { return format_exact(v); }

inline int checked_qp(double qp, std::string_view field) {
    if (!(qp >= 0.0 && qp <= 51.0) || qp != std::floor(qp)) {
        throw ParameterDomainError(std::string(field), std::string(field) + " = " + describe(qp) +
                                                           " is outside the integer range [0, 51]");
    }
    return static_cast<int>(qp);
}

}  // namespace detail

// round(2^((qp - 4) / 6)), ties away from zero.
inline int vpcc_qp_to_qs(int qp, std::string_view field = "qp") {
    if (qp < 0 || qp > 51) {
        throw ParameterDomainError(std::string(field), std::string(field) + " = " + std::to_string(qp) +
                                                           " is outside the range [0, 51]");
    }
    const long double step = std::pow(2.0L, static_cast<long double>(qp - 4) / 6.0L);
    return static_cast<int>(std::lround(step));
}

// G-PCC attribute qp shares the V-PCC mapping.
inline int gpcc_attr_qp_to_qs(int qp, std::string_view field = "qp") {
    return vpcc_qp_to_qs(qp, field);
}

inline double gpcc_scale_to_qs(double scale, std::string_view field = "positionQuantizationScale") {
    if (!(scale > 0.0 && scale <= 1.0)) {
        throw ParameterDomainError(std::string(field), std::string(field) + " = " + detail::describe(scale) +
                                                           " is outside the range (0, 1]");
    }
    return 1.0 / scale;
}

// 2^(qp_a / 8), unrounded.
inline double avs_attr_qp_to_qs(double qp_a, std::string_view field = "attr_quant_param") {
    if (!(qp_a >= 0.0) || !std::isfinite(qp_a)) {
        throw ParameterDomainError(std::string(field), std::string(field) + " = " + detail::describe(qp_a) +
                                                           " must be >= 0");
    }
    return std::exp2(qp_a / 8.0);
}

inline double avs_geom_step_to_qs(double step, std::string_view field = "geom_quant_step") {
    if (!(step >= 1.0) || !std::isfinite(step)) {
        throw ParameterDomainError(std::string(field), std::string(field) + " = " + detail::describe(step) +
                                                           " must be >= 1");
    }
    return step;
}

// Codec-specific names of the two parameters, used in diagnostics.
constexpr std::string_view attr_param_name(Codec codec) {
    switch (codec) {
        case Codec::VPCC: return "textureQP";
        case Codec::GPCC: return "qp";
        case Codec::AVS: return "attr_quant_param";
    }
    return "attr";
}

constexpr std::string_view geom_param_name(Codec codec) {
    switch (codec) {
        case Codec::VPCC: return "geomQP";
        case Codec::GPCC: return "positionQuantizationScale";
        case Codec::AVS: return "geom_quant_step";
    }
    return "geom";
}

// Checks presence rules only (a parameter exists iff its channel is lossy).
// Value ranges are checked by the conversions.
inline void validate_presence(const CodecParams& params) {
    const std::string ctx = std::string(to_string(params.codec)) + "/" + std::string(to_string(params.condition));
    if (attribute_is_lossy(params.condition) != params.attr.has_value()) {
        throw ParameterDomainError(
            "attr", ctx + ": attribute parameter (" + std::string(attr_param_name(params.codec)) + ") must be " +
                        (attribute_is_lossy(params.condition) ? "given for a lossy attribute"
                                                              : "absent for a lossless attribute"));
    }
    if (geometry_is_lossy(params.condition) != params.geom.has_value()) {
        throw ParameterDomainError(
            "geom", ctx + ": geometry parameter (" + std::string(geom_param_name(params.codec)) + ") must be " +
                        (geometry_is_lossy(params.condition) ? "given for a lossy geometry"
                                                             : "absent for a lossless geometry"));
    }
}

inline double attr_param_to_qs(Codec codec, double value) {
    const auto field = attr_param_name(codec);
    switch (codec) {
        case Codec::VPCC: return vpcc_qp_to_qs(detail::checked_qp(value, field), field);
        case Codec::GPCC: return gpcc_attr_qp_to_qs(detail::checked_qp(value, field), field);
        case Codec::AVS: return avs_attr_qp_to_qs(value, field);
    }
    throw ValidationError("unknown codec");
}

inline double geom_param_to_qs(Codec codec, double value) {
    const auto field = geom_param_name(codec);
    switch (codec) {
        case Codec::VPCC: return vpcc_qp_to_qs(detail::checked_qp(value, field), field);
        case Codec::GPCC: return gpcc_scale_to_qs(value, field);
        case Codec::AVS: return avs_geom_step_to_qs(value, field);
    }
    throw ValidationError("unknown codec");
}

inline QuantSteps to_quant_steps(const CodecParams& params) {
    validate_presence(params);
    QuantSteps steps;
    try {
        if (params.attr) steps.qs_a = attr_param_to_qs(params.codec, *params.attr);
        if (params.geom) steps.qs_g = geom_param_to_qs(params.codec, *params.geom);
    } catch (const ParameterDomainError& e) {
        throw ParameterDomainError(e.field(), std::string(to_string(params.codec)) + "/" +
                                                  std::string(to_string(params.condition)) + ": " + e.what());
    }
    return steps;
}

}  // namespace pcqa
