#pragma once

// Quantization-step quality models.
//
// Attribute channel (all codecs):   MOS_a = c1_a * Qs_a + c2_a
// Geometry channel, V-PCC:          MOS_g = c1_g * ln(Qs_g) + c2_g
// Geometry channel, G-PCC and AVS:  MOS_g = c1_g * Qs_g + c2_g
//
// When both channels are lossy the two sub-scores are combined. The linear
// scheme uses the halved slopes p1 = c1 / 2 and the shared intercept
// P = (c2_a + c2_g) / 2, which equals the mean of the two sub-scores.

#include <array>
#include <cmath>
#include <string>
#include <string_view>

#include "pcqa/codec_params.hpp"
#include "pcqa/error.hpp"

namespace pcqa {

enum class GeometryForm { Linear, NaturalLog };

constexpr std::string_view to_string(GeometryForm form) {
    return form == GeometryForm::NaturalLog ? "NaturalLog" : "Linear";
}

inline GeometryForm parse_geometry_form(std::string_view token) {
    token = detail::trim(token);
    if (token == "Linear") return GeometryForm::Linear;
    if (token == "NaturalLog") return GeometryForm::NaturalLog;
    throw ValidationError("unknown geometry form '" + std::string(token) + "' (expected Linear or NaturalLog)");
}

constexpr GeometryForm default_geometry_form(Codec codec) {
    return codec == Codec::VPCC ? GeometryForm::NaturalLog : GeometryForm::Linear;
}

struct ModelCoefficients {
    Codec codec = Codec::VPCC;
    double c1_a = 0.0;
    double c2_a = 0.0;
    double c1_g = 0.0;
    double c2_g = 0.0;
    GeometryForm geometry_form = GeometryForm::NaturalLog;

    double p1_a() const { return c1_a / 2.0; }
    double p1_g() const { return c1_g / 2.0; }
    double combined_intercept() const { return (c2_a + c2_g) / 2.0; }

    friend bool operator==(const ModelCoefficients&, const ModelCoefficients&) = default;
};

// Fitted constants for the three codecs.
inline ModelCoefficients default_coefficients(Codec codec) {
    switch (codec) {
        case Codec::VPCC: return {Codec::VPCC, -0.0089, 4.4862, -0.559, 5.4165, GeometryForm::NaturalLog};
        case Codec::GPCC: return {Codec::GPCC, -0.01, 5.3515, -0.2381, 5.3818, GeometryForm::Linear};
        case Codec::AVS: return {Codec::AVS, -0.0519, 5.1337, -0.273, 5.5034, GeometryForm::Linear};
    }
    throw ValidationError("unknown codec");
}

enum class CombinationScheme { Linear, Multiplicative, GPowerA, APowerG };

inline constexpr std::array<CombinationScheme, 4> kAllSchemes{
    CombinationScheme::Linear, CombinationScheme::Multiplicative, CombinationScheme::GPowerA,
    CombinationScheme::APowerG};

constexpr std::string_view to_string(CombinationScheme scheme) {
    switch (scheme) {
        case CombinationScheme::Linear: return "linear";
        case CombinationScheme::Multiplicative: return "multiplicative";
        case CombinationScheme::GPowerA: return "g-pow-a";
        case CombinationScheme::APowerG: return "a-pow-g";
    }
    return "?";
}

inline CombinationScheme parse_scheme(std::string_view token) {
    token = detail::trim(token);
    for (auto scheme : kAllSchemes) {
        if (token == to_string(scheme)) return scheme;
    }
    throw ValidationError("unknown combination scheme '" + std::string(token) +
                          "' (expected linear, multiplicative, g-pow-a or a-pow-g)");
}

// Subjective scale. `ceiling` doubles as the normalizer M of the
// non-linear combination schemes.
struct ScoreRange {
    double floor = 1.0;
    double ceiling = 5.0;
};

struct PredictOptions {
    bool clamp = false;
    ScoreRange range{};
};

struct PredictedScore {
    double value = 0.0;
    bool clamped = false;  // clamping to `range` was in effect
};

namespace detail {

inline void require_step(double qs, std::string_view name) {
    if (!(qs >= 1.0) || !std::isfinite(qs)) {
        throw ParameterDomainError(std::string(name), std::string(name) + " = " + format_exact(qs) + " must be >= 1");
    }
}

inline PredictedScore finish(double raw, const PredictOptions& opts) {
    if (!opts.clamp) return {raw, false};
    return {std::fmin(std::fmax(raw, opts.range.floor), opts.range.ceiling), true};
}

inline double attribute_raw(const ModelCoefficients& c, double qs_a) {
    require_step(qs_a, "qs_a");
    return c.c1_a * qs_a + c.c2_a;
}

inline double geometry_transform(GeometryForm form, double qs_g) {
    return form == GeometryForm::NaturalLog ? std::log(qs_g) : qs_g;
}

inline double geometry_raw(const ModelCoefficients& c, double qs_g) {
    require_step(qs_g, "qs_g");
    return c.c1_g * geometry_transform(c.geometry_form, qs_g) + c.c2_g;
}

inline void require_positive(double sub_score, std::string_view name, CombinationScheme scheme) {
    if (!(sub_score > 0.0)) {
        throw NumericDomainError(std::string(to_string(scheme)) + " scheme needs a positive " + std::string(name) +
                                 " sub-score, got " + format_exact(sub_score));
    }
}

}  // namespace detail

inline PredictedScore predict_attribute(const ModelCoefficients& coeffs, double qs_a, const PredictOptions& opts = {}) {
    return detail::finish(detail::attribute_raw(coeffs, qs_a), opts);
}

inline PredictedScore predict_geometry(const ModelCoefficients& coeffs, double qs_g, const PredictOptions& opts = {}) {
    return detail::finish(detail::geometry_raw(coeffs, qs_g), opts);
}

// Multiplicative:  M * (a/M) * (g/M)
// GPowerA:         M * (g/M)^(M/a)
// APowerG:         M * (a/M)^(M/g)
// where a, g are the unclamped sub-scores and M is the scale ceiling. The
// exponent is the reciprocal of the normalized score of the other channel, so
// a worse channel raises the exponent and lowers the result; with sub-scores
// in (0, M) every scheme is strictly decreasing in both Qs.
inline PredictedScore predict_combined(const ModelCoefficients& coeffs, double qs_a, double qs_g,
                                       CombinationScheme scheme, const PredictOptions& opts = {}) {
    detail::require_step(qs_a, "qs_a");
    detail::require_step(qs_g, "qs_g");
    const double m = opts.range.ceiling;
    double raw = 0.0;
    switch (scheme) {
        case CombinationScheme::Linear:
            raw = coeffs.p1_a() * qs_a + coeffs.p1_g() * detail::geometry_transform(coeffs.geometry_form, qs_g) +
                  coeffs.combined_intercept();
            break;
        case CombinationScheme::Multiplicative: {
            const double a = detail::attribute_raw(coeffs, qs_a);
            const double g = detail::geometry_raw(coeffs, qs_g);
            detail::require_positive(a, "attribute", scheme);
            detail::require_positive(g, "geometry", scheme);
            raw = m * (a / m) * (g / m);
            break;
        }
        case CombinationScheme::GPowerA: {
            const double a = detail::attribute_raw(coeffs, qs_a);
            const double g = detail::geometry_raw(coeffs, qs_g);
            detail::require_positive(a, "attribute", scheme);
            detail::require_positive(g, "geometry", scheme);
            raw = m * std::pow(g / m, m / a);
            break;
        }
        case CombinationScheme::APowerG: {
            const double a = detail::attribute_raw(coeffs, qs_a);
            const double g = detail::geometry_raw(coeffs, qs_g);
            detail::require_positive(a, "attribute", scheme);
            detail::require_positive(g, "geometry", scheme);
            raw = m * std::pow(a / m, m / g);
            break;
        }
    }
    if (!std::isfinite(raw)) {
        throw NumericDomainError(std::string(to_string(scheme)) + " scheme produced a non-finite score");
    }
    return detail::finish(raw, opts);
}

// Converts the parameters and routes to the model of the lossy channel(s).
// A lossless channel contributes no sub-model.
inline PredictedScore predict(const CodecParams& params, const ModelCoefficients& coeffs, CombinationScheme scheme,
                              const PredictOptions& opts = {}) {
    if (params.codec != coeffs.codec) {
        throw ValidationError("coefficients for " + std::string(to_string(coeffs.codec)) + " cannot score " +
                              std::string(to_string(params.codec)) + " parameters");
    }
    const QuantSteps steps = to_quant_steps(params);
    switch (params.condition) {
        case CompressionCondition::LosslessGeoLossyAttr: return predict_attribute(coeffs, *steps.qs_a, opts);
        case CompressionCondition::LossyGeoLosslessAttr: return predict_geometry(coeffs, *steps.qs_g, opts);
        case CompressionCondition::LossyGeoLossyAttr:
            return predict_combined(coeffs, *steps.qs_a, *steps.qs_g, scheme, opts);
    }
    throw ValidationError("unknown compression condition");
}

}  // namespace pcqa
