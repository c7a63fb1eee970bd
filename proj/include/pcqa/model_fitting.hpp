#pragma once

// Least-squares re-fitting of the per-codec quality models.
//
// Observed scores follow MOS = F(Qs) + c(pc): a shared curve F per
// compression condition plus an additive offset per reference content. F is
// fitted on the per-level averages (Qs, mean MOS); the offsets are recovered
// afterwards from the raw residuals and centred so they sum to zero.

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pcqa/codec_params.hpp"
#include "pcqa/error.hpp"
#include "pcqa/quality_model.hpp"

namespace pcqa {

struct AnnotatedSample {
    std::string content_id;
    CodecParams params;
    double mos = 0.0;

    Codec codec() const { return params.codec; }
    CompressionCondition condition() const { return params.condition; }

    friend bool operator==(const AnnotatedSample&, const AnnotatedSample&) = default;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

struct LevelMean {
    double qs = 0.0;
    double mean_mos = 0.0;
    std::size_t count = 0;
};

struct ContentFactor {
    std::string content_id;
    double offset = 0.0;
};

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    GeometryForm form = GeometryForm::Linear;
    double residual_rms = 0.0;
    std::size_t n_points = 0;
    std::vector<ContentFactor> factors;

    double evaluate(double qs) const {
        return slope * (form == GeometryForm::NaturalLog ? std::log(qs) : qs) + intercept;
    }
};

struct FitOptions {
    // Two Qs values closer than this fall into the same level. Zero means
    // exact equality, which is right for Qs produced by the conversions.
    double qs_tolerance = 0.0;
};

// Qs of the single lossy channel of a sample.
inline double relevant_qs(const AnnotatedSample& sample) {
    const QuantSteps steps = to_quant_steps(sample.params);
    switch (sample.condition()) {
        case CompressionCondition::LosslessGeoLossyAttr: return *steps.qs_a;
        case CompressionCondition::LossyGeoLosslessAttr: return *steps.qs_g;
        case CompressionCondition::LossyGeoLossyAttr: break;
    }
    throw ValidationError("sample '" + sample.content_id +
                          "': lossyG_lossyA samples have two quantization steps and cannot be collapsed to one level");
}

inline std::vector<LevelMean> collapse_to_mean(std::span<const AnnotatedSample> samples, const FitOptions& opts = {}) {
    if (samples.empty()) return {};
    const Codec codec = samples.front().codec();
    const CompressionCondition condition = samples.front().condition();
    std::vector<Point2> points;
    points.reserve(samples.size());
    for (const auto& s : samples) {
        if (s.codec() != codec || s.condition() != condition) {
            throw ValidationError("cannot group samples of " + std::string(to_string(codec)) + "/" +
                                  std::string(to_string(condition)) + " with " + std::string(to_string(s.codec())) +
                                  "/" + std::string(to_string(s.condition())));
        }
        points.push_back({relevant_qs(s), s.mos});
    }
    std::stable_sort(points.begin(), points.end(), [](const Point2& a, const Point2& b) { return a.x < b.x; });

    std::vector<LevelMean> levels;
    std::size_t i = 0;
    while (i < points.size()) {
        std::size_t j = i;
        double sum = 0.0;
        while (j < points.size() && points[j].x - points[i].x <= opts.qs_tolerance) {
            sum += points[j].y;
            ++j;
        }
        levels.push_back({points[i].x, sum / static_cast<double>(j - i), j - i});
        i = j;
    }
    return levels;
}

// Ordinary least squares y = slope * x + intercept.
inline FitResult fit_linear(std::span<const Point2> points) {
    const std::size_t n = points.size();
    std::size_t distinct = 0;
    {
        std::vector<double> xs;
        for (const auto& p : points) xs.push_back(p.x);
        std::sort(xs.begin(), xs.end());
        distinct = static_cast<std::size_t>(std::unique(xs.begin(), xs.end()) - xs.begin());
    }
    if (distinct < 2) {
        throw NumericDomainError("degenerate fit: need at least 2 distinct x values, got " + std::to_string(distinct));
    }
    double mx = 0.0, my = 0.0;
    for (const auto& p : points) {
        mx += p.x;
        my += p.y;
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (const auto& p : points) {
        sxx += (p.x - mx) * (p.x - mx);
        sxy += (p.x - mx) * (p.y - my);
    }
    FitResult fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.form = GeometryForm::Linear;
    fit.n_points = n;
    double ssr = 0.0;
    for (const auto& p : points) {
        const double r = p.y - (fit.slope * p.x + fit.intercept);
        ssr += r * r;
    }
    fit.residual_rms = std::sqrt(ssr / static_cast<double>(n));
    return fit;
}

// OLS of y against ln(x).
inline FitResult fit_log_linear(std::span<const Point2> points) {
    std::vector<Point2> logged;
    logged.reserve(points.size());
    for (const auto& p : points) {
        if (!(p.x > 0.0)) {
            throw NumericDomainError("log-linear fit needs positive x, got " + detail::format_exact(p.x));
        }
        logged.push_back({std::log(p.x), p.y});
    }
    FitResult fit = fit_linear(logged);
    fit.form = GeometryForm::NaturalLog;
    return fit;
}

inline FitResult fit_levels(std::span<const LevelMean> levels, GeometryForm form) {
    std::vector<Point2> points;
    points.reserve(levels.size());
    for (const auto& l : levels) points.push_back({l.qs, l.mean_mos});
    return form == GeometryForm::NaturalLog ? fit_log_linear(points) : fit_linear(points);
}

// Per-content offsets c(pc): mean residual of that content's samples against
// the fitted curve, then centred to sum to zero. Contents keep the order of
// their first appearance.
inline std::vector<ContentFactor> estimate_content_factors(std::span<const AnnotatedSample> samples,
                                                           const FitResult& fit) {
    std::vector<std::string> order;
    std::map<std::string, std::pair<double, std::size_t>> acc;
    for (const auto& s : samples) {
        auto [it, inserted] = acc.try_emplace(s.content_id, 0.0, 0);
        if (inserted) order.push_back(s.content_id);
        it->second.first += s.mos - fit.evaluate(relevant_qs(s));
        it->second.second += 1;
    }
    std::vector<ContentFactor> factors;
    double centre = 0.0;
    for (const auto& id : order) {
        const auto& [sum, count] = acc.at(id);
        factors.push_back({id, sum / static_cast<double>(count)});
        centre += factors.back().offset;
    }
    if (factors.empty()) return factors;
    centre /= static_cast<double>(factors.size());
    for (auto& f : factors) f.offset -= centre;
    return factors;
}

// Collapse, fit and estimate content factors for one codec/condition group.
inline FitResult fit_group(std::span<const AnnotatedSample> samples, GeometryForm form, const FitOptions& opts = {}) {
    const auto levels = collapse_to_mean(samples, opts);
    FitResult fit = fit_levels(levels, form);
    fit.factors = estimate_content_factors(samples, fit);
    return fit;
}

struct CodecFit {
    ModelCoefficients coefficients;
    FitResult attribute;
    FitResult geometry;
};

// Fits the attribute model on the lossless-geometry group and the geometry
// model on the lossless-attribute group of one codec. lossyG_lossyA samples
// are held out and ignored.
inline CodecFit fit_codec(std::span<const AnnotatedSample> samples, const FitOptions& opts = {}) {
    if (samples.empty()) throw ValidationError("no samples to fit");
    const Codec codec = samples.front().codec();
    std::vector<AnnotatedSample> attr_group, geom_group;
    for (const auto& s : samples) {
        if (s.codec() != codec) {
            throw ValidationError("fit_codec expects a single codec, found " + std::string(to_string(codec)) +
                                  " and " + std::string(to_string(s.codec())));
        }
        if (s.condition() == CompressionCondition::LosslessGeoLossyAttr) attr_group.push_back(s);
        if (s.condition() == CompressionCondition::LossyGeoLosslessAttr) geom_group.push_back(s);
    }
    const auto missing = [&](CompressionCondition c) {
        return ValidationError(std::string(to_string(codec)) + ": incomplete data, no " +
                               std::string(to_string(c)) + " samples");
    };
    if (attr_group.empty()) throw missing(CompressionCondition::LosslessGeoLossyAttr);
    if (geom_group.empty()) throw missing(CompressionCondition::LossyGeoLosslessAttr);

    CodecFit out;
    const GeometryForm geom_form = default_geometry_form(codec);
    out.attribute = fit_group(attr_group, GeometryForm::Linear, opts);
    out.geometry = fit_group(geom_group, geom_form, opts);
    out.coefficients = {codec, out.attribute.slope, out.attribute.intercept, out.geometry.slope,
                        out.geometry.intercept, geom_form};
    return out;
}

inline ModelCoefficients fit_codec_models(std::span<const AnnotatedSample> samples, const FitOptions& opts = {}) {
    return fit_codec(samples, opts).coefficients;
}

}  // namespace pcqa
