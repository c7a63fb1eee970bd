#pragma once

// Command-line front end. `run` is the whole program minus process setup, so
// tests drive it in-process with string streams.
//
// Exit codes: 0 success, 1 validation error (bad flags, tokens, parameters,
// files that do not follow their format), 2 I/O error, 3 numeric-domain error.
// Machine-readable output goes to `out`; diagnostics go to `err`.

#include <CLI11.hpp>

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pcqa/codec_params.hpp"
#include "pcqa/dataset_io.hpp"
#include "pcqa/detail/text.hpp"
#include "pcqa/error.hpp"
#include "pcqa/fr_baselines.hpp"
#include "pcqa/model_fitting.hpp"
#include "pcqa/ply.hpp"
#include "pcqa/quality_model.hpp"
#include "pcqa/statistics.hpp"

namespace pcqa::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kValidation = 1, kIo = 2, kNumeric = 3 };

namespace detail {

using pcqa::detail::format_exact;
using pcqa::detail::format_report;

inline std::string opt_field(const std::optional<double>& v) { return v ? format_exact(*v) : std::string(); }

struct ChannelArgs {
    std::string codec;
    std::string condition;
    std::optional<double> attr;
    std::optional<double> geom;
};

inline void add_channel_options(CLI::App& cmd, ChannelArgs& a) {
    cmd.add_option("--codec", a.codec, "vpcc, gpcc or avs")->required();
    cmd.add_option("--condition", a.condition, "losslessG_lossyA, lossyG_losslessA or lossyG_lossyA")->required();
    cmd.add_option("--attr", a.attr, "textureQP (V-PCC), qp (G-PCC) or attr_quant_param (AVS)");
    cmd.add_option("--geom", a.geom, "geomQP (V-PCC), positionQuantizationScale (G-PCC) or geom_quant_step (AVS)");
}

inline CodecParams to_params(const ChannelArgs& a) {
    CodecParams p{parse_codec(a.codec), parse_condition(a.condition), a.attr, a.geom};
    if (attribute_is_lossy(p.condition) && !p.attr) {
        throw ValidationError("--attr is required for condition " + a.condition);
    }
    if (geometry_is_lossy(p.condition) && !p.geom) {
        throw ValidationError("--geom is required for condition " + a.condition);
    }
    if (!attribute_is_lossy(p.condition) && p.attr) {
        throw ValidationError("--attr must not be given for condition " + a.condition);
    }
    if (!geometry_is_lossy(p.condition) && p.geom) {
        throw ValidationError("--geom must not be given for condition " + a.condition);
    }
    return p;
}

inline ModelCoefficients coefficients_for(Codec codec, const std::string& path, std::ostream& err) {
    if (path.empty()) return default_coefficients(codec);
    std::vector<std::string> warnings;
    const auto models = load_coefficients(path, &warnings);
    for (const auto& w : warnings) err << "warning: " << w << '\n';
    return find_coefficients(models, codec);
}

inline std::vector<Codec> codecs_present(const std::vector<AnnotatedSample>& samples) {
    std::vector<Codec> out;
    for (Codec c : kAllCodecs) {
        for (const auto& s : samples) {
            if (s.codec() == c) {
                out.push_back(c);
                break;
            }
        }
    }
    return out;
}

inline std::vector<AnnotatedSample> of_codec(const std::vector<AnnotatedSample>& samples, Codec codec) {
    std::vector<AnnotatedSample> out;
    for (const auto& s : samples) {
        if (s.codec() == codec) out.push_back(s);
    }
    return out;
}

enum class Split { Train, Test, All };

inline Split parse_split(const std::string& token) {
    if (token == "train") return Split::Train;
    if (token == "test") return Split::Test;
    if (token == "all") return Split::All;
    throw ValidationError("unknown split '" + token + "' (expected train, test or all)");
}

inline bool in_split(Split split, CompressionCondition c) {
    switch (split) {
        case Split::Train: return c != CompressionCondition::LossyGeoLossyAttr;
        case Split::Test: return c == CompressionCondition::LossyGeoLossyAttr;
        case Split::All: return true;
    }
    return false;
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    using namespace detail;

    CLI::App app{"Quantization-step point cloud quality toolkit", "pcqa"};
    app.set_version_flag("--version", std::string("pcqa ") + kVersion);
    app.require_subcommand(1);

    // convert
    ChannelArgs convert_args;
    auto* convert = app.add_subcommand("convert", "Convert codec parameters to quantization steps");
    add_channel_options(*convert, convert_args);

    // predict
    ChannelArgs predict_args;
    std::string predict_scheme = "linear";
    std::string predict_coeffs;
    bool predict_clamp = false;
    auto* predict_cmd = app.add_subcommand("predict", "Predict MOS from codec parameters");
    add_channel_options(*predict_cmd, predict_args);
    predict_cmd->add_option("--scheme", predict_scheme, "linear, multiplicative, g-pow-a or a-pow-g")->capture_default_str();
    predict_cmd->add_option("--coeffs", predict_coeffs, "coefficient file (default: built-in)");
    predict_cmd->add_flag("--clamp", predict_clamp, "clamp the score to [1, 5]");

    // fit
    std::string fit_input, fit_codec_name, fit_out;
    bool fit_relax = false, fit_full = false;
    auto* fit_cmd = app.add_subcommand("fit", "Fit per-codec models from annotated samples");
    fit_cmd->add_option("--input", fit_input, "annotated sample CSV")->required();
    fit_cmd->add_option("--codec", fit_codec_name, "fit only this codec");
    fit_cmd->add_option("--out", fit_out, "coefficient file to write")->required();
    fit_cmd->add_flag("--relax-mos", fit_relax, "accept scores outside [1, 5]");
    fit_cmd->add_flag("--full-dataset", fit_full, "require exactly 225 rows");

    // evaluate
    std::string eval_input, eval_coeffs, eval_scheme = "linear", eval_split = "test";
    bool eval_clamp = false, eval_relax = false;
    auto* eval_cmd = app.add_subcommand("evaluate", "Score predictions against annotations");
    eval_cmd->add_option("--input", eval_input, "annotated sample CSV")->required();
    eval_cmd->add_option("--coeffs", eval_coeffs, "coefficient file (default: built-in)");
    eval_cmd->add_option("--scheme", eval_scheme, "combination scheme")->capture_default_str();
    eval_cmd->add_option("--split", eval_split, "train, test or all")->capture_default_str();
    eval_cmd->add_flag("--clamp", eval_clamp, "clamp predictions to [1, 5]");
    eval_cmd->add_flag("--relax-mos", eval_relax, "accept scores outside [1, 5]");

    // baseline
    std::string base_ref, base_deg, base_metrics = "p2point", base_peak = "diagonal";
    unsigned base_threads = 0;
    auto* base_cmd = app.add_subcommand("baseline", "Full-reference geometry and colour metrics");
    base_cmd->add_option("--ref", base_ref, "reference PLY")->required();
    base_cmd->add_option("--deg", base_deg, "degraded PLY")->required();
    base_cmd->add_option("--metrics", base_metrics, "comma list of p2point, p2plane, psnryuv")->capture_default_str();
    base_cmd->add_option("--peak", base_peak, "diagonal or value:<x>")->capture_default_str();
    base_cmd->add_option("--threads", base_threads, "worker threads (0: all cores)");

    // curve
    std::string curve_codec, curve_condition, curve_coeffs;
    double curve_min = 1.0, curve_max = 100.0;
    int curve_steps = 100;
    auto* curve_cmd = app.add_subcommand("curve", "Export (qs, predicted MOS) pairs of a single-channel model");
    curve_cmd->add_option("--codec", curve_codec, "vpcc, gpcc or avs")->required();
    curve_cmd->add_option("--condition", curve_condition, "losslessG_lossyA or lossyG_losslessA")->required();
    curve_cmd->add_option("--coeffs", curve_coeffs, "coefficient file (default: built-in)");
    curve_cmd->add_option("--qs-min", curve_min, "first quantization step")->capture_default_str();
    curve_cmd->add_option("--qs-max", curve_max, "last quantization step")->capture_default_str();
    curve_cmd->add_option("--steps", curve_steps, "number of rows")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (*convert) {
            const auto steps = to_quant_steps(to_params(convert_args));
            out << "qs_a,qs_g\n" << opt_field(steps.qs_a) << ',' << opt_field(steps.qs_g) << '\n';
        } else if (*predict_cmd) {
            const auto params = to_params(predict_args);
            const auto scheme = parse_scheme(predict_scheme);
            const auto coeffs = coefficients_for(params.codec, predict_coeffs, err);
            PredictOptions opts;
            opts.clamp = predict_clamp;
            out << format_report(predict(params, coeffs, scheme, opts).value) << '\n';
        } else if (*fit_cmd) {
            LoadOptions lo;
            lo.relax_mos_bounds = fit_relax;
            lo.require_full_dataset = fit_full;
            const auto manifest = load_samples(fit_input, lo);
            std::vector<Codec> codecs = codecs_present(manifest.samples);
            if (!fit_codec_name.empty()) codecs = {parse_codec(fit_codec_name)};
            if (codecs.empty()) throw ValidationError(fit_input + ": no samples");
            std::vector<ModelCoefficients> models;
            std::vector<CodecFit> fits;
            for (Codec c : codecs) {
                const auto subset = of_codec(manifest.samples, c);
                if (subset.empty()) throw ValidationError(fit_input + ": no " + std::string(to_string(c)) + " samples");
                fits.push_back(fit_codec(subset));
                models.push_back(fits.back().coefficients);
            }
            save_coefficients(models, fit_out);
            out << "codec,condition,slope,intercept,form,residual_rms,n_points\n";
            for (const auto& f : fits) {
                const auto codec = to_string(f.coefficients.codec);
                const auto row = [&](CompressionCondition cond, const FitResult& r) {
                    out << codec << ',' << to_string(cond) << ',' << format_exact(r.slope) << ','
                        << format_exact(r.intercept) << ',' << to_string(r.form) << ','
                        << format_exact(r.residual_rms) << ',' << r.n_points << '\n';
                };
                row(CompressionCondition::LosslessGeoLossyAttr, f.attribute);
                row(CompressionCondition::LossyGeoLosslessAttr, f.geometry);
            }
        } else if (*eval_cmd) {
            const auto split = parse_split(eval_split);
            const auto scheme = parse_scheme(eval_scheme);
            LoadOptions lo;
            lo.relax_mos_bounds = eval_relax;
            const auto manifest = load_samples(eval_input, lo);
            std::vector<ModelCoefficients> models = default_coefficient_set();
            if (!eval_coeffs.empty()) {
                std::vector<std::string> warnings;
                models = load_coefficients(eval_coeffs, &warnings);
                for (const auto& w : warnings) err << "warning: " << w << '\n';
            }
            PredictOptions opts;
            opts.clamp = eval_clamp;
            bool any = false;
            out << "metric,codec,condition,value\n";
            for (Codec c : codecs_present(manifest.samples)) {
                const auto& coeffs = find_coefficients(models, c);
                std::vector<double> predicted, observed;
                for (const auto& s : manifest.samples) {
                    if (s.codec() != c || !in_split(split, s.condition())) continue;
                    predicted.push_back(predict(s.params, coeffs, scheme, opts).value);
                    observed.push_back(s.mos);
                }
                if (predicted.empty()) continue;
                any = true;
                const auto summary = error_summary(residuals(predicted, observed));
                const auto row = [&](const char* metric, double v) {
                    out << metric << ',' << to_string(c) << ',' << eval_split << ',' << format_exact(v) << '\n';
                };
                row("plcc", plcc(predicted, observed));
                row("srocc", srocc(predicted, observed));
                row("rmse", rmse(predicted, observed));
                row("error_mean", summary.mean);
                row("error_std", summary.std_dev);
                row("error_q95", summary.quantile_95);
            }
            if (!any) throw ValidationError(eval_input + ": no samples in split '" + eval_split + "'");
        } else if (*base_cmd) {
            GeometryOptions opts;
            opts.threads = base_threads;
            if (base_peak.rfind("value:", 0) == 0) {
                const auto v = pcqa::detail::parse_double(std::string_view(base_peak).substr(6));
                if (!v || !(*v > 0.0)) throw ValidationError("--peak value must be a positive number");
                opts.peak = *v;
            } else if (base_peak != "diagonal") {
                throw ValidationError("--peak must be 'diagonal' or 'value:<x>'");
            }
            bool want_point = false, want_plane = false, want_color = false;
            for (auto token : pcqa::detail::split(base_metrics, ',')) {
                token = pcqa::detail::trim(token);
                if (token == "p2point") want_point = true;
                else if (token == "p2plane") want_plane = true;
                else if (token == "psnryuv") want_color = true;
                else throw ValidationError("unknown metric '" + std::string(token) + "'");
            }
            const PointCloud ref = parse_ply(base_ref);
            const PointCloud deg = parse_ply(base_deg);
            std::ostringstream buf;  // nothing reaches stdout unless every metric succeeds
            buf << "metric,quantity,value\n";
            const auto geometry_rows = [&](const char* metric, const GeometryReport& r) {
                const auto dir = [&](const char* name, const std::optional<DirectionalError>& d, bool hausdorff) {
                    buf << metric << ',' << name << ',';
                    if (d) buf << format_exact(hausdorff ? d->hausdorff() : d->mse);
                    buf << '\n';
                };
                dir("mse_ab", r.ab, false);
                dir("mse_ba", r.ba, false);
                buf << metric << ",mse_sym," << format_exact(r.mse_sym) << '\n';
                dir("hausdorff_ab", r.ab, true);
                dir("hausdorff_ba", r.ba, true);
                buf << metric << ",hausdorff_sym," << format_exact(r.hausdorff_sym) << '\n';
                buf << metric << ",psnr_mse," << format_exact(r.psnr_mse) << '\n';
                buf << metric << ",psnr_hausdorff," << format_exact(r.psnr_hausdorff) << '\n';
                buf << metric << ",peak," << format_exact(r.peak) << '\n';
            };
            if (want_point) geometry_rows("p2point", p2point(ref, deg, opts));
            if (want_plane) {
                if (!deg.normals) {
                    err << "warning: " << base_deg
                        << " has no normals; p2plane reports the deg->ref direction (ba) only\n";
                }
                geometry_rows("p2plane", p2plane(ref, deg, opts));
            }
            if (want_color) {
                const auto c = psnr_yuv(ref, deg, opts);
                buf << "psnryuv,mse_y," << format_exact(c.mse_y) << '\n'
                    << "psnryuv,mse_u," << format_exact(c.mse_u) << '\n'
                    << "psnryuv,mse_v," << format_exact(c.mse_v) << '\n'
                    << "psnryuv,psnr_y," << format_exact(c.psnr_y) << '\n'
                    << "psnryuv,psnr_u," << format_exact(c.psnr_u) << '\n'
                    << "psnryuv,psnr_v," << format_exact(c.psnr_v) << '\n'
                    << "psnryuv,psnr_yuv," << format_exact(c.psnr_yuv) << '\n';
            }
            out << buf.str();
        } else if (*curve_cmd) {
            const Codec codec = parse_codec(curve_codec);
            const auto condition = parse_condition(curve_condition);
            if (condition == CompressionCondition::LossyGeoLossyAttr) {
                throw ValidationError("curve needs a single-channel condition (losslessG_lossyA or lossyG_losslessA)");
            }
            if (!(curve_min >= 1.0)) throw ValidationError("--qs-min must be >= 1");
            if (!(curve_max >= curve_min)) throw ValidationError("--qs-max must be >= --qs-min");
            if (curve_steps < 1) throw ValidationError("--steps must be >= 1");
            const auto coeffs = coefficients_for(codec, curve_coeffs, err);
            out << "qs,mos\n";
            for (int i = 0; i < curve_steps; ++i) {
                const double qs = curve_steps == 1
                                      ? curve_min
                                      : curve_min + (curve_max - curve_min) * i / static_cast<double>(curve_steps - 1);
                const double mos = condition == CompressionCondition::LosslessGeoLossyAttr
                                       ? predict_attribute(coeffs, qs).value
                                       : predict_geometry(coeffs, qs).value;
                out << format_report(qs) << ',' << format_report(mos) << '\n';
            }
        }
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const NumericDomainError& e) {
        err << "error: " << e.what() << '\n';
        return kNumeric;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    }
    return kOk;
}

}  // namespace pcqa::cli
