// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "pcqa/cli.hpp"
#include "pcqa/pcqa.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

namespace {

using namespace pcqa;
using Clock = std::chrono::steady_clock;

struct Check {
    bool ok = true;
    std::string detail;

    void expect(bool cond, const std::string& what) {
        if (!cond && ok) detail = what;
        ok = ok && cond;
    }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) { return detail::format_exact(v); }

Check criterion1() {
    Check c;
    std::size_t rows = 0;
    for (auto codec : kAllCodecs) {
        for (auto condition : kAllConditions) {
            const auto grid = builtin_grid(codec, condition);
            for (std::size_t i = 0; i < grid.rows.size(); ++i) {
                try {
                    const auto s = to_quant_steps(grid.params(i));
                    c.expect(s.qs_a.value_or(1.0) >= 1.0 && s.qs_g.value_or(1.0) >= 1.0, "step below 1");
                    ++rows;
                } catch (const Error& e) {
                    c.expect(false, e.what());
                }
            }
        }
    }
    c.expect(rows == 45, "converted " + std::to_string(rows) + " rows");
    c.expect(vpcc_qp_to_qs(22) == 8, "qp 22");
    c.expect(vpcc_qp_to_qs(51) == 228, "qp 51");
    c.expect(gpcc_attr_qp_to_qs(51) == 228, "G-PCC qp 51");
    c.expect(std::abs(gpcc_scale_to_qs(0.0625) - 16.0) <= 1e-9, "scale 0.0625");
    c.expect(std::abs(avs_attr_qp_to_qs(48) - 64.0) <= 1e-9, "QPa 48");
    if (c.ok) c.detail = "45 rows converted; 22->8, 51->228, 0.0625->16, 48->64";
    return c;
}

Check criterion2() {
    Check c;
    const auto loaded = load_coefficients(std::string(PCQA_DATA_DIR) + "/default_coefficients.txt");
    const ModelCoefficients expected[] = {
        {Codec::VPCC, -0.0089, 4.4862, -0.559, 5.4165, GeometryForm::NaturalLog},
        {Codec::GPCC, -0.01, 5.3515, -0.2381, 5.3818, GeometryForm::Linear},
        {Codec::AVS, -0.0519, 5.1337, -0.273, 5.5034, GeometryForm::Linear},
    };
    for (const auto& want : expected) {
        const std::string name(to_string(want.codec));
        c.expect(find_coefficients(loaded, want.codec) == want, name + " golden file differs");
        c.expect(default_coefficients(want.codec) == want, name + " built-in defaults differ");
    }
    std::ostringstream out;
    write_coefficients(out, default_coefficient_set());
    std::ifstream golden(std::string(PCQA_DATA_DIR) + "/default_coefficients.txt");
    std::ostringstream ref;
    ref << golden.rdbuf();
    c.expect(out.str() == ref.str(), "serialized defaults differ from golden file");
    if (c.ok) c.detail = "built-in, golden file and serializer agree exactly";
    return c;
}

Check criterion3() {
    Check c;
    struct Case {
        Codec codec;
        double qs_a, qs_g, published, oracle;
    };
    // Oracle values: tests/oracles/derive_expected.py.
    const Case cases[] = {
        {Codec::VPCC, 81, 25, 3.6912, 3.69122420694934},
        {Codec::GPCC, 91, 4, 4.4354, 4.43545},
        {Codec::AVS, 32, 8, 3.3962, 3.39615},
    };
    std::string got;
    for (const auto& k : cases) {
        const double v = predict_combined(default_coefficients(k.codec), k.qs_a, k.qs_g, CombinationScheme::Linear).value;
        c.expect(std::abs(v - k.published) <= 1e-4, std::string(to_string(k.codec)) + " off by more than 1e-4");
        c.expect(std::abs(v - k.oracle) <= 1e-12, std::string(to_string(k.codec)) + " disagrees with oracle");
        got += (got.empty() ? "" : ", ") + std::string(to_string(k.codec)) + " " + detail::format_report(v);
    }
    if (c.ok) c.detail = got;
    return c;
}

Check criterion4() {
    Check c;
    const auto t0 = Clock::now();
    double worst_noiseless = 0.0, worst_slope = 0.0;
    testing::SyntheticSpec noisy;
    noisy.noise_sigma = 0.05;
    for (auto codec : kAllCodecs) {
        const auto truth = default_coefficients(codec);
        const auto exact = fit_codec_models(testing::synthetic_samples(truth));
        for (auto d : {exact.c1_a - truth.c1_a, exact.c2_a - truth.c2_a, exact.c1_g - truth.c1_g,
                       exact.c2_g - truth.c2_g}) {
            worst_noiseless = std::max(worst_noiseless, std::abs(d));
        }
        c.expect(exact.geometry_form == truth.geometry_form, "geometry form not recovered");
        const auto fit = fit_codec(testing::synthetic_samples(truth, noisy));
        c.expect(fit.attribute.n_points == 5 && fit.geometry.n_points == 5, "unexpected level count");
        worst_slope = std::max({worst_slope, std::abs(fit.coefficients.c1_a - truth.c1_a),
                                std::abs(fit.coefficients.c1_g - truth.c1_g)});
    }
    const double elapsed = seconds_since(t0);
    c.expect(worst_noiseless <= 1e-9, "noiseless error " + fmt(worst_noiseless));
    c.expect(worst_slope <= 0.02, "noisy slope error " + fmt(worst_slope));
    c.expect(elapsed < 1.0, "took " + fmt(elapsed) + " s");
    if (c.ok) {
        c.detail = "noiseless max error " + detail::format_report(worst_noiseless) + ", sigma 0.05 max slope error " +
                   detail::format_report(worst_slope) + ", " + detail::format_report(elapsed) + " s";
    }
    return c;
}

Check criterion5() {
    Check c;
    for (auto codec : kAllCodecs) {
        const auto grid = builtin_grid(codec, CompressionCondition::LossyGeoLossyAttr);
        const auto model = default_coefficients(codec);
        std::vector<std::vector<double>> scores;
        for (auto scheme : kAllSchemes) {
            std::vector<double> s;
            for (std::size_t i = 0; i < grid.rows.size(); ++i) s.push_back(predict(grid.params(i), model, scheme).value);
            for (std::size_t i = 1; i < s.size(); ++i) {
                c.expect(s[i] < s[i - 1], std::string(to_string(codec)) + " " + std::string(to_string(scheme)) +
                                              " ranking not strict");
            }
            scores.push_back(s);
        }
        for (std::size_t i = 0; i < scores.size(); ++i) {
            for (std::size_t j = i + 1; j < scores.size(); ++j) {
                c.expect(srocc(scores[i], scores[j]) == 1.0, std::string(to_string(codec)) + " pairwise SROCC < 1");
            }
        }
    }
    if (c.ok) c.detail = "3 codecs x 4 schemes, pairwise SROCC = 1 on the 5-point grid";
    return c;
}

Check criterion6() {
    Check c;
    std::mt19937_64 rng(20240618);
    std::uniform_int_distribution<int> len(2, 50);
    std::uniform_real_distribution<double> u(1.0, 5.0);
    std::uniform_int_distribution<int> level(1, 5);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = static_cast<std::size_t>(len(rng));
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = trial % 2 ? level(rng) : u(rng);  // odd trials carry ties
            y[i] = u(rng);
        }
        while (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) x[0] += 1.0;
        worst = std::max({worst, std::abs(plcc(x, y) - oracle::pearson(x, y)),
                          std::abs(srocc(x, y) - oracle::spearman(x, y)),
                          std::abs(rmse(x, y) - oracle::root_mean_square_error(x, y))});
        c.expect(fractional_ranks(x) == oracle::brute_force_ranks(x), "fractional ranks differ");
    }
    c.expect(worst <= 1e-9, "max deviation " + fmt(worst));
    std::vector<double> v;
    for (int i = 1; i <= 20; ++i) v.push_back(i);
    const double q = error_summary(v).quantile_95;
    c.expect(std::abs(q - 19.05) <= 1e-12, "q95 of 1..20 is " + fmt(q));
    if (c.ok) c.detail = "100 vectors, max deviation " + detail::format_report(worst) + "; q95(1..20) = 19.05";
    return c;
}

// Literal sweep over qs_a, qs_g in [1, 256] for every default model and
// scheme. Counts neighbouring pairs where the score is not strictly smaller
// and grid points where a scheme is undefined (non-positive sub-score).
Check criterion7() {
    Check c;
    std::vector<double> axis;
    for (double q = 1.0; q <= 256.0; q += 0.5) axis.push_back(q);
    std::size_t pairs = 0;
    std::string summary;
    bool single_ok = true;
    for (const auto& model : default_coefficient_set()) {
        for (std::size_t i = 1; i < axis.size(); ++i) {
            single_ok = single_ok && predict_attribute(model, axis[i]).value < predict_attribute(model, axis[i - 1]).value;
            single_ok = single_ok && predict_geometry(model, axis[i]).value < predict_geometry(model, axis[i - 1]).value;
        }
    }
    c.expect(single_ok, "single-channel model not strictly decreasing");
    std::size_t inside_violations = 0, underflows = 0;
    for (auto scheme : kAllSchemes) {
        std::size_t undefined = 0, violations = 0;
        for (const auto& model : default_coefficient_set()) {
            const auto at = [&](double a, double g) -> std::optional<double> {
                try {
                    return predict_combined(model, a, g, scheme).value;
                } catch (const NumericDomainError&) {
                    return std::nullopt;
                }
            };
            // Both sub-scores inside the score scale (0, 5].
            const auto in_scale = [&](double a, double g) {
                const double sa = predict_attribute(model, a).value, sg = predict_geometry(model, g).value;
                return sa > 0.0 && sa <= 5.0 && sg > 0.0 && sg <= 5.0;
            };
            for (std::size_t i = 0; i < axis.size(); i += 5) {
                std::optional<double> prev_a, prev_g;
                for (std::size_t j = 0; j < axis.size(); ++j) {
                    const auto va = at(axis[j], axis[i]);  // sweep qs_a, qs_g fixed
                    const auto vg = at(axis[i], axis[j]);  // sweep qs_g, qs_a fixed
                    const bool scale_a = j > 0 && in_scale(axis[j], axis[i]) && in_scale(axis[j - 1], axis[i]);
                    const bool scale_g = j > 0 && in_scale(axis[i], axis[j]) && in_scale(axis[i], axis[j - 1]);
                    for (const auto& [v, prev, scaled] :
                         {std::tuple{va, &prev_a, scale_a}, std::tuple{vg, &prev_g, scale_g}}) {
                        if (!v) {
                            ++undefined;
                        } else if (*prev) {
                            ++pairs;
                            if (!(*v < **prev)) {
                                ++violations;
                                if (scaled && **prev == 0.0) ++underflows;
                                else if (scaled) ++inside_violations;
                            }
                        }
                        *prev = v;
                    }
                }
            }
        }
        c.expect(undefined == 0 && violations == 0, "see counts");
        summary += std::string(summary.empty() ? "" : "; ") + std::string(to_string(scheme)) + ": " +
                   std::to_string(violations) + " non-decreasing steps, " + std::to_string(undefined) + " undefined";
    }
    c.detail = (single_ok ? "single-channel models strictly decreasing; " : "") + summary + " (" +
               std::to_string(pairs) + " steps checked; " + std::to_string(inside_violations) +
                " violations with both sub-scores in (0, 5], plus " + std::to_string(underflows) +
               " where the score underflows to 0; undefined points have a sub-score <= 0)";
    return c;
}

Check criterion8() {
    Check c;
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20240619);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    std::normal_distribution<double> g(0.0, 1.0);
    const auto make = [&](std::size_t n) {
        PointCloud cloud;
        cloud.normals.emplace();
        for (std::size_t i = 0; i < n; ++i) {
            cloud.positions.push_back({u(rng), u(rng), u(rng)});
            Vec3 nrm{g(rng), g(rng), g(rng)};
            cloud.normals->push_back((1.0 / std::sqrt(squared_norm(nrm))) * nrm);
        }
        return cloud;
    };
    for (std::size_t n : {10u, 100u, 1000u}) {
        const auto a = make(n), b = make(n - n / 10);
        const auto self = p2point(a, a);
        c.expect(self.mse_sym == 0.0 && self.hausdorff_sym == 0.0, "identity p2point");
        c.expect(p2plane(a, a).mse_sym == 0.0, "identity p2plane");

        GeometryOptions peak;
        peak.peak = 50.0;
        const auto ab = p2point(a, b, peak), ba = p2point(b, a, peak);
        c.expect(ab.mse_sym == ba.mse_sym && ab.hausdorff_sym == ba.hausdorff_sym, "symmetry");
        c.expect(ab.hausdorff_sym >= std::sqrt(ab.mse_sym), "hausdorff below RMS");

        const KdTree index(a.positions);
        const auto plane = point_to_plane_errors(b, a, index, 1);
        const auto point = point_to_point_errors(b, index, 1);
        for (std::size_t i = 0; i < plane.size(); ++i) {
            c.expect(plane[i] <= point[i] * (1.0 + 1e-12), "p2plane above p2point");
        }
        for (const auto& q : b.positions) {
            const auto got = index.nearest(q);
            const auto want = oracle::exhaustive_nearest(a.positions, q);
            c.expect(got.index == want.index && got.squared_distance == want.squared_distance,
                     "k-d tree differs from exhaustive scan");
        }
    }
    const double elapsed = seconds_since(t0);
    if (c.ok) c.detail = "clouds of 10, 100, 1000 points, " + detail::format_report(elapsed) + " s";
    return c;
}

// End-to-end `evaluate` on synthetic annotations: the combined-condition scores
// are the linear prediction plus a constant 0.25, so PLCC = SROCC = 1,
// RMSE = mean = q95 = 0.25 and std = 0.
Check criterion9() {
    Check c;
    auto samples = testing::synthetic_all_codecs();
    for (auto& s : samples) {
        if (s.condition() == CompressionCondition::LossyGeoLossyAttr) s.mos += 0.25;
    }
    const auto path = testing::temp_path("acceptance_eval.csv");
    save_samples(samples, path);
    const std::string args[] = {"pcqa", "evaluate", "--input", path, "--relax-mos"};
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    c.expect(code == 0, "evaluate exited " + std::to_string(code) + ": " + err.str());

    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        const auto f = detail::split(line, ',');
        if (f.size() != 4) continue;
        const auto v = detail::parse_double(f[3]);
        const std::string metric(f[0]);
        const double want = (metric == "plcc" || metric == "srocc") ? 1.0 : metric == "error_std" ? 0.0 : 0.25;
        c.expect(v && std::abs(*v - want) <= 1e-9, line);
        ++rows;
    }
    c.expect(rows == 18, "expected 18 metric rows, got " + std::to_string(rows));
    if (c.ok) c.detail = "18 metric rows match closed-form truth (offset 0.25)";
    return c;
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Check()>> criteria[] = {
        {"conversion exactness", criterion1},
        {"default-coefficient fidelity", criterion2},
        {"prediction oracle", criterion3},
        {"fitting recovery", criterion4},
        {"rank agreement across schemes", criterion5},
        {"statistics oracles", criterion6},
        {"monotonicity over [1, 256]", criterion7},
        {"FR-baseline axioms", criterion8},
        {"synthetic end-to-end evaluate", criterion9},
    };
    int failed = 0;
    int n = 0;
    for (const auto& [name, fn] : criteria) {
        ++n;
        Check result;
        try {
            result = fn();
        } catch (const std::exception& e) {
            result.ok = false;
            result.detail = std::string("unexpected exception: ") + e.what();
        }
        if (!result.ok) ++failed;
        std::printf("[%s] criterion %d: %s -- %s\n", result.ok ? "PASS" : "FAIL", n, name, result.detail.c_str());
    }
    std::printf("%d of %d criteria passed\n", n - failed, n);
    return failed == 0 ? 0 : 1;
}
