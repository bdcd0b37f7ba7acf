#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "cli/manifest.hpp"
#include "specstat/ensemble.hpp"
#include "specstat/errors.hpp"
#include "specstat/numstats.hpp"
#include "specstat/spectra.hpp"
#include "specstat/spectrum_cache.hpp"
#include "specstat/stat_curve.hpp"
#include "specstat/svg_plot.hpp"
#include "specstat/theory.hpp"

namespace specstat::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t low_confidence_size = 20;
constexpr int jump_order = 6;  // largest M_r marked on rigidity sweeps
constexpr std::size_t phase_samples = 1000;  // omega samples for the off-diagonal check

std::string g17(double v) { return fmt::format("{:.17g}", v); }

/// Shared state of one command: the configuration (defaults get written back so that the
/// manifest holds every value actually used), output directory and run options.
class Context
{
  public:
    Context(std::string command, RunConfig cfg, std::vector<std::string> argv, std::ostream& out)
        : out(out), cfg_(std::move(cfg))
    {
        manifest.command = std::move(command);
        manifest.argv = std::move(argv);
        manifest.started = utc_timestamp();
    }

    double real(std::string_view key, double fallback)
    {
        if (auto v = cfg_.get_double(key)) return *v;
        cfg_.set(key, g17(fallback));
        return fallback;
    }

    std::uint64_t uint(std::string_view key, std::uint64_t fallback)
    {
        if (auto v = cfg_.get_uint(key)) return *v;
        cfg_.set(key, std::to_string(fallback));
        return fallback;
    }

    bool flag(std::string_view key, bool fallback)
    {
        if (auto v = cfg_.get_bool(key)) return *v;
        cfg_.set(key, fallback ? "true" : "false");
        return fallback;
    }

    std::string text(std::string_view key, const std::string& fallback)
    {
        if (auto v = cfg_.get_string(key)) return *v;
        cfg_.set(key, fallback);
        return fallback;
    }

    std::vector<double> list(std::string_view key, const std::vector<double>& fallback)
    {
        if (auto v = cfg_.get_list(key)) return *v;
        std::string joined;
        for (double x : fallback) joined += (joined.empty() ? "" : ",") + g17(x);
        cfg_.set(key, joined);
        return fallback;
    }

    std::optional<double> maybe_real(std::string_view key) const { return cfg_.get_double(key); }

    Model model() { return parse_model(text("model", "mk")); }

    RunOptions options()
    {
        RunOptions opts;
        if (auto t = cfg_.get_uint("threads")) opts.threads = static_cast<unsigned>(*t);
        if (auto dir = cfg_.get_string("cache_dir")) opts.cache_dir = fs::path(*dir);
        return opts;
    }

    /// Ensemble from center/width/size/seed; --beta or --alpha stands in for a missing center.
    EnsembleSpec ensemble(std::size_t default_size = 200)
    {
        EnsembleSpec spec = model() == Model::mk ? EnsembleSpec::mk_default() : EnsembleSpec::rb_default();
        const char* param = spec.model == Model::mk ? "beta" : "alpha";
        if (!cfg_.has("center"))
            if (auto p = cfg_.get_double(param)) cfg_.set("center", g17(*p));
        spec.center = real("center", spec.center);
        spec.width = real("width", spec.model == Model::mk ? spec.center / 20.0 : 0.2);
        spec.size = uint("size", default_size);
        spec.seed = uint("seed", spec.seed);
        spec.validate();
        manifest.seed = spec.seed;
        if (spec.size < low_confidence_size) {
            manifest.notes["low_confidence"] = true;
            manifest.notes["low_confidence_reason"] =
                fmt::format("{} members; relative spread of a sample variance is about sqrt(2/N) = {:.0f}%", spec.size,
                            100.0 * std::sqrt(2.0 / static_cast<double>(spec.size)));
        }
        return spec;
    }

    TheoryConfig theory(Model m)
    {
        TheoryConfig tc = m == Model::mk ? TheoryConfig::mk_defaults() : TheoryConfig::rb_defaults();
        tc.m_r_max = static_cast<int>(uint("m_r_max", static_cast<std::uint64_t>(tc.m_r_max)));
        tc.m_theta_max = static_cast<int>(uint("m_theta_max", static_cast<std::uint64_t>(tc.m_theta_max)));
        tc.validate();
        return tc;
    }

    fs::path out_dir()
    {
        if (!out_dir_) {
            out_dir_ = fs::path(text("out_dir", "specstat-out"));
            std::error_code ec;
            fs::create_directories(*out_dir_, ec);
            if (ec) throw ResourceError(fmt::format("cannot create '{}': {}", out_dir_->string(), ec.message()));
        }
        return *out_dir_;
    }

    void write_curve(const std::string& name, const StatCurve& c)
    {
        write_curve_csv(out_dir() / name, c);
        manifest.outputs.push_back(name);
    }

    void write_curves(const std::string& name, std::span<const StatCurve> curves)
    {
        write_curves_csv(out_dir() / name, curves);
        manifest.outputs.push_back(name);
    }

    void write_plot(const std::string& name, const SvgPlot& plot)
    {
        if (!flag("svg", true)) return;
        write_svg(out_dir() / name, plot);
        manifest.outputs.push_back(name);
    }

    void write_text(const std::string& name, const std::string& body)
    {
        std::ofstream f(out_dir() / name, std::ios::binary);
        if (!f) throw ResourceError(fmt::format("cannot write '{}'", (out_dir() / name).string()));
        f << body;
        manifest.outputs.push_back(name);
    }

    void finish()
    {
        manifest.finished = utc_timestamp();
        manifest.config = cfg_;
        write_manifest(out_dir(), manifest);
    }

    const RunConfig& config() const { return cfg_; }

    RunManifest manifest;
    std::ostream& out;

  private:
    RunConfig cfg_;
    std::optional<fs::path> out_dir_;
};

CurveMeta theory_meta(Model m, double param, double eps)
{
    CurveMeta meta;
    meta.model = m;
    meta.center = param;
    meta.eps = eps;
    return meta;
}

CurveMeta ensemble_meta(const EnsembleSpec& spec, double eps)
{
    return {spec.model, spec.center, spec.width, spec.size, spec.seed, eps};
}

StatCurve make_curve(Eigen::ArrayXd x, Eigen::ArrayXd y, CurveKind kind, Provenance prov, CurveMeta meta)
{
    StatCurve c{std::move(x), std::move(y), kind, prov, meta};
    c.validate();
    return c;
}

double rms(const Eigen::ArrayXd& a) { return std::sqrt(a.square().mean()); }

SvgSeries series(const StatCurve& c, std::string label, std::string color, bool dashed = false)
{
    return {std::move(label), c.x, c.y, std::move(color), dashed};
}

const char* param_name(Model m) { return m == Model::mk ? "beta" : "alpha"; }

// ---------------------------------------------------------------------------

int cmd_spectrum(Context& ctx)
{
    const Model m = ctx.model();
    const char* name = param_name(m);
    const auto param = ctx.maybe_real(name);
    if (!param) throw ConfigError(fmt::format("spectrum --model {} needs --{}", to_string(m), name));
    const auto e_max = ctx.maybe_real("emax");
    if (!e_max) throw ConfigError("spectrum needs --emax");
    if (!(*e_max > 0.0)) throw ConfigError("--emax must be positive");

    const ModelParams params = make_params(m, *param);
    const RunOptions opts = ctx.options();
    const Spectrum spec = opts.cache_dir ? SpectrumCache(*opts.cache_dir).get_or_generate(params, *e_max, opts.level_budget)
                                         : generate_levels(params, *e_max, opts.level_budget);

    std::ostringstream csv;
    write_spectrum_csv(csv, spec);
    ctx.write_text("spectrum.csv", csv.str());

    const double n = static_cast<double>(spec.size());
    const double lo = m == Model::rb ? std::pow(RbParams(*param).half_perimeter(), 2) : 0.0;
    const double mean_n = mean_staircase(*e_max, params);
    double signed_sum = 0.0, sq_sum = 0.0;
    constexpr int samples = 100;
    std::size_t idx = 0;
    for (int i = 1; i <= samples; ++i) {
        const double e = lo + (*e_max - lo) * i / samples;
        while (idx < spec.levels.size() && spec.levels[idx].energy <= e) ++idx;
        const double dev = static_cast<double>(idx) - mean_staircase(e, params);
        signed_sum += dev;
        sq_sum += dev * dev;
    }
    ctx.out << fmt::format("model {} {} = {:g}, e_max = {:g}\n", to_string(m), name, *param, *e_max);
    ctx.out << fmt::format("levels: {}\n", spec.size());
    ctx.out << fmt::format("mean staircase at e_max: {:.6g} (count - staircase = {:+.4g}, {:+.3f} sqrt(N))\n", mean_n,
                           n - mean_n, n > 0 ? (n - mean_n) / std::sqrt(n) : 0.0);
    ctx.out << fmt::format("staircase residual over {} energies: mean {:+.4g}, rms {:.4g}\n", samples,
                           signed_sum / samples, std::sqrt(sq_sum / samples));
    ctx.manifest.notes["levels"] = spec.size();
    ctx.finish();
    return exit_ok;
}

int cmd_variance(Context& ctx)
{
    const EnsembleSpec spec = ctx.ensemble();
    const Model m = spec.model;
    const double eps = ctx.real("eps", m == Model::mk ? 2e5 : 1e5);
    const double default_span = m == Model::mk ? 3.0 * mk_period(eps, spec.center) : 8000.0;
    const double span = ctx.real("e_window_max", default_span);
    const auto points = static_cast<Eigen::Index>(ctx.uint("grid_points", 301));
    if (points < 2) throw ConfigError("grid_points must be at least 2");
    const bool averaged = ctx.flag("ensemble_average", false);
    if (averaged && m != Model::rb) throw ConfigError("--ensemble-average applies to the rb model only");
    const TheoryConfig tc = ctx.theory(m);
    const RunOptions opts = ctx.options();

    const Eigen::ArrayXd widths = Eigen::ArrayXd::LinSpaced(points, 0.0, span);
    const StatCurve numeric = number_variance(spec, eps, widths, opts);

    auto theory = [&](Variant v) -> Eigen::ArrayXd {
        if (m == Model::mk) return mk_variance(eps, widths, spec.center, tc, v);
        return rb_variance(eps, widths, spec.center, tc, v);
    };
    const CurveMeta meta = theory_meta(m, spec.center, eps);
    const StatCurve old_c = make_curve(widths, theory(Variant::old_theory), CurveKind::sigma, Provenance::theory_old, meta);
    const StatCurve coh_c =
        make_curve(widths, theory(Variant::coherent), CurveKind::sigma, Provenance::theory_coherent, meta);

    ctx.write_curve("variance-numeric.csv", numeric);
    ctx.write_curve("variance-theory-old.csv", old_c);
    ctx.write_curve("variance-theory-coherent.csv", coh_c);

    SvgPlot plot;
    plot.title = fmt::format("Level number variance, {} {} = {:g}, eps = {:g}", to_string(m), param_name(m),
                             spec.center, eps);
    plot.x_label = "E";
    plot.y_label = "Sigma(eps, E)";
    plot.series = {series(numeric, fmt::format("numeric ({} members)", spec.size), "#d62728"),
                   series(old_c, "old theory", "#000000"), series(coh_c, "coherent theory", "#2ca02c")};

    ctx.out << fmt::format("variance at eps = {:g} over E in [0, {:g}] ({} points), {} members\n", eps, span, points,
                           spec.size);
    ctx.out << fmt::format("rms residual vs numeric: old {:.4g}, coherent {:.4g} (numeric rms {:.4g})\n",
                           rms(old_c.y - numeric.y), rms(coh_c.y - numeric.y), rms(numeric.y));

    if (averaged) {
        CurveMeta avg_meta = meta;
        avg_meta.width = spec.width;
        for (Variant v : {Variant::old_theory, Variant::coherent}) {
            const auto q = rb_variance_ensemble(eps, widths, spec, tc, v);
            const bool old = v == Variant::old_theory;
            const StatCurve c = make_curve(widths, q.values, CurveKind::sigma,
                                           old ? Provenance::theory_old : Provenance::theory_coherent, avg_meta);
            ctx.write_curve(old ? "variance-ensemble-old.csv" : "variance-ensemble-coherent.csv", c);
            plot.series.push_back(series(c, old ? "alpha-averaged old" : "alpha-averaged coherent",
                                         old ? "#1f77b4" : "#9467bd", true));
            ctx.out << fmt::format("alpha-averaged {}: rms residual {:.4g} ({} panels)\n", old ? "old" : "coherent",
                                   rms(c.y - numeric.y), q.panels);
            ctx.manifest.notes[old ? "quadrature_panels_old" : "quadrature_panels_coherent"] = q.panels;
        }
    }
    ctx.write_plot("variance.svg", plot);
    ctx.finish();
    return exit_ok;
}

int cmd_rigidity(Context& ctx)
{
    const EnsembleSpec spec = ctx.ensemble();
    const Model m = spec.model;
    const std::string mode = ctx.text("mode", "saturation");
    const TheoryConfig tc = ctx.theory(m);
    const RunOptions opts = ctx.options();
    const auto draws = sample_ensemble(spec);
    const ModelParams center = make_params(m, spec.center);

    Eigen::ArrayXd x, eps_k, widths, old_y, coh_y;
    double meta_eps = 0.0;
    std::vector<double> markers;
    SvgPlot plot;
    plot.y_label = "Delta3";

    if (mode == "saturation") {
        const double lo = ctx.real("eps_min", m == Model::mk ? 5e4 : 2e4);
        const double hi = ctx.real("eps_max", m == Model::mk ? 5e5 : 2e5);
        if (!(lo > 0.0) || !(hi > lo)) throw ConfigError("need 0 < eps_min < eps_max");
        const auto points = static_cast<Eigen::Index>(ctx.uint("grid_points", 60));
        if (points < 2) throw ConfigError("grid_points must be at least 2");
        const double periods = ctx.real("window_periods", 10.0);
        if (!(periods > 0.0)) throw ConfigError("window_periods must be positive");

        x = Eigen::ArrayXd::LinSpaced(points, std::log(lo), std::log(hi)).exp();
        x[0] = lo;
        x[points - 1] = hi;
        eps_k = x;
        widths = x.unaryExpr([&](double e) { return periods * oscillation_period(center, e); });
        old_y.resize(points);
        coh_y.resize(points);
        for (Eigen::Index i = 0; i < points; ++i) {
            old_y[i] = m == Model::mk ? mk_rigidity_old(x[i], spec.center, tc) : rb_rigidity_old(x[i], spec.center, tc);
            coh_y[i] = m == Model::mk ? mk_rigidity_coherent(x[i], spec.center, tc)
                                      : rb_rigidity_coherent(x[i], spec.center, tc);
        }
        if (m == Model::mk) {
            for (const auto& j : mk_jump_locations(spec.center, jump_order)) {
                if (j.eps < lo || j.eps > hi) continue;
                markers.push_back(j.eps);
                ctx.out << fmt::format("jump (M_theta, M_r) = ({}, {}) at eps = {:.6g}, step {:.4g}\n", j.m_theta,
                                       j.m_r, j.eps, j.rigidity_step);
            }
        }
        plot.title = fmt::format("Saturation rigidity, {} {} = {:g}", to_string(m), param_name(m), spec.center);
        plot.x_label = "eps";
        plot.log_x = true;
    } else {
        meta_eps = ctx.real("eps", m == Model::mk ? 2e5 : 1e5);
        const double default_span = m == Model::mk ? 20.0 * mk_period(meta_eps, spec.center) : 8000.0;
        const double span = ctx.real("e_window_max", default_span);
        const auto points = static_cast<Eigen::Index>(ctx.uint("grid_points", 60));
        if (points < 1) throw ConfigError("grid_points must be at least 1");
        x = Eigen::ArrayXd::LinSpaced(points, span / points, span);
        widths = x;
        eps_k = Eigen::ArrayXd::Constant(points, meta_eps);
        const auto old_terms = m == Model::mk ? mk_variance_terms(meta_eps, spec.center, tc, Variant::old_theory)
                                              : rb_variance_terms(meta_eps, spec.center, tc, Variant::old_theory);
        const auto coh_terms = m == Model::mk ? mk_variance_terms(meta_eps, spec.center, tc, Variant::coherent)
                                              : rb_variance_terms(meta_eps, spec.center, tc, Variant::coherent);
        old_y = x.unaryExpr([&](double e) { return rigidity_width_sum(old_terms, e); });
        coh_y = x.unaryExpr([&](double e) { return rigidity_width_sum(coh_terms, e); });
        plot.title = fmt::format("Rigidity vs window width, {} {} = {:g}, eps = {:g}", to_string(m), param_name(m),
                                 spec.center, meta_eps);
        plot.x_label = "E";
    }

    const Eigen::ArrayXd numeric_y = rigidity_numeric(draws, eps_k, widths, opts);
    const StatCurve numeric =
        make_curve(x, numeric_y, CurveKind::delta3, Provenance::numeric, ensemble_meta(spec, meta_eps));
    const CurveMeta meta = theory_meta(m, spec.center, meta_eps);
    const StatCurve old_c = make_curve(x, old_y, CurveKind::delta3, Provenance::theory_old, meta);
    const StatCurve coh_c = make_curve(x, coh_y, CurveKind::delta3, Provenance::theory_coherent, meta);

    ctx.write_curve("rigidity-numeric.csv", numeric);
    ctx.write_curve("rigidity-theory-old.csv", old_c);
    ctx.write_curve("rigidity-theory-coherent.csv", coh_c);
    if (!markers.empty()) {
        std::string body = "m_theta,m_r,eps,rigidity_step\n";
        for (const auto& j : mk_jump_locations(spec.center, jump_order))
            if (j.eps >= x[0] && j.eps <= x[x.size() - 1])
                body += fmt::format("{},{},{:.17g},{:.17g}\n", j.m_theta, j.m_r, j.eps, j.rigidity_step);
        ctx.write_text("rigidity-jumps.csv", body);
    }
    plot.series = {series(numeric, fmt::format("numeric ({} members)", spec.size), "#d62728"),
                   series(old_c, "old theory", "#000000"), series(coh_c, "coherent theory", "#2ca02c")};
    plot.markers = markers;
    ctx.write_plot("rigidity.svg", plot);

    ctx.out << fmt::format("rigidity ({} mode), {} members\n", mode, spec.size);
    ctx.out << fmt::format("rms residual vs numeric: old {:.4g}, coherent {:.4g}\n", rms(old_c.y - numeric.y),
                           rms(coh_c.y - numeric.y));
    ctx.finish();
    return exit_ok;
}

int cmd_scaling(Context& ctx)
{
    if (ctx.model() != Model::mk) throw ConfigError("scaling applies to the mk model only");
    std::vector<double> betas;
    for (int k = 1; k <= 19; k += 2) betas.push_back(k * 1e6);
    betas = ctx.list("betas", betas);
    const auto size = ctx.uint("size", 200);
    const auto seed = ctx.uint("seed", EnsembleSpec{}.seed);
    const auto abs_width = ctx.maybe_real("width");
    const double eps = ctx.real("eps", 2e5);
    const double periods = ctx.real("window_periods", 3.0);
    const auto points = static_cast<Eigen::Index>(ctx.uint("grid_points", 301));
    if (points < 2) throw ConfigError("grid_points must be at least 2");
    const bool normalized = ctx.flag("normalized", false);
    const TheoryConfig tc = ctx.theory(Model::mk);
    const RunOptions opts = ctx.options();
    ctx.manifest.seed = seed;

    std::vector<StatCurve> curves, scaled;
    SvgPlot plot{"Level number variance for several beta", "E", "Sigma", {}, {}, false};
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    for (std::size_t b = 0; b < betas.size(); ++b) {
        const double beta = betas[b];
        EnsembleSpec spec{Model::mk, beta, abs_width.value_or(beta / 20.0), size, seed};
        spec.validate();
        const double period = mk_period(eps, beta);
        const Eigen::ArrayXd widths = Eigen::ArrayXd::LinSpaced(points, 0.0, periods * period);
        StatCurve numeric = number_variance(spec, eps, widths, opts);
        StatCurve theory = make_curve(widths, mk_variance(eps, widths, beta, tc, Variant::old_theory),
                                      CurveKind::sigma, Provenance::theory_old, theory_meta(Model::mk, beta, eps));
        const std::string stem = fmt::format("scaling-beta{:g}", beta);
        ctx.write_curve(stem + "-numeric.csv", numeric);
        ctx.write_curve(stem + "-theory-old.csv", theory);
        const char* color = palette[b % std::size(palette)];
        plot.series.push_back(series(numeric, fmt::format("beta {:g}", beta), color));
        plot.series.push_back(series(theory, fmt::format("beta {:g} theory", beta), color, true));
        if (normalized) {
            const double omega = mk_omega(beta);
            for (const StatCurve* c : {&numeric, &theory}) {
                StatCurve s = *c;
                s.x = c->x / period;
                s.y = c->y / omega;
                scaled.push_back(std::move(s));
            }
        }
        ctx.out << fmt::format("beta {:g}: period {:.4g}, numeric max {:.4g}, theory max {:.4g}\n", beta, period,
                               numeric.y.maxCoeff(), theory.y.maxCoeff());
        curves.push_back(std::move(numeric));
        curves.push_back(std::move(theory));
    }
    ctx.write_curves("scaling.csv", curves);
    if (normalized) {
        ctx.write_curves("scaling-normalized.csv", scaled);
        ctx.manifest.notes["scaling-normalized.csv"] =
            "normalized, not a raw variance: x = E / (3 omega eps)^(1/3), y = Sigma / omega";
    }
    ctx.write_plot("scaling.svg", plot);
    ctx.manifest.notes["curves"] = curves.size();
    ctx.finish();
    return exit_ok;
}

struct Check
{
    std::string name;
    std::string status;  // pass, fail, skipped
    double value;
    std::string target;
    std::string note;
};

int cmd_diagnostics(Context& ctx)
{
    if (ctx.model() != Model::mk) throw ConfigError("diagnostics apply to the mk model only");
    const EnsembleSpec spec = ctx.ensemble(1000);
    const double scale = ctx.real("tol_scale", 1.0);
    if (!(scale >= 0.0)) throw ConfigError("tol_scale must be non-negative");
    const TheoryConfig tc = ctx.theory(Model::mk);
    const RunOptions opts = ctx.options();
    const double beta = spec.center;
    std::vector<Check> checks;
    auto judge = [](bool ok) { return std::string(ok ? "pass" : "fail"); };

    if (spec.size < 2) {
        checks.push_back({"mean_delta_rho", "skipped", std::nan(""), "< 0.05",
                          "one member: its |delta rho| is not an ensemble mean"});
    } else {
        Eigen::ArrayXd grid(2);
        grid << 1e5, 2e5;
        const auto r = average_delta_rho_check(spec, grid, 100.0, opts);
        const double tol = 0.05 * scale;
        checks.push_back({"mean_delta_rho", judge(r.max_abs_mean < tol), r.max_abs_mean, fmt::format("< {:g}", tol),
                          fmt::format("{} members, eps in {{1e5, 2e5}}, window 100", r.members)});
    }

    {
        EnsembleSpec phase_spec = spec;
        phase_spec.size = phase_samples;
        const auto draws = sample_ensemble(phase_spec);
        std::vector<double> omegas;
        for (const auto& d : draws) omegas.push_back(std::get<MkParams>(d.params).omega());
        const std::vector<OrbitPair> pairs{{1, 1, 1, 2}, {1, 1, 2, 1}, {1, 2, 1, 3}, {0, 1, 1, 1}, {1, 2, 2, 3}};
        const auto off = diag_offdiag_average(omegas, 2e5, 2e5, pairs);
        const double tol = 0.05 * scale;
        checks.push_back({"offdiagonal_average", judge(off.max_abs < tol), off.max_abs, fmt::format("< {:g}", tol),
                          fmt::format("{} omega samples, 5 index pairs, eps1 = eps2 = 2e5", omegas.size())});
        const std::vector<OrbitPair> diag{{1, 2, 1, 2}};
        const double control = diag_offdiag_average(omegas, 2e5, 2e5, diag).pairs[0].product;
        checks.push_back({"diagonal_control", judge(std::abs(control - 0.5) <= tol), control,
                          fmt::format("0.5 +- {:g}", tol), "equal indices, eps1 = eps2"});
    }

    {
        const double v = isolated_orbit_rigidity(5e5, beta, tc);
        const double bound = 6e-4 * scale;
        checks.push_back({"isolated_orbit_bound", judge(v < bound), v, fmt::format("< {:g}", bound), "eps = 5e5"});
    }

    for (AxisFamily f : {AxisFamily::l_axis, AxisFamily::p_axis}) {
        const double v = balian_bloch_rigidity(2e5, beta, 100, f);
        const double tol = 1e-4 * scale;
        const double raw = balian_bloch_rigidity(2e5, beta, 100, f, false);
        checks.push_back({f == AxisFamily::l_axis ? "balian_bloch_l_axis" : "balian_bloch_p_axis",
                          judge(std::abs(v - 1.0 / 48.0) <= tol), v, fmt::format("1/48 +- {:g}", tol),
                          fmt::format("nu <= 100 plus tail; bare partial sum {:.6g}", raw)});
    }

    {
        const double v = mk_radial_rigidity(beta, tc.m_r_max);
        const double tol = 0.005 * scale;
        checks.push_back({"radial_zeta3", judge(std::abs(v - 37.29) <= tol * 37.29), v,
                          fmt::format("37.29 +- {:g}%", 100 * tol), "(1/4) sum omega / (2 pi^2 M^3)"});
    }

    std::string csv = "check,status,value,target,note\n";
    bool all_ok = true;
    ctx.out << fmt::format("{:<22} {:<8} {:>14}  {}\n", "check", "status", "value", "target");
    for (const auto& c : checks) {
        csv += fmt::format("{},{},{:.17g},\"{}\",\"{}\"\n", c.name, c.status, c.value, c.target, c.note);
        ctx.out << fmt::format("{:<22} {:<8} {:>14.6g}  {}  ({})\n", c.name, c.status, c.value, c.target, c.note);
        if (c.status == "fail") all_ok = false;
    }
    ctx.write_text("diagnostics.csv", csv);
    ctx.manifest.notes["all_pass"] = all_ok;
    ctx.finish();
    return all_ok ? exit_ok : exit_check_failed;
}

int cmd_jumps(Context& ctx)
{
    if (ctx.model() != Model::mk) throw ConfigError("jumps apply to the mk model only");
    double beta = 3e6;
    if (auto b = ctx.maybe_real("beta")) beta = *b;
    else if (auto c = ctx.maybe_real("center")) beta = *c;
    beta = ctx.real("beta", beta);
    const int order = static_cast<int>(ctx.uint("m_r_max", 6));
    const double lo = ctx.real("eps_min", 0.0);
    const double hi = ctx.real("eps_max", std::numeric_limits<double>::max());

    std::string csv = "m_theta,m_r,eps,rigidity_step\n";
    ctx.out << fmt::format("{:>8} {:>5} {:>16} {:>14}\n", "M_theta", "M_r", "eps", "rigidity_step");
    for (const auto& j : mk_jump_locations(beta, order)) {
        if (j.eps < lo || j.eps > hi) continue;
        csv += fmt::format("{},{},{:.17g},{:.17g}\n", j.m_theta, j.m_r, j.eps, j.rigidity_step);
        ctx.out << fmt::format("{:>8} {:>5} {:>16.8g} {:>14.6g}\n", j.m_theta, j.m_r, j.eps, j.rigidity_step);
    }
    ctx.write_text("jumps.csv", csv);
    ctx.finish();
    return exit_ok;
}

const std::map<std::string_view, std::function<int(Context&)>>& command_table()
{
    static const std::map<std::string_view, std::function<int(Context&)>> table{
        {"spectrum", cmd_spectrum}, {"variance", cmd_variance},       {"rigidity", cmd_rigidity},
        {"scaling", cmd_scaling},   {"diagnostics", cmd_diagnostics}, {"jumps", cmd_jumps},
    };
    return table;
}

}  // namespace

int run_command(std::string_view command, RunConfig cfg, std::ostream& out, std::ostream& err,
                std::vector<std::string> argv)
{
    const auto& table = command_table();
    auto it = table.find(command);
    if (it == table.end()) {
        err << fmt::format("error: unknown command '{}'\n", command);
        return exit_usage;
    }
    try {
        Context ctx(std::string(command), std::move(cfg), std::move(argv), out);
        return it->second(ctx);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const StatisticsError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_resource;
    }
}

namespace {

struct FlagSpec
{
    const char* name;
    const char* help;
};

constexpr FlagSpec value_flags[] = {
    {"model", "mk or rb"},
    {"beta", "MK parameter (ensemble center if --center is absent)"},
    {"alpha", "RB parameter (ensemble center if --center is absent)"},
    {"center", "ensemble center"},
    {"width", "ensemble standard deviation"},
    {"size", "ensemble members"},
    {"seed", "master seed"},
    {"eps", "running energy"},
    {"emax", "raw energy cutoff (spectrum)"},
    {"e-window-max", "largest window width"},
    {"grid-points", "number of grid points"},
    {"cache-dir", "spectrum cache directory"},
    {"out-dir", "output directory"},
    {"mode", "rigidity mode: saturation or width"},
    {"eps-min", "lower end of the eps sweep"},
    {"eps-max", "upper end of the eps sweep"},
    {"window-periods", "window width in oscillation periods"},
    {"betas", "comma separated beta list (scaling)"},
    {"threads", "worker threads (0: all cores)"},
    {"m-r-max", "M_r (or M_2) truncation"},
    {"m-theta-max", "M_theta (or M_1) truncation"},
    {"tol-scale", "multiply diagnostic tolerances"},
};

std::string key_of(std::string_view flag)
{
    std::string k(flag);
    std::replace(k.begin(), k.end(), '-', '_');
    return k;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"specstat: spectral statistics of the modified Kepler problem and rectangular billiards"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(code_version));

    struct Bound
    {
        CLI::App* sub;
        std::map<std::string, std::string> values;
        std::string config_file;
        bool svg = true;
        bool ensemble_average = false;
        bool normalized = false;
    };
    std::vector<std::unique_ptr<Bound>> bound;

    auto add = [&](const char* name, const char* help) {
        auto b = std::make_unique<Bound>();
        b->sub = app.add_subcommand(name, help);
        for (const auto& f : value_flags) b->sub->add_option(std::string("--") + f.name, b->values[f.name], f.help);
        b->sub->add_option("--config", b->config_file, "configuration file (flags override it)");
        b->sub->add_flag("--svg,!--no-svg", b->svg, "write SVG plots (default on)");
        b->sub->add_flag("--ensemble-average", b->ensemble_average, "add alpha-averaged RB theory curves");
        b->sub->add_flag("--normalized", b->normalized, "also write omega-normalized scaling curves (x / period, Sigma / omega)");
        bound.push_back(std::move(b));
    };
    add("spectrum", "generate and save a spectrum");
    add("variance", "level number variance: numeric vs theory");
    add("rigidity", "spectral rigidity: numeric vs theory");
    add("scaling", "variance for a list of beta values");
    add("diagnostics", "ensemble and theory self-checks");
    add("jumps", "list quantum jump locations");

    std::string manifest_path, replay_out;
    auto* replay = app.add_subcommand("replay", "re-run a command from its manifest.json");
    replay->add_option("manifest", manifest_path, "manifest.json of an earlier run")->required();
    replay->add_option("--out-dir", replay_out, "write into this directory instead");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForVersion&) {
        out << code_version << '\n';
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return exit_usage;
    }

    std::vector<std::string> args(argv + 1, argv + argc);
    if (replay->parsed()) {
        try {
            RunManifest m = read_manifest(manifest_path);
            if (!replay_out.empty()) m.config.set("out_dir", replay_out);
            return run_command(m.command, m.config, out, err, args);
        } catch (const ConfigError& e) {
            err << "error: " << e.what() << '\n';
            return exit_usage;
        }
    }

    for (const auto& b : bound) {
        if (!b->sub->parsed()) continue;
        try {
            RunConfig cfg;
            if (!b->config_file.empty()) cfg = RunConfig::load(b->config_file);
            RunConfig flags;
            for (const auto& f : value_flags)
                if (b->sub->get_option(std::string("--") + f.name)->count() > 0) flags.set(key_of(f.name), b->values[f.name]);
            if (b->sub->get_option("--svg")->count() > 0) flags.set("svg", b->svg ? "true" : "false");
            if (b->ensemble_average) flags.set("ensemble_average", "true");
            if (b->normalized) flags.set("normalized", "true");
            cfg.merge(flags);
            return run_command(b->sub->get_name(), std::move(cfg), out, err, args);
        } catch (const ConfigError& e) {
            err << "error: " << e.what() << '\n';
            return exit_usage;
        }
    }
    err << app.help();
    return exit_usage;
}

}  // namespace specstat::cli
