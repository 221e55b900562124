#include "decaykit/io/commands.hpp"

#include "decaykit/errors.hpp"
#include "decaykit/exact.hpp"
#include "decaykit/heff1d.hpp"
#include "decaykit/io/model_file.hpp"
#include "decaykit/io/svg.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace decaykit::io {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

CsvTable new_table(const RunConfig& rc, std::vector<std::string> columns) {
    CsvTable t;
    t.comments.push_back(std::string("decaykit ") + DECAYKIT_VERSION);
    for (auto& line : rc.describe()) t.comments.push_back(std::move(line));
    t.columns = std::move(columns);
    return t;
}

struct Resonance {
    spectral::SpectralDensity density;
    double tau;
    double e0;
    double gamma0;
};

Resonance resonance(const RunConfig& rc) {
    auto d = make_density(rc.density);
    if (!d.pole_term())
        throw ConfigError("command `" + rc.command + "` needs a resonance density (breit_wigner or linear_onset)");
    return {d, 1.0 / rc.density.gamma0, rc.density.e0, rc.density.gamma0};
}

std::vector<double> raw_grid(const RunConfig& rc, double tmin, double tmax, long points) {
    const double lo = rc.grid.tmin.value_or(tmin);
    const double hi = rc.grid.tmax.value_or(tmax);
    if (!(hi > lo)) throw ConfigError("grid.tmax must exceed grid.tmin");
    if (rc.grid.spacing == Spacing::log && !(lo > 0.0)) throw ConfigError("log spacing needs grid.tmin > 0");
    return make_grid(lo, hi, static_cast<std::size_t>(rc.grid.points.value_or(points)), rc.grid.spacing);
}

} // namespace

spectral::SpectralDensity make_density(const DensityBlock& b) {
    using spectral::SpectralDensity;
    if (b.kind == "breit_wigner") return SpectralDensity::breit_wigner(b.e0, b.gamma0, b.emin);
    if (b.kind == "linear_onset") {
        if (b.cutoff) return SpectralDensity::linear_onset(b.e0, b.gamma0, b.emin, *b.cutoff);
        return SpectralDensity::linear_onset(b.e0, b.gamma0, b.emin);
    }
    auto [e, w] = load_two_columns(b.file);
    if (b.kind == "point_masses") return SpectralDensity::point_masses(std::move(e), std::move(w));
    if (b.kind == "interpolated") return SpectralDensity::interpolated(std::move(e), std::move(w));
    throw ConfigError("unknown density kind `" + b.kind + "`");
}

CommandOutput cmd_fig1(const RunConfig& rc) {
    const auto r = resonance(rc);
    const double t_as = heff1d::transition_time(r.density).t_as / r.tau;
    const auto x = raw_grid(rc, 0.1, 10.0 * t_as, 400);
    std::vector<double> t(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) t[i] = x[i] * r.tau;

    CommandOutput out;
    out.table = new_table(rc, {"t_over_tau", "P"});
    const auto curve = amplitude::survival_probability_curve(r.density, t);
    PlotSeries s{"P(t)", x, {}};
    for (std::size_t i = 0; i < x.size(); ++i) {
        out.table.rows.push_back({x[i], curve[i].probability});
        s.y.push_back(curve[i].probability);
    }
    out.svg = render_svg({"Survival probability", "t / tau", "P(t)", false, true}, {s});
    std::ostringstream msg;
    msg.precision(10);
    msg << "t_as / tau = " << t_as;
    out.message = msg.str();
    return out;
}

std::vector<double> fig2_grid(double t_as, double lo, double hi, std::size_t core_points, std::size_t side_points) {
    const double a = 0.7 * t_as, b = 1.3 * t_as;
    if (!(lo > 0.0) || !(lo < a) || !(hi > b)) throw ConfigError("fig2 grid must enclose [0.7, 1.3] t_as");
    std::vector<double> g;
    auto below = make_grid(lo, a, side_points + 1, Spacing::log);
    g.insert(g.end(), below.begin(), below.end() - 1);
    auto core = make_grid(a, b, core_points, Spacing::linear);
    g.insert(g.end(), core.begin(), core.end());
    auto above = make_grid(b, hi, side_points + 1, Spacing::log);
    g.insert(g.end(), above.begin() + 1, above.end());
    return g;
}

CommandOutput cmd_fig2(const RunConfig& rc) {
    const auto r = resonance(rc);
    const double t_as = heff1d::transition_time(r.density).t_as / r.tau;
    const auto x = fig2_grid(t_as, rc.grid.tmin.value_or(0.1), rc.grid.tmax.value_or(50.0 * t_as),
                             static_cast<std::size_t>(rc.grid.points.value_or(601)), 80);

    std::vector<heff1d::EffectiveHamiltonianSample> samples(x.size());
    std::vector<char> ok(x.size(), 0);
    for_each_index(x.size(), Execution::parallel, [&](std::size_t i) {
        try {
            samples[i] = heff1d::effective_hamiltonian(r.density, x[i] * r.tau);
            ok[i] = 1;
        } catch (const NumericError&) {
            // |a| indistinguishable from zero: reported as an untrusted row.
        }
    });

    CommandOutput out;
    out.table = new_table(rc, {"t_over_tau", "ReH_over_e0", "rate_over_gamma0", "trusted"});
    PlotSeries s{"Re h / e0", {}, {}};
    for (std::size_t i = 0; i < x.size(); ++i) {
        const bool good = ok[i] != 0;
        const double e = good ? samples[i].energy / r.e0 : kNaN;
        const double w = good ? samples[i].rate / r.gamma0 : kNaN;
        out.table.rows.push_back({x[i], e, w, good && samples[i].trusted ? 1.0 : 0.0});
        if (x[i] >= 0.7 * t_as && x[i] <= 1.3 * t_as) {
            s.x.push_back(x[i]);
            s.y.push_back(e);
        }
    }
    out.svg = render_svg({"Instantaneous energy near the crossover", "t / tau", "E(t) / E0", false, false}, {s});
    return out;
}

CommandOutput cmd_survival(const RunConfig& rc) {
    const auto d = make_density(rc.density);
    const auto t = raw_grid(rc, 0.0, 50.0, 501);
    CommandOutput out;
    out.table = new_table(rc, {"t", "P", "re_a", "im_a", "error"});
    std::vector<quad::Estimate<cplx>> a(t.size());
    std::vector<std::string> failures(t.size());
    for_each_index(t.size(), Execution::parallel, [&](std::size_t i) {
        try {
            if (d.pole_term() && t[i] > 0.0) {
                const auto split = amplitude::survival_contour(d, t[i]);
                a[i] = {split.total(), split.error};
            } else {
                a[i] = amplitude::survival_direct(d, t[i], amplitude::kDefaultTolerance, Execution::serial);
            }
        } catch (const NumericError& e) {
            failures[i] = e.what();
        }
    });
    for (const auto& f : failures)
        if (!f.empty()) throw NumericError(f);
    for (std::size_t i = 0; i < t.size(); ++i)
        out.table.rows.push_back({t[i], std::norm(a[i].value), a[i].value.real(), a[i].value.imag(), a[i].error});
    return out;
}

CommandOutput cmd_heff(const RunConfig& rc) {
    const auto d = make_density(rc.density);
    const auto t = raw_grid(rc, 0.1, 50.0, 500);
    if (!(t.front() > 0.0)) throw ConfigError("heff needs grid.tmin > 0");
    const auto samples = heff1d::effective_hamiltonian_curve(d, t);
    CommandOutput out;
    out.table = new_table(rc, {"t", "re_h", "im_h", "rate", "trusted"});
    for (const auto& s : samples)
        out.table.rows.push_back({s.t, s.h.real(), s.h.imag(), s.rate, s.trusted ? 1.0 : 0.0});
    return out;
}

CommandOutput cmd_tas(const RunConfig& rc) {
    const auto r = resonance(rc);
    const auto res = heff1d::transition_time(r.density);
    CommandOutput out;
    out.table = new_table(rc, {"t_as", "t_lo", "t_hi", "t_as_over_tau", "residual", "later_crossings"});
    out.table.rows.push_back({res.t_as, res.t_lo, res.t_hi, res.t_as / r.tau, res.residual,
                              static_cast<double>(res.later_crossings.size())});
    std::ostringstream msg;
    msg.precision(12);
    msg << "t_as = " << res.t_as << "  (t_as / tau = " << res.t_as / r.tau << ")\n"
        << "bracket = [" << res.t_lo << ", " << res.t_hi << "]  bisection steps = " << res.iterations;
    for (double t : res.later_crossings) msg << "\nlater crossing at t = " << t;
    out.message = msg.str();
    return out;
}

CommandOutput cmd_subspace(const RunConfig& rc) {
    const auto m = load_model(rc.model.file);
    const auto projectors = subspace::eigenprojectors(m, rc.model.group_tolerance);
    const auto h = subspace::effective_hamiltonian(m, projectors, rc.model.eta);
    CommandOutput out;
    out.table = new_table(rc, {"j", "k", "re_h", "im_h", "re_m", "im_m", "re_gamma", "im_gamma"});
    for (Index j = 0; j < h.matrix.rows(); ++j)
        for (Index k = 0; k < h.matrix.cols(); ++k)
            out.table.rows.push_back({static_cast<double>(j), static_cast<double>(k), h.matrix(j, k).real(),
                                      h.matrix(j, k).imag(), h.mass(j, k).real(), h.mass(j, k).imag(),
                                      h.gamma(j, k).real(), h.gamma(j, k).imag()});
    std::ostringstream msg;
    msg.precision(10);
    msg << "PHP eigenvalue groups:";
    for (const auto& g : projectors.groups) msg << ' ' << g.lambda << " (x" << g.multiplicity << ')';
    out.message = msg.str();
    return out;
}

CommandOutput cmd_exact_compare(const RunConfig& rc) {
    const auto m = load_model(rc.model.file);
    const auto t = raw_grid(rc, 0.0, 10.0, 101);
    CommandOutput out;
    if (!m.has_continuum() && m.reservoir().levels.size() >= 2) {
        const double limit = 0.5 * exact::recurrence_time(m);
        if (t.back() > limit) {
            std::ostringstream w;
            w << "grid extends past half the recurrence time (" << limit << "); discretization revivals may dominate";
            out.warnings.push_back(w.str());
        }
    }
    exact::ComparisonOptions opt;
    opt.eta = rc.model.eta;
    opt.group_tolerance = rc.model.group_tolerance;
    const auto report = exact::compare_approximations(m, t, opt);
    out.table = new_table(rc, {"t", "err_php", "err_first_order", "err_limit", "err_loy", "norm_l", "condition"});
    out.table.comments.push_back("max_norm_l = " + format_value(report.max_norm_l, 17));
    for (const auto& r : report.rows)
        out.table.rows.push_back({r.t, r.err_php, r.err_first_order, r.err_limit, r.err_loy, r.norm_l, r.condition});
    return out;
}

CommandOutput run_command(const RunConfig& rc) {
    if (rc.command == "fig1") return cmd_fig1(rc);
    if (rc.command == "fig2") return cmd_fig2(rc);
    if (rc.command == "survival") return cmd_survival(rc);
    if (rc.command == "heff") return cmd_heff(rc);
    if (rc.command == "tas") return cmd_tas(rc);
    if (rc.command == "subspace") return cmd_subspace(rc);
    if (rc.command == "exact-compare") return cmd_exact_compare(rc);
    throw ConfigError("unknown command `" + rc.command + "`");
}

} // namespace decaykit::io
