#include "nlk/cli.hpp"

#include "nlk/difflimit.hpp"
#include "nlk/errors.hpp"
#include "nlk/io.hpp"
#include "nlk/spectrum.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <array>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

#ifndef NLK_VERSION
#define NLK_VERSION "unknown"
#endif

namespace nlk {

std::string code_version()
{
    return NLK_VERSION;
}

void write_field_csv(const std::filesystem::path& path, const Field& field)
{
    const PhaseGrid& g = field.grid;
    const int d = g.d();
    std::vector<std::string> header;
    for (int a = 0; a < d; ++a)
        header.push_back(d == 1 ? "x" : "x" + std::to_string(a + 1));
    for (int a = 0; a < d; ++a)
        header.push_back(d == 1 ? "v" : "v" + std::to_string(a + 1));
    header.push_back("value");
    CsvWriter csv(path, header);
    std::array<double, 2> x{}, v{};
    std::vector<double> row(2 * d + 1);
    for (std::size_t ix = 0; ix < g.x_cells(); ++ix) {
        g.x_of(ix, x.data());
        for (std::size_t iv = 0; iv < g.v_cells(); ++iv) {
            g.v_of(iv, v.data());
            for (int a = 0; a < d; ++a) {
                row[a] = x[a];
                row[d + a] = v[a];
            }
            row[2 * d] = field.at(ix, iv);
            csv.row(row);
        }
    }
}

double density_decay_exponent(const ModelParams& p)
{
    const int d = p.d;
    return (3.0 - d + d * p.m) / ((d + 2.0) * (p.m - p.m1));
}

double lp_weight_exponent(const ModelParams& p, double lp)
{
    return p.d * (lp - 1.0) * (1.0 + p.A) / (lp * (1.0 - p.A));
}

ConvergeReport converge_experiment(const SolverConfig& cfg_in, std::uint64_t seed)
{
    const ModelParams& p = cfg_in.p;
    SolverConfig cfg = cfg_in;
    cfg.diagnostics = true;
    const double g1 = gamma_for_mass(p, 0.5);
    const double g2 = gamma_for_mass(p, 2.0);
    cfg.sandwich_gamma_lower = g1;
    const Field g0 = sandwiched_datum(p, cfg.grid, g1, g2, seed, 1.0);

    ConvergeReport rep;
    rep.seed = seed;
    rep.reference_rate = std::min(p.A, 1.0 - p.A);
    rep.trajectory = evolve(g0, cfg, "sandwich seed=" + std::to_string(seed));

    const SelfSimilarMap map{p, 1.0};
    const double lp = 2.0;
    const double dens_p = 1.0 + 2.0 / p.d;
    const double dens_e = density_decay_exponent(p);
    const double w_e = lp_weight_exponent(p, lp);
    const Evolution fstar = fundamental_evolution(p);
    for (const Snapshot& s : rep.trajectory.snapshots) {
        ConvergeRow row;
        row.tau = s.time;
        row.t = map.t_of_tau(s.time);
        row.l1_to_gstar = s.report.l1_to_gstar;
        row.entropy = s.report.entropy;
        row.production = s.report.production;
        const double R = std::exp(s.time);
        const double rho_norm = std::pow(R, -p.d * (dens_p - 1.0) / dens_p) *
                                lp_norm_density(spatial_density(s.field), s.field.grid, dens_p);
        row.density_decay = rho_norm * std::pow(1.0 + (1.0 - p.A) * row.t, dens_e);
        if (row.t > 0.0) {
            const Field ghat = pullback(fstar, map, row.t, s.field.grid);
            const double dist = std::pow(R, -p.d * (1.0 + p.A) * (lp - 1.0) / lp) * lp_distance(s.field, ghat, lp);
            row.weighted_lp = std::pow(row.t, w_e) * dist;
        } else {
            row.weighted_lp = std::numeric_limits<double>::quiet_NaN();
        }
        rep.rows.push_back(row);
    }
    std::vector<double> ts, es;
    const double half = 0.5 * rep.rows.back().tau;
    for (const ConvergeRow& r : rep.rows) {
        if (r.tau >= half) {
            ts.push_back(r.tau);
            es.push_back(r.entropy);
        }
    }
    rep.entropy_log_slope = log_slope(ts, es);
    return rep;
}

namespace {

/// INI reader whose [sections] only group keys: every key lands on the top-level options.
class FlatIni : public CLI::ConfigINI {
public:
    std::vector<CLI::ConfigItem> from_config(std::istream& in) const override
    {
        std::vector<CLI::ConfigItem> items;
        for (CLI::ConfigItem& it : CLI::ConfigINI::from_config(in)) {
            if (it.name == "++" || it.name == "--")
                continue;
            it.parents.clear();
            items.push_back(std::move(it));
        }
        return items;
    }
};

/// Everything the subcommands read, after defaults and overrides.
struct Options {
    std::string out = "out";
    int d = 1;
    double m = 0.8;
    std::vector<double> m_list;
    bool strict = true;
    std::vector<int> grid;
    std::vector<double> extent;
    int n = 64;
    double T = 10.0;
    double cfl = 0.45;
    std::string flavor = "lie";
    std::string transport = "spectral";
    double snapshot_every = 1.0;
    std::string datum = "gstar";
    double gamma = std::numeric_limits<double>::quiet_NaN();
    double radius = 8.0;
    std::uint64_t seed = 1;
    int runs = 1;
    std::string domain = "rectangle";
    int count = 40;
    std::string backend = "auto";
    std::vector<double> eps_list{0.4, 0.2, 0.1};
    std::string kind = "g";
    double t = 1.0;
    bool dump_fields = true;
};

void add_common(CLI::App& app, Options& o)
{
    app.add_option("--out", o.out, "Output directory");
    app.add_option("--d", o.d, "Dimension")->check(CLI::Range(1, 2));
    app.add_option("--m", o.m, "Nonlinearity exponent");
    app.add_option("--m-list", o.m_list, "Exponents for fig1")->delimiter(',');
    app.add_flag("!--no-strict", o.strict, "Accept the full admissible range (m1, m2)");
    app.add_option("--grid", o.grid, "Cells Nx,Nv")->delimiter(',')->expected(2);
    app.add_option("--extent", o.extent, "Half-widths Lx,Lv")->delimiter(',')->expected(2);
    app.add_option("--n", o.n, "Splitting intervals per unit time");
    app.add_option("--T", o.T, "End time");
    app.add_option("--cfl", o.cfl, "Diffusion CFL factor");
    app.add_option("--flavor", o.flavor, "Splitting flavor: lie or strang");
    app.add_option("--transport", o.transport, "Rotation scheme: spectral or bilinear");
    app.add_option("--snapshot-every", o.snapshot_every, "Snapshot cadence in time units");
    app.add_option("--datum", o.datum, "Initial datum: gstar, profile or sandwich");
    app.add_option("--gamma", o.gamma, "Profile offset for --datum profile and the profile subcommand");
    app.add_option("--radius", o.radius, "Default box in normalised profile radii");
    app.add_option("--seed", o.seed, "Random seed");
    app.add_option("--runs", o.runs, "Number of seeded runs in converge");
    app.add_option("--domain", o.domain, "Spectrum domain: rectangle or ellipse");
    app.add_option("--count", o.count, "Number of eigenvalues");
    app.add_option("--backend", o.backend, "Eigen backend: auto, dense or arnoldi");
    app.add_option("--eps-list", o.eps_list, "Decreasing eps values")->delimiter(',');
    app.add_option("--kind", o.kind, "Profile kind: g, G or fstar");
    app.add_option("--t", o.t, "Time for the profile subcommand");
    app.add_flag("!--no-fields", o.dump_fields, "Skip per-snapshot field dumps");
}

std::string join(const std::vector<double>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + format_double(v[i]);
    return s;
}

std::vector<std::pair<std::string, std::string>> describe(const Options& o, const std::string& sub)
{
    std::vector<std::pair<std::string, std::string>> c{{"out", o.out}, {"d", std::to_string(o.d)},
                                                       {"strict", o.strict ? "true" : "false"}};
    if (sub == "fig1")
        c.emplace_back("m_list", join(o.m_list));
    else
        c.emplace_back("m", format_double(o.m));
    if (sub == "evolve" || sub == "converge" || sub == "spectrum" || sub == "difflimit" || sub == "profile") {
        c.emplace_back("grid", std::to_string(o.grid.at(0)) + "," + std::to_string(o.grid.at(1)));
        c.emplace_back("extent", join(o.extent));
    }
    if (sub == "evolve" || sub == "converge") {
        c.emplace_back("n", std::to_string(o.n));
        c.emplace_back("T", format_double(o.T));
        c.emplace_back("cfl", format_double(o.cfl));
        c.emplace_back("flavor", o.flavor);
        c.emplace_back("transport", o.transport);
        c.emplace_back("snapshot_every", format_double(o.snapshot_every));
        c.emplace_back("seed", std::to_string(o.seed));
    }
    if (sub == "evolve") {
        c.emplace_back("datum", o.datum);
        c.emplace_back("gamma", format_double(o.gamma));
    }
    if (sub == "converge")
        c.emplace_back("runs", std::to_string(o.runs));
    if (sub == "spectrum") {
        c.emplace_back("domain", o.domain);
        c.emplace_back("count", std::to_string(o.count));
        c.emplace_back("backend", o.backend);
    }
    if (sub == "difflimit")
        c.emplace_back("eps_list", join(o.eps_list));
    if (sub == "profile") {
        c.emplace_back("kind", o.kind);
        c.emplace_back("gamma", format_double(o.gamma));
        c.emplace_back("t", format_double(o.t));
    }
    return c;
}

/// Fills grid and extent defaults that depend on the subcommand and the model.
void resolve_defaults(Options& o, const std::string& sub)
{
    if (sub == "fig1" && o.m_list.empty())
        o.m_list = {0.7, 1.7};
    if (sub == "spectrum") {
        if (o.grid.empty())
            o.grid = {120, 180};
        if (o.extent.empty())
            o.extent = {18.0, 28.0};
        return;
    }
    if (sub == "difflimit") {
        if (o.grid.empty())
            o.grid = {128, 64};
        if (o.extent.empty())
            o.extent = {40.0, 16.0};
        return;
    }
    if (o.grid.empty())
        o.grid = {128, 128};
    if (o.extent.empty() && sub != "params" && sub != "fig1") {
        const ModelParams p = model_params(o.d, o.m, o.strict);
        const double r = p.m > 1.0 ? truncation_radius(p, 0.0) : o.radius;
        const auto [Lx, Lv] = profile_extents(p, p.gamma_star, r);
        o.extent = {Lx, Lv};
    }
}

PhaseGrid make_grid(const Options& o)
{
    if (o.grid.size() != 2 || o.extent.size() != 2)
        throw ValueError("grid and extent need two entries each");
    return PhaseGrid(o.d, o.grid[0], o.grid[1], o.extent[0], o.extent[1]);
}

SolverConfig make_solver(const Options& o, const ModelParams& p)
{
    SolverConfig cfg;
    cfg.p = p;
    cfg.grid = make_grid(o);
    cfg.n = o.n;
    cfg.T = o.T;
    cfg.cfl = o.cfl;
    cfg.flavor = parse_flavor(o.flavor);
    cfg.transport = parse_transport(o.transport);
    cfg.snapshot_every = o.snapshot_every;
    return cfg;
}

void cmd_params(const Options& o, const std::filesystem::path& out)
{
    const ModelParams p = model_params(o.d, o.m, o.strict);
    CsvWriter csv(out / "params.csv", {"key", "value"});
    for (const auto& [k, v] : p.entries()) {
        std::cout << k << "=" << v << "\n";
        csv.row_text({k, v});
    }
}

void cmd_profile(const Options& o, const std::filesystem::path& out)
{
    const ModelParams p = model_params(o.d, o.m, o.strict);
    const PhaseGrid grid = make_grid(o);
    const double gamma = std::isnan(o.gamma) ? p.gamma_star : o.gamma;
    PhaseFunction fn;
    double t = 0.0;
    if (o.kind == "g" || o.kind == "G") {
        fn = profile_function({p, gamma, o.kind == "g" ? Frame::g : Frame::G});
    } else if (o.kind == "fstar") {
        t = o.t;
        if (!(t > 0.0))
            throw ValueError("fstar needs --t > 0");
        const Evolution f = fundamental_evolution(p);
        fn = [f, t](Point x, Point v) { return f(t, x, v); };
    } else {
        throw ValueError("unknown profile kind '" + o.kind + "' (expected g, G or fstar)");
    }
    const Field F = sample(grid, fn, o.kind == "G" ? FieldFrame::G : (o.kind == "g" ? FieldFrame::g : FieldFrame::f));
    const int d = grid.d();
    std::vector<std::string> header{"t"};
    for (int a = 0; a < d; ++a)
        header.push_back(d == 1 ? "x" : "x" + std::to_string(a + 1));
    for (int a = 0; a < d; ++a)
        header.push_back(d == 1 ? "v" : "v" + std::to_string(a + 1));
    header.push_back("value");
    CsvWriter csv(out / "profile.csv", header);
    std::array<double, 2> x{}, v{};
    std::vector<double> row(2 * d + 2);
    for (std::size_t ix = 0; ix < grid.x_cells(); ++ix) {
        grid.x_of(ix, x.data());
        for (std::size_t iv = 0; iv < grid.v_cells(); ++iv) {
            grid.v_of(iv, v.data());
            row[0] = t;
            for (int a = 0; a < d; ++a) {
                row[1 + a] = x[a];
                row[1 + d + a] = v[a];
            }
            row[2 * d + 1] = F.at(ix, iv);
            csv.row(row);
        }
    }
    std::cout << "mass=" << format_double(mass(F)) << "\n";
}

void cmd_fig1(const Options& o, const std::filesystem::path& out)
{
    if (o.d != 1)
        throw ValueError("fig1 is defined for d = 1");
    CsvWriter params(out / "ellipse_params.csv", {"m", "t", "center_x", "center_v", "semi_major", "semi_minor",
                                                   "angle", "level", "r_half", "enclosed_mass"});
    CsvWriter points(out / "ellipses.csv", {"m", "t", "index", "x", "v"});
    CsvWriter bb(out / "barenblatt.csv", {"m", "r", "value"});
    for (double m : o.m_list) {
        const ModelParams p = model_params(1, m, false);
        for (int k = 0; k <= 12; ++k) {
            const double t = 0.1 + 0.5 * k;
            const Ellipse e = half_mass_ellipse(t, p);
            params.row({m, t, e.center_x, e.center_v, e.semi_major, e.semi_minor, e.angle, e.level, e.r_half,
                        e.enclosed_mass});
            const auto pts = e.points(200);
            for (std::size_t i = 0; i < pts.size(); ++i)
                points.row({m, t, static_cast<double>(i), pts[i].first, pts[i].second});
        }
        const double rmax = m > 1.0 ? 1.2 : 4.0;
        for (int i = 0; i <= 400; ++i) {
            const double r = rmax * i / 400.0;
            bb.row({m, r, barenblatt_phase(r, p)});
        }
    }
}

void write_trajectory(const Trajectory& tr, const std::filesystem::path& dir, const std::string& prefix,
                      bool dump_fields)
{
    std::vector<std::string> slack_names;
    for (const auto& [name, value] : tr.snapshots.front().report.slacks)
        slack_names.push_back(name);
    CsvWriter csv(dir / (prefix + "diagnostics.csv"), DiagnosticsReport::header(slack_names));
    for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
        csv.row(tr.snapshots[k].report.row(slack_names));
        if (dump_fields) {
            std::ostringstream name;
            name << prefix << "field_" << std::setw(4) << std::setfill('0') << k << ".csv";
            write_field_csv(dir / name.str(), tr.snapshots[k].field);
        }
    }
}

void cmd_evolve(const Options& o, const std::filesystem::path& out)
{
    const ModelParams p = model_params(o.d, o.m, o.strict);
    SolverConfig cfg = make_solver(o, p);
    Field g0;
    std::string descriptor;
    if (o.datum == "gstar") {
        g0 = sample(cfg.grid, profile_function({p, p.gamma_star, Frame::g}), FieldFrame::g);
        descriptor = "g_star";
    } else if (o.datum == "profile") {
        if (std::isnan(o.gamma))
            throw ValueError("--datum profile needs --gamma");
        g0 = sample(cfg.grid, profile_function({p, o.gamma, Frame::g}), FieldFrame::g);
        descriptor = "profile gamma=" + format_double(o.gamma);
    } else if (o.datum == "sandwich") {
        const double g1 = gamma_for_mass(p, 0.5), g2 = gamma_for_mass(p, 2.0);
        g0 = sandwiched_datum(p, cfg.grid, g1, g2, o.seed, 1.0);
        cfg.sandwich_gamma_lower = g1;
        descriptor = "sandwich seed=" + std::to_string(o.seed);
    } else {
        throw ValueError("unknown datum '" + o.datum + "' (expected gstar, profile or sandwich)");
    }
    const Trajectory tr = evolve(g0, cfg, descriptor);
    write_trajectory(tr, out, "", o.dump_fields);
    std::cout << "steps=" << tr.steps << " clipped_mass=" << format_double(tr.clipped_mass)
              << " final_l1_to_gstar=" << format_double(tr.snapshots.back().report.l1_to_gstar) << "\n";
}

void cmd_converge(const Options& o, const std::filesystem::path& out)
{
    const ModelParams p = model_params(o.d, o.m, o.strict);
    const SolverConfig cfg = make_solver(o, p);
    if (o.runs < 1)
        throw ValueError("--runs must be >= 1");
    CsvWriter summary(out / "converge_summary.csv",
                      {"seed", "l1_initial", "l1_final", "entropy_log_slope", "reference_rate"});
    for (int r = 0; r < o.runs; ++r) {
        const std::uint64_t seed = o.seed + static_cast<std::uint64_t>(r);
        const ConvergeReport rep = converge_experiment(cfg, seed);
        CsvWriter csv(out / ("converge_seed" + std::to_string(seed) + ".csv"),
                      {"tau", "t", "l1_to_gstar", "entropy", "production", "density_decay", "weighted_l2"});
        for (const ConvergeRow& row : rep.rows)
            csv.row({row.tau, row.t, row.l1_to_gstar, row.entropy, row.production, row.density_decay,
                     row.weighted_lp});
        summary.row({static_cast<double>(seed), rep.rows.front().l1_to_gstar, rep.rows.back().l1_to_gstar,
                     rep.entropy_log_slope, rep.reference_rate});
        std::cout << "seed=" << seed << " l1: " << format_double(rep.rows.front().l1_to_gstar) << " -> "
                  << format_double(rep.rows.back().l1_to_gstar)
                  << "  entropy log-slope=" << format_double(rep.entropy_log_slope)
                  << " (min(A,1-A)=" << format_double(rep.reference_rate) << ")\n";
    }
}

void cmd_spectrum(const Options& o, const std::filesystem::path& out)
{
    const ModelParams p = model_params(o.d, o.m, o.strict);
    const DomainShape shape = parse_domain(o.domain);
    SpectralDomain dom{shape, o.extent.at(0), o.extent.at(1)};
    // the ellipse has the area of the rectangle with the given half-widths
    if (shape == DomainShape::ellipse) {
        dom.ax *= 2.0 / std::sqrt(std::numbers::pi);
        dom.av *= 2.0 / std::sqrt(std::numbers::pi);
    }
    const LinearOperatorAssembly a = assemble(p, dom, o.grid.at(0), o.grid.at(1));
    const SpectrumResult res = eigensolve(a, o.count, parse_backend(o.backend));
    {
        CsvWriter csv(out / "spectrum.csv", {"re", "im", "residual"});
        for (std::size_t i = 0; i < res.eigenvalues.size(); ++i)
            csv.row({res.eigenvalues[i].real(), res.eigenvalues[i].imag(), res.residuals[i]});
    }
    {
        CsvWriter csv(out / "analytic.csv", {"mode", "lambda", "nearest_re", "nearest_im", "window_residual"});
        for (const ModeResidual& mr : res.analytic) {
            const auto near = res.nearest(mr.lambda);
            csv.row_text({mr.name, format_double(mr.lambda), format_double(near.real()), format_double(near.imag()),
                          format_double(mr.residual)});
        }
    }
    const double reference = shape == DomainShape::rectangle ? -0.4152 : -0.4272;
    CsvWriter sum(out / "summary.csv", {"largest_nonzero_real", "reference", "minus_A", "minus_one_minus_A",
                                        "minus_one", "dimension", "backend"});
    const double lnz = res.largest_nonzero_real();
    sum.row_text({format_double(lnz), format_double(reference), format_double(-p.A), format_double(-(1.0 - p.A)),
                  "-1", std::to_string(a.dim()), to_string(res.backend)});
    std::cout << "largest nonzero real part " << format_double(lnz) << " (reference " << reference
              << "); analytic: -A=" << format_double(-p.A) << " -(1-A)=" << format_double(-(1.0 - p.A))
              << " -1\n";
}

void cmd_difflimit(const Options& o, const std::filesystem::path& out)
{
    const ModelParams p = model_params(o.d, o.m, o.strict);
    DiffLimitConfig cfg;
    cfg.p = p;
    cfg.x = Line{o.grid.at(0), o.extent.at(0)};
    cfg.Nv = o.grid.at(1);
    cfg.Lv = o.extent.at(1);
    const DiffLimitReport rep = diffusion_limit_experiment(o.eps_list, cfg);
    CsvWriter csv(out / "difflimit.csv", {"eps", "tau", "error", "local_eq_gap"});
    for (const DiffLimitRow& r : rep.rows)
        csv.row({r.eps, r.tau, r.error, r.local_eq_gap});
    CsvWriter sum(out / "difflimit_summary.csv", {"eps", "e"});
    for (std::size_t i = 0; i < rep.e.size(); ++i) {
        sum.row({o.eps_list[i], rep.e[i]});
        std::cout << "eps=" << format_double(o.eps_list[i]) << " e=" << format_double(rep.e[i]) << "\n";
    }
    std::cout << "pme oracle L1 error " << format_double(rep.pme_oracle_error) << "\n";
}

/// Best-effort recovery of --out when parsing failed.
std::string scan_out(int argc, const char* const* argv)
{
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--out" && i + 1 < argc)
            return argv[i + 1];
        if (a.rfind("--out=", 0) == 0)
            return a.substr(6);
    }
    return "out";
}

} // namespace

int run(int argc, const char* const* argv)
{
    CLI::App app{"Nonlinear kinetic Fokker-Planck toolkit"};
    app.set_config("--config", "", "Configuration file (key = value, optional [sections])");
    app.config_formatter(std::make_shared<FlatIni>());
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);
    Options o;
    add_common(app, o);
    app.fallthrough();
    const std::vector<std::pair<std::string, std::string>> subs{
        {"params", "Print model constants"},
        {"profile", "Sample a profile or the fundamental solution"},
        {"fig1", "Half-mass ellipses and Barenblatt curves"},
        {"evolve", "Integrate the rescaled equation"},
        {"converge", "Convergence experiment on sandwiched data"},
        {"spectrum", "Spectrum of the linearised operator"},
        {"difflimit", "Diffusion-limit sweep"}};
    for (const auto& [name, help] : subs)
        app.add_subcommand(name, help);

    RunManifest manifest;
    manifest.code_version = code_version();
    manifest.started = utc_now();
    std::filesystem::path out;
    std::string sub;
    auto finish = [&](int code) {
        manifest.finished = utc_now();
        try {
            std::filesystem::create_directories(out);
            manifest.write(out);
        } catch (const std::exception& e) {
            std::cerr << "could not write manifest: " << e.what() << "\n";
            return code == 0 ? 1 : code;
        }
        return code;
    };

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        out = scan_out(argc, argv);
        manifest.subcommand = "?";
        manifest.status = "error";
        manifest.error = std::string("usage: ") + e.what();
        return finish(2);
    }
    sub = app.get_subcommands().front()->get_name();
    manifest.subcommand = sub;
    out = o.out;

    try {
        resolve_defaults(o, sub);
        manifest.config = describe(o, sub);
        std::filesystem::create_directories(out);
        if (sub == "params")
            cmd_params(o, out);
        else if (sub == "profile")
            cmd_profile(o, out);
        else if (sub == "fig1")
            cmd_fig1(o, out);
        else if (sub == "evolve")
            cmd_evolve(o, out);
        else if (sub == "converge")
            cmd_converge(o, out);
        else if (sub == "spectrum")
            cmd_spectrum(o, out);
        else if (sub == "difflimit")
            cmd_difflimit(o, out);
    } catch (const std::exception& e) {
        const bool validation = is_validation_error(e);
        std::cerr << (validation ? "invalid input: " : "error: ") << e.what() << "\n";
        manifest.status = "error";
        manifest.error = e.what();
        return finish(validation ? 2 : 1);
    }
    return finish(0);
}

} // namespace nlk
