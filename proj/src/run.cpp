#include "qgs/run.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "qgs/dynamics.hpp"
#include "qgs/error.hpp"
#include "qgs/export.hpp"
#include "qgs/parallel.hpp"
#include "qgs/photonics.hpp"
#include "qgs/signal.hpp"
#include "qgs/units.hpp"

namespace qgs {

namespace fs = std::filesystem;

namespace {

constexpr const char* kSweepSections[] = {"gate", "classical", "jsa", "spectrum"};

void say(const Logger& log, const std::string& line) {
    if (log) log(line);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

double opt_double(const KeyValueDocument& doc, const char* section, const char* key, double fallback) {
    return get_double(doc, section, key).value_or(fallback);
}

double opt_energy(const KeyValueDocument& doc, const char* section, const char* base, double fallback) {
    return get_energy_ev(doc, section, base).value_or(fallback);
}

std::size_t opt_count(const KeyValueDocument& doc, const char* section, const char* key, long fallback) {
    const long n = get_integer(doc, section, key).value_or(fallback);
    if (n < 1) throw Error(ErrorCode::ConfigError, std::string(section) + "." + key, "must be >= 1");
    return static_cast<std::size_t>(n);
}

// ---------------------------------------------------------------- model + basis

struct PreparedModel {
    VibronicModel model;
    FockTruncation trunc;
};

PreparedModel prepare_model(const RunConfig& cfg, const KeyValueDocument& doc) {
    PreparedModel p{load_model(cfg.model_path), {}};
    if (auto list = doc.get("fock", "nmax")) {
        const auto items = split_list(*list);
        if (static_cast<int>(items.size()) != p.model.modes_per_monomer())
            throw Error(ErrorCode::ConfigError, "fock.nmax",
                        "expected " + std::to_string(p.model.modes_per_monomer()) + " values");
        for (std::size_t k = 0; k < items.size(); ++k) {
            const long n = parse_integer(items[k], "fock.nmax");
            if (n < 0) throw Error(ErrorCode::ConfigError, "fock.nmax", "must be >= 0");
            p.model.modes[k].default_cutoff = static_cast<int>(n);
        }
    } else if (auto n = get_integer(doc, "fock", "uniform_nmax")) {
        if (*n < 0) throw Error(ErrorCode::ConfigError, "fock.uniform_nmax", "must be >= 0");
        for (auto& m : p.model.modes) m.default_cutoff = static_cast<int>(*n);
    }
    p.trunc = FockTruncation::from_model(p.model);
    return p;
}

PropagationOptions propagation_options(const KeyValueDocument& doc) {
    PropagationOptions o;
    o.krylov.max_dim = static_cast<int>(get_integer(doc, "propagation", "krylov_dim").value_or(30));
    o.krylov.tol = opt_double(doc, "propagation", "krylov_tol", 1e-10);
    o.conservation_tol = opt_double(doc, "propagation", "conservation_tol", 1e-8);
    return o;
}

double step_fs(const KeyValueDocument& doc) {
    const double dt = opt_double(doc, "propagation", "dt_fs", 0.166);
    if (!(dt > 0.0)) throw Error(ErrorCode::ConfigError, "propagation.dt_fs", "must be > 0");
    return dt;
}

// numeric duration, or nullopt for "auto"/absent
std::optional<double> fixed_duration(const KeyValueDocument& doc) {
    const auto v = doc.get("propagation", "duration_fs");
    if (!v || lower(*v) == "auto") return std::nullopt;
    const double d = parse_double(*v, "propagation.duration_fs");
    if (!(d > 0.0)) throw Error(ErrorCode::ConfigError, "propagation.duration_fs", "must be > 0");
    return d;
}

// ---------------------------------------------------------------- grids and gates

struct SpectrumGrid {
    UniformAxis omega;
    UniformAxis delay;
    std::optional<double> rescale_threshold;
    double rescale_factor = 1.0;
};

SpectrumGrid spectrum_grid(const KeyValueDocument& doc) {
    SpectrumGrid g;
    const double w0 = opt_double(doc, "spectrum", "omega_min_ev", 1.8);
    const double w1 = opt_double(doc, "spectrum", "omega_max_ev", 3.0);
    const double t0 = opt_double(doc, "spectrum", "delay_min_fs", 0.0);
    const double t1 = opt_double(doc, "spectrum", "delay_max_fs", 500.0);
    if (!(w1 >= w0) || !(t1 >= t0)) throw Error(ErrorCode::ConfigError, "spectrum", "empty omega or delay range");
    g.omega = UniformAxis::span(w0, w1, opt_count(doc, "spectrum", "omega_points", 121));
    g.delay = UniformAxis::span(t0, t1, opt_count(doc, "spectrum", "delay_points", 501));
    g.rescale_threshold = get_double(doc, "spectrum", "rescale_threshold_ev");
    g.rescale_factor = opt_double(doc, "spectrum", "rescale_factor", 1.0);
    return g;
}

struct GateSetup {
    GateParams gates;
    SignalOptions options;
};

GateSetup gate_setup(const KeyValueDocument& doc, const VibronicModel& model, int workers) {
    GateSetup s;
    s.gates.tau_fs = get_time_fs(doc, "gate", "tau").value_or(7.0);
    s.gates.gamma0_ev = opt_energy(doc, "gate", "gamma0", model.gamma0_ev);
    s.gates.gamma_d_ev = opt_energy(doc, "gate", "gamma_d", 0.0);
    s.gates.carrier_phase = parse_bool(doc.get("gate", "phase_flag").value_or("false"), "gate.phase_flag");
    s.gates.omega_minus_ev = opt_double(doc, "gate", "omega_minus_ev", 0.7);
    const std::string mode = lower(doc.get("gate", "mode").value_or("incoherent"));
    if (mode == "incoherent") s.options.mode = GateMode::Incoherent;
    else if (mode == "coherent") s.options.mode = GateMode::Coherent;
    else throw Error(ErrorCode::ConfigError, "gate.mode", "expected incoherent or coherent, got " + mode);
    if (auto e = get_double(doc, "gate", "frame_energy_ev")) {
        s.options.frame_energy_set = true;
        s.options.frame_energy_ev = *e;
    }
    s.options.tail_tol = opt_double(doc, "gate", "tail_tol", 1e-6);
    s.options.workers = workers;
    try {
        s.gates.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, e.key(), e.what());
    }
    return s;
}

ClassicalParams classical_params(const KeyValueDocument& doc, const VibronicModel& model) {
    ClassicalParams c;
    c.sigma_t_inverse_fs = opt_double(doc, "classical", "sigma_t_inverse_fs", 3.5);
    c.omega_inverse_fs = opt_double(doc, "classical", "omega_inverse_fs", 3.5);
    c.sigma_omega_inverse_fs = opt_double(doc, "classical", "sigma_omega_inverse_fs", 0.5);
    c.gamma0_ev = opt_energy(doc, "classical", "gamma0", model.gamma0_ev);
    const auto order = doc.get("classical", "order").value_or("frequency_first");
    if (order == "frequency_first") c.order = ClassicalOrder::FrequencyThenTime;
    else if (order == "time_first") c.order = ClassicalOrder::TimeThenFrequency;
    else throw Error(ErrorCode::ConfigError, "classical.order", "expected frequency_first or time_first, got " + order);
    c.validate();
    return c;
}

JsaParams jsa_params(const KeyValueDocument& doc) {
    JsaParams p;
    p.omega_plus_ev = opt_double(doc, "jsa", "omega_plus_ev", 4.7);
    p.omega_minus_ev = opt_double(doc, "jsa", "omega_minus_ev", 0.7);
    p.tau_fs = get_time_fs(doc, "jsa", "tau").value_or(7.0);
    const auto inv = get_double(doc, "jsa", "sigma_inverse_fs");
    const auto direct = get_energy_ev(doc, "jsa", "sigma");
    if (inv && direct) throw Error(ErrorCode::ConfigError, "jsa.sigma", "give sigma_inverse_fs or sigma_*, not both");
    p.sigma_ev = direct ? *direct : inverse_fs_to_ev(inv.value_or(400.0));
    try {
        p.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, e.key(), e.what());
    }
    return p;
}

// ---------------------------------------------------------------- output bookkeeping

fs::path member_dir(const RunConfig& cfg, const SweepMember& m) {
    return m.label.empty() ? cfg.output : cfg.output / m.label;
}

// Manifest = the member's run file with every default resolved, so that running
// it again reproduces the outputs.
KeyValueDocument manifest_base(const RunConfig& cfg, const SweepMember& m, int workers) {
    KeyValueDocument out = m.doc;
    out.erase("run", "output");
    out.set("run", "kind", run_kind_name(cfg.kind));
    out.set("run", "workers", std::to_string(workers));
    out.set("manifest", "version", kVersion);
    out.set("manifest", "sweep_member", m.label.empty() ? "-" : m.label);
    out.set("manifest", "source_model", cfg.model_path.string());
    return out;
}

void save_member(const fs::path& dir, KeyValueDocument manifest, const VibronicModel* model) {
    if (model) {
        write_text(dir / "model.conf", serialize_model(*model));
        manifest.set("run", "model", "model.conf");
    }
    manifest.save(dir / "manifest.conf");
}

void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, dir.string(), ec.message());
}

void put_grid(KeyValueDocument& doc, const SpectrumGrid& g) {
    doc.set("spectrum", "omega_min_ev", format_double(g.omega.start));
    doc.set("spectrum", "omega_max_ev", format_double(g.omega.back()));
    doc.set("spectrum", "omega_points", std::to_string(g.omega.size));
    doc.set("spectrum", "delay_min_fs", format_double(g.delay.start));
    doc.set("spectrum", "delay_max_fs", format_double(g.delay.back()));
    doc.set("spectrum", "delay_points", std::to_string(g.delay.size));
}

void put_propagation(KeyValueDocument& doc, double duration, double dt, const PropagationOptions& o) {
    doc.set("propagation", "duration_fs", format_double(duration));
    doc.set("propagation", "dt_fs", format_double(dt));
    doc.set("propagation", "krylov_dim", std::to_string(o.krylov.max_dim));
    doc.set("propagation", "krylov_tol", format_double(o.krylov.tol));
    doc.set("propagation", "conservation_tol", format_double(o.conservation_tol));
}

PropagationOptions with_progress(PropagationOptions o, const Logger& log, const std::string& what) {
    if (!log) return o;
    o.progress = [log, what, last = -1](std::size_t step, std::size_t steps) mutable {
        const int pct = steps ? static_cast<int>(100 * step / steps) : 100;
        if (pct / 10 != last / 10) {
            last = pct;
            log(what + ": " + std::to_string(pct) + "%");
        }
    };
    return o;
}

std::string krylov_summary(const KrylovStats& k) {
    std::ostringstream os;
    os << k.matvecs << " matvecs, max subspace " << k.max_subspace << ", substeps " << k.substeps;
    return os.str();
}

// Shared propagation for the spectrum pipelines.
struct OverlapRun {
    PreparedModel prepared;
    OverlapTable table;
    double duration = 0.0;
    double dt = 0.0;
    PropagationOptions options;
    int n_f = 3;
};

OverlapRun propagate_for_signal(const RunConfig& cfg, const KeyValueDocument& doc, double needed_fs,
                                const Logger& log) {
    OverlapRun r{prepare_model(cfg, doc), {}, 0.0, step_fs(doc), propagation_options(doc),
                 static_cast<int>(get_integer(doc, "channels", "n_f").value_or(3))};
    const auto fixed = fixed_duration(doc);
    r.duration = fixed ? *fixed : std::ceil(needed_fs / r.dt) * r.dt;
    const auto basis = build_basis(r.prepared.model, r.prepared.trunc);
    const auto channels = enumerate_final_channels(r.prepared.model, r.n_f);
    say(log, "model " + r.prepared.model.id + ": dimension " + std::to_string(basis.dimension()) + ", " +
                 std::to_string(channels.size()) + " channels, propagating " + format_double(r.duration) + " fs");
    r.table = propagate_overlaps(r.prepared.model, basis, channels, TimeGrid::from_duration(r.duration, r.dt),
                                 with_progress(r.options, log, "propagation"));
    return r;
}

void put_signal_common(KeyValueDocument& man, const OverlapRun& r) {
    put_propagation(man, r.duration, r.dt, r.options);
    man.set("channels", "n_f", std::to_string(r.n_f));
    man.erase("fock", "nmax");
    man.erase("fock", "uniform_nmax");
}

} // namespace

// ---------------------------------------------------------------- config parsing

RunKind parse_run_kind(std::string_view text) {
    const std::string k = lower(std::string(text));
    if (k == "dynamics") return RunKind::Dynamics;
    if (k == "qgs") return RunKind::Qgs;
    if (k == "classical") return RunKind::Classical;
    if (k == "jsa") return RunKind::Jsa;
    throw Error(ErrorCode::ConfigError, "run.kind", "unknown run kind '" + std::string(text) + "'");
}

const char* run_kind_name(RunKind kind) {
    switch (kind) {
    case RunKind::Dynamics: return "dynamics";
    case RunKind::Qgs: return "qgs";
    case RunKind::Classical: return "classical";
    case RunKind::Jsa: return "jsa";
    }
    return "?";
}

RunConfig parse_run_config(std::string_view text, const fs::path& base_dir) {
    RunConfig cfg;
    cfg.doc = KeyValueDocument::parse(text);
    cfg.base_dir = base_dir;
    const auto kind = cfg.doc.get("run", "kind");
    if (!kind) throw Error(ErrorCode::ConfigError, "run.kind", "missing");
    cfg.kind = parse_run_kind(*kind);
    if (cfg.kind != RunKind::Jsa) {
        const auto model = cfg.doc.get("run", "model");
        if (!model) throw Error(ErrorCode::ConfigError, "run.model", "missing");
        cfg.model_path = fs::path(*model).is_absolute() ? fs::path(*model) : base_dir / *model;
        if (!fs::is_regular_file(cfg.model_path))
            throw Error(ErrorCode::ConfigError, "run.model", "model file not found: " + cfg.model_path.string());
    }
    const std::string name = cfg.doc.get("run", "name").value_or(run_kind_name(cfg.kind));
    const fs::path out = cfg.doc.get("run", "output").value_or(("out/" + name));
    cfg.output = out.is_absolute() ? out : base_dir / out;
    if (auto w = get_integer(cfg.doc, "run", "workers")) cfg.workers = static_cast<int>(std::max(0L, *w));
    return cfg;
}

RunConfig load_run_config(const fs::path& path) {
    if (!fs::is_regular_file(path)) throw Error(ErrorCode::ConfigError, "config", "file not found: " + path.string());
    const auto doc = KeyValueDocument::load(path);
    return parse_run_config(doc.to_string(), path.parent_path());
}

std::vector<SweepMember> expand_sweeps(const KeyValueDocument& doc) {
    struct Axis {
        std::string section, key;
        std::vector<std::string> values;
    };
    std::vector<Axis> axes;
    for (const char* s : kSweepSections)
        if (const auto* sec = doc.section(s))
            for (const auto& [k, v] : sec->entries)
                if (v.find(',') != std::string::npos) axes.push_back({s, k, split_list(v)});

    std::vector<SweepMember> out{{"", doc}};
    for (const auto& ax : axes) {
        std::vector<SweepMember> next;
        for (const auto& m : out)
            for (const auto& v : ax.values) {
                SweepMember n = m;
                n.doc.set(ax.section, ax.key, v);
                std::string tag = ax.key + "-";
                for (char c : v) tag += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-') ? c : '_';
                n.label = m.label.empty() ? tag : m.label + "_" + tag;
                next.push_back(std::move(n));
            }
        out = std::move(next);
    }
    return out;
}

// ---------------------------------------------------------------- pipelines

RunReport run_dynamics(const RunConfig& cfg, const Logger& log) {
    RunReport report;
    const int workers = resolve_workers(cfg.workers);
    for (const auto& m : expand_sweeps(cfg.doc)) {
        const auto prepared = prepare_model(cfg, m.doc);
        const double dt = step_fs(m.doc);
        const double duration = fixed_duration(m.doc).value_or(500.0);
        const auto options = propagation_options(m.doc);
        const auto basis = build_basis(prepared.model, prepared.trunc);
        const HamiltonianAction h(prepared.model, basis);
        std::vector<std::string> warnings;
        const auto psi0 = initial_excited_state(prepared.model, basis, &warnings);
        for (const auto& w : warnings) say(log, "warning: " + w);
        say(log, "model " + prepared.model.id + ": dimension " + std::to_string(basis.dimension()) + ", " +
                     format_double(duration) + " fs at dt " + format_double(dt) + " fs");
        const auto traj = propagate_trajectory(h, psi0, TimeGrid::from_duration(duration, dt), RecorderSelection{},
                                               with_progress(options, log, "propagation"));
        const fs::path dir = member_dir(cfg, m);
        make_dir(dir);
        write_trajectory_csv(dir / "dynamics.csv", traj, prepared.model.modes_per_monomer());
        write_monomer_populations_csv(dir / "populations_monomer.csv", traj);

        auto man = manifest_base(cfg, m, workers);
        put_propagation(man, duration, dt, options);
        man.erase("fock", "nmax");
        man.erase("fock", "uniform_nmax");
        man.set("result", "samples", std::to_string(traj.grid.samples()));
        man.set("result", "max_norm_drift", format_double(traj.max_norm_drift));
        man.set("result", "max_energy_drift", format_double(traj.max_energy_drift));
        man.set("result", "krylov_matvecs", std::to_string(traj.krylov.matvecs));
        for (const auto& w : warnings) man.set("result", "warning", w);
        save_member(dir, man, &prepared.model);
        report.directories.push_back(dir);
        report.lines.push_back(dir.string() + ": " + std::to_string(traj.grid.samples()) + " samples, norm drift " +
                               format_double(traj.max_norm_drift) + ", energy drift " +
                               format_double(traj.max_energy_drift) + ", " + krylov_summary(traj.krylov));
    }
    return report;
}

RunReport run_qgs(const RunConfig& cfg, const Logger& log) {
    RunReport report;
    const int workers = resolve_workers(cfg.workers);
    const auto members = expand_sweeps(cfg.doc);
    const auto model = prepare_model(cfg, cfg.doc).model;
    double needed = 0.0;
    for (const auto& m : members) {
        const auto g = gate_setup(m.doc, model, workers);
        needed = std::max(needed, required_signal_time(g.gates, spectrum_grid(m.doc).delay, g.options));
    }
    const auto run = propagate_for_signal(cfg, cfg.doc, needed, log);
    make_dir(cfg.output);
    run.table.write(cfg.output / "overlaps.bin");

    for (const auto& m : members) {
        const auto setup = gate_setup(m.doc, run.prepared.model, workers);
        const auto grid = spectrum_grid(m.doc);
        auto spec = trqgs_signal(run.table, setup.gates, grid.omega, grid.delay, setup.options);
        spec.metadata.emplace_back("model", run.prepared.model.id);
        const fs::path dir = member_dir(cfg, m);
        make_dir(dir);
        write_spectrum_csv(dir / "spectrum.csv", spec);
        const auto shown = grid.rescale_threshold ? rescale_band(spec, *grid.rescale_threshold, grid.rescale_factor)
                                                  : spec;
        write_spectrum_svg(dir / "spectrum.svg", shown,
                           "tr-QGS  tau = " + format_double(setup.gates.tau_fs) + " fs, gamma = " +
                               format_double(setup.gates.gamma_ev()) + " eV");

        auto man = manifest_base(cfg, m, workers);
        put_signal_common(man, run);
        put_grid(man, grid);
        man.set("gate", "tau_fs", format_double(setup.gates.tau_fs));
        man.erase("gate", "gamma0_cm1");
        man.erase("gate", "gamma0_fs");
        man.erase("gate", "gamma_d_cm1");
        man.erase("gate", "gamma_d_fs");
        man.set("gate", "gamma0_ev", format_double(setup.gates.gamma0_ev));
        man.set("gate", "gamma_d_ev", format_double(setup.gates.gamma_d_ev));
        man.set("gate", "mode", setup.options.mode == GateMode::Incoherent ? "incoherent" : "coherent");
        for (const auto& [k, v] : shown.metadata) man.set("result", k, v);
        man.set("result", "max_raw", format_double(spec.max()));
        save_member(dir, man, &run.prepared.model);
        report.directories.push_back(dir);
        report.lines.push_back(dir.string() + ": tr-QGS " + std::to_string(grid.omega.size) + " x " +
                               std::to_string(grid.delay.size) + ", max " + format_double(spec.max()));
    }
    return report;
}

RunReport run_classical(const RunConfig& cfg, const Logger& log) {
    RunReport report;
    const int workers = resolve_workers(cfg.workers);
    const auto members = expand_sweeps(cfg.doc);
    const auto model = prepare_model(cfg, cfg.doc).model;
    double needed = 0.0;
    for (const auto& m : members) {
        const auto c = classical_params(m.doc, model);
        needed = std::max(needed, spectrum_grid(m.doc).delay.back() + c.required_margin_fs());
    }
    const auto run = propagate_for_signal(cfg, cfg.doc, needed, log);
    make_dir(cfg.output);
    run.table.write(cfg.output / "overlaps.bin");

    for (const auto& m : members) {
        const auto params = classical_params(m.doc, run.prepared.model);
        const auto grid = spectrum_grid(m.doc);
        auto spec = classical_gated_signal(run.table, params, grid.omega, grid.delay, workers);
        spec.metadata.emplace_back("model", run.prepared.model.id);
        const fs::path dir = member_dir(cfg, m);
        make_dir(dir);
        write_spectrum_csv(dir / "spectrum.csv", spec);
        const auto shown = grid.rescale_threshold ? rescale_band(spec, *grid.rescale_threshold, grid.rescale_factor)
                                                  : spec;
        write_spectrum_svg(dir / "spectrum.svg", shown,
                           "gated fluorescence  time " + format_double(params.time_width_fs()) + " fs, detector " +
                               format_double(params.sigma_omega_inverse_fs) + " fs");
        auto man = manifest_base(cfg, m, workers);
        put_signal_common(man, run);
        put_grid(man, grid);
        man.set("classical", "sigma_t_inverse_fs", format_double(params.sigma_t_inverse_fs));
        man.set("classical", "omega_inverse_fs", format_double(params.omega_inverse_fs));
        man.set("classical", "sigma_omega_inverse_fs", format_double(params.sigma_omega_inverse_fs));
        man.erase("classical", "gamma0_cm1");
        man.erase("classical", "gamma0_fs");
        man.set("classical", "gamma0_ev", format_double(params.gamma0_ev));
        man.set("classical", "order",
                params.order == ClassicalOrder::TimeThenFrequency ? "time_first" : "frequency_first");
        for (const auto& [k, v] : shown.metadata) man.set("result", k, v);
        save_member(dir, man, &run.prepared.model);
        report.directories.push_back(dir);
        report.lines.push_back(dir.string() + ": classical " + std::to_string(grid.omega.size) + " x " +
                               std::to_string(grid.delay.size) + ", max " + format_double(spec.max()));
    }
    return report;
}

RunReport run_jsa(const RunConfig& cfg, const Logger& log) {
    RunReport report;
    const int workers = resolve_workers(cfg.workers);
    for (const auto& m : expand_sweeps(cfg.doc)) {
        auto p = jsa_params(m.doc);
        const double ppw = opt_double(m.doc, "jsa", "points_per_width", 8.0);
        const double widths = opt_double(m.doc, "jsa", "widths", 3.0);
        const auto export_points = opt_count(m.doc, "jsa", "export_points", 201);
        const auto axes = auto_jsa_axes(p, ppw, widths);
        say(log, "jsa tau = " + format_double(p.tau_fs) + " fs: " + std::to_string(axes.signal.size) + "^2 grid");
        const auto grid = jsa_grid(p, axes.signal, axes.idler);
        const auto schmidt = schmidt_decompose(grid.weighted());
        const double corr = frequency_correlation(grid);

        // display copy on a coarser grid with the same ranges and normalisation
        JsaGrid shown{UniformAxis::span(axes.signal.start, axes.signal.back(), export_points),
                      UniformAxis::span(axes.idler.start, axes.idler.back(), export_points),
                      Eigen::MatrixXd(export_points, export_points), grid.norm};
        for (std::size_t i = 0; i < export_points; ++i)
            for (std::size_t j = 0; j < export_points; ++j)
                shown.magnitude(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    std::abs(jsa_amplitude(shown.signal[i], shown.idler[j], p));

        const fs::path dir = member_dir(cfg, m);
        make_dir(dir);
        write_jsa_csv(dir / "jsa.csv", shown);
        write_text(dir / "jsa.svg", render_heatmap_svg(shown.idler.values(), shown.signal.values(), shown.magnitude,
                                                       {"|Phi(omega_s, omega_i)|  tau = " + format_double(p.tau_fs) +
                                                            " fs",
                                                        "omega_i (eV)", "omega_s (eV)", ""}));
        std::ostringstream rep;
        rep << "joint spectral amplitude report\n"
            << "omega_plus_ev = " << format_double(p.omega_plus_ev) << "\n"
            << "omega_minus_ev = " << format_double(p.omega_minus_ev) << "\n"
            << "sigma_ev = " << format_double(p.sigma_ev) << "  (sigma^-1 = " << format_double(kHbarEvFs / p.sigma_ev)
            << " fs)\n"
            << "tau_fs = " << format_double(p.tau_fs) << "\n"
            << "sigma tau / hbar = " << format_double(p.separability_product()) << "\n"
            << "grid = " << grid.signal.size << " x " << grid.idler.size << ", step " << format_double(grid.signal.step)
            << " eV\n"
            << "normalisation Q = " << format_double(grid.norm) << "\n"
            << "integrated probability = " << format_double(grid.integrated_probability()) << "\n"
            << "schmidt_number K = " << format_double(schmidt.schmidt_number) << "\n"
            << "entropy = " << format_double(schmidt.entropy) << "\n"
            << "pearson correlation = " << format_double(corr) << "\n"
            << "leading coefficients =";
        for (std::size_t n = 0; n < std::min<std::size_t>(8, schmidt.coefficients.size()); ++n)
            rep << ' ' << format_double(schmidt.coefficients[n]);
        rep << '\n';
        write_text(dir / "report.txt", rep.str());

        auto man = manifest_base(cfg, m, workers);
        man.set("jsa", "omega_plus_ev", format_double(p.omega_plus_ev));
        man.set("jsa", "omega_minus_ev", format_double(p.omega_minus_ev));
        if (!get_energy_ev(man, "jsa", "sigma") && !man.get("jsa", "sigma_inverse_fs"))
            man.set("jsa", "sigma_inverse_fs", "400");
        man.set("jsa", "tau_fs", format_double(p.tau_fs));
        man.set("jsa", "points_per_width", format_double(ppw));
        man.set("jsa", "widths", format_double(widths));
        man.set("jsa", "export_points", std::to_string(export_points));
        man.set("result", "schmidt_number", format_double(schmidt.schmidt_number));
        man.set("result", "entropy", format_double(schmidt.entropy));
        man.set("result", "pearson_correlation", format_double(corr));
        save_member(dir, man, nullptr);
        report.directories.push_back(dir);
        report.lines.push_back(dir.string() + ": K = " + format_double(schmidt.schmidt_number) +
                               ", correlation = " + format_double(corr));
    }
    return report;
}

RunReport run(const RunConfig& cfg, const Logger& log) {
    switch (cfg.kind) {
    case RunKind::Dynamics: return run_dynamics(cfg, log);
    case RunKind::Qgs: return run_qgs(cfg, log);
    case RunKind::Classical: return run_classical(cfg, log);
    case RunKind::Jsa: return run_jsa(cfg, log);
    }
    throw Error(ErrorCode::ConfigError, "run.kind");
}

} // namespace qgs
