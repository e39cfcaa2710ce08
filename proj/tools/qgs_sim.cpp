// qgs-sim: command-line front end for the dynamics, tr-QGS, classical and JSA pipelines

#include <cstdio>
#include <exception>
#include <iostream>
#include <mutex>
#include <string>

#include <CLI11.hpp>

#include "qgs/error.hpp"
#include "qgs/parallel.hpp"
#include "qgs/run.hpp"

namespace {

struct Options {
    std::string config;
    std::string out;
    int workers = 0;
    bool quiet = false;
};

int execute(qgs::RunKind kind, const Options& opt) {
    auto cfg = qgs::load_run_config(opt.config);
    if (cfg.kind != kind)
        throw qgs::Error(qgs::ErrorCode::ConfigError, "run.kind",
                         std::string("config declares '") + qgs::run_kind_name(cfg.kind) + "' but subcommand is '" +
                             qgs::run_kind_name(kind) + "'");
    if (!opt.out.empty()) cfg.output = opt.out;
    if (opt.workers > 0) cfg.workers = opt.workers;

    std::mutex console;
    qgs::Logger log;
    if (!opt.quiet)
        log = [&console](const std::string& line) {
            std::lock_guard lock(console);
            std::cerr << line << '\n';
        };
    const auto report = qgs::run(cfg, log);
    for (const auto& line : report.lines) std::cout << line << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qgs-sim: vibronic exciton dynamics and time-resolved quantum ghost spectroscopy"};
    app.require_subcommand(1);
    app.set_version_flag("--version", qgs::kVersion);

    Options opt;
    qgs::RunKind chosen = qgs::RunKind::Dynamics;
    const std::pair<const char*, qgs::RunKind> commands[] = {
        {"dynamics", qgs::RunKind::Dynamics},
        {"qgs", qgs::RunKind::Qgs},
        {"classical", qgs::RunKind::Classical},
        {"jsa", qgs::RunKind::Jsa},
    };
    const char* help[] = {"propagate the excited wave packet and export populations, coherence and <Q_k>",
                          "tr-QGS coincidence spectrum S(omega; T)", "classical time/frequency-gated fluorescence",
                          "entangled-pair joint spectral amplitude and Schmidt analysis"};
    for (std::size_t i = 0; i < 4; ++i) {
        auto* sub = app.add_subcommand(commands[i].first, help[i]);
        sub->add_option("--config", opt.config, "run configuration file")->required();
        sub->add_option("--out", opt.out, "output directory (overrides [run] output)");
        sub->add_option("--workers", opt.workers,
                        std::string("worker threads (default: [run] workers, then $") + qgs::kWorkersEnv + ", then 1)")
            ->check(CLI::NonNegativeNumber);
        sub->add_flag("--quiet", opt.quiet, "no progress output");
        sub->callback([&chosen, kind = commands[i].second] { chosen = kind; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return qgs::exit_code(qgs::ErrorFamily::Config);
    }

    try {
        return execute(chosen, opt);
    } catch (const qgs::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return qgs::exit_code(qgs::family_of(e.code()));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
