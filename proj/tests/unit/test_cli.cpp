#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const char* const kTinyDimer = R"([electronic]
name = tiny_dimer
n_monomers = 2
s1_energy_ev = 2.13
s2_energy_ev = 2.74
s1_dipole = 0.8
s2_dipole = 1.0

[couplings]
s1_exciton_cm1 = -500
s2_exciton_cm1 = -150

[modes]
mode1_frequency_cm1 = 300
mode1_g_s1_cm1 = 150
mode1_g_s2_cm1 = -200
mode1_nmax = 2

[rates]
gamma0_fs = 10
)";

const char* const kFrozen = R"([electronic]
name = frozen
n_monomers = 2
s1_energy_ev = 2.13
s2_energy_ev = 2.74
s1_dipole = 0.8
s2_dipole = 1.0

[couplings]
s1_exciton_cm1 = 0
s2_exciton_cm1 = 0

[modes]
mode1_frequency_cm1 = 300
mode1_g_s1_cm1 = 0
mode1_g_s2_cm1 = 0
mode1_nmax = 2

[rates]
gamma0_fs = 10
)";

struct Scratch {
    fs::path dir;
    Scratch() {
        dir = fs::temp_directory_path() / ("qgs_cli_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
        write("tiny.conf", kTinyDimer);
        write("frozen.conf", kFrozen);
    }
    ~Scratch() { fs::remove_all(dir); }
    fs::path write(const std::string& name, const std::string& text) const {
        std::ofstream(dir / name) << text;
        return dir / name;
    }
};

int run(const std::string& args, const std::string& env = {}) {
    const std::string cmd = env + (env.empty() ? "" : " ") + "\"" + QGS_SIM_PATH + "\" " + args + " --quiet > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::vector<double>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> r;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) r.push_back(std::stod(cell));
        rows.push_back(r);
    }
    return rows;
}

std::string qgs_config(const std::string& extra = {}) {
    return "[run]\nkind = qgs\nmodel = tiny.conf\n\n[channels]\nn_f = 1\n\n[spectrum]\nomega_min_ev = 1.8\n"
           "omega_max_ev = 3.0\nomega_points = 25\ndelay_min_fs = 0\ndelay_max_fs = 20\ndelay_points = 11\n\n"
           "[gate]\ntau_fs = 7\ngamma0_ev = 0.41\n" +
           extra;
}

} // namespace

TEST_CASE("cli exit codes") {
    Scratch s;
    CHECK(run("") == 2);
    CHECK(run("dynamics --config " + (s.dir / "absent.conf").string()) == 2);
    const auto no_model = s.write("no_model.conf", "[run]\nkind = dynamics\nmodel = missing.conf\n");
    CHECK(run("dynamics --config " + no_model.string()) == 2);
    const auto q = s.write("q.conf", qgs_config());
    CHECK(run("dynamics --config " + q.string()) == 2);
    const auto bad = s.write("bad.conf", "[run]\nkind = classical\nmodel = tiny.conf\n\n[classical]\n"
                                         "sigma_omega_inverse_fs = 0\n");
    CHECK(run("classical --config " + bad.string() + " --out " + (s.dir / "bad").string()) == 2);
    const auto order = s.write("order.conf", "[run]\nkind = classical\nmodel = tiny.conf\n\n[classical]\n"
                                             "order = sideways\n");
    CHECK(run("classical --config " + order.string() + " --out " + (s.dir / "order").string()) == 2);
}

TEST_CASE("cli dynamics writes one row per step") {
    Scratch s;
    const auto cfg = s.write("dyn.conf", "[run]\nkind = dynamics\nmodel = frozen.conf\n\n[propagation]\n"
                                         "duration_fs = 500\ndt_fs = 0.166\n");
    REQUIRE(run("dynamics --config " + cfg.string() + " --out " + (s.dir / "dyn").string()) == 0);
    const auto rows = read_csv(s.dir / "dyn" / "dynamics.csv");
    CHECK(rows.size() == 3013u);
    // no couplings: populations stay at 2 mu^2
    for (const auto& r : rows) {
        CHECK(r[1] == doctest::Approx(2 * 0.64).epsilon(1e-10));
        CHECK(r[2] == doctest::Approx(2 * 1.0).epsilon(1e-10));
    }
    CHECK(fs::exists(s.dir / "dyn" / "manifest.conf"));
    CHECK(fs::exists(s.dir / "dyn" / "populations_monomer.csv"));
}

TEST_CASE("cli qgs reruns are byte-identical across worker counts") {
    Scratch s;
    const auto cfg = s.write("q.conf", qgs_config());
    REQUIRE(run("qgs --config " + cfg.string() + " --out " + (s.dir / "a").string() + " --workers 1") == 0);
    REQUIRE(run("qgs --config " + cfg.string() + " --out " + (s.dir / "b").string() + " --workers 1") == 0);
    REQUIRE(run("qgs --config " + cfg.string() + " --out " + (s.dir / "c").string(), "QGS_SIM_WORKERS=3") == 0);
    const auto a = slurp(s.dir / "a" / "spectrum.csv");
    CHECK(!a.empty());
    CHECK(a == slurp(s.dir / "b" / "spectrum.csv"));
    CHECK(a == slurp(s.dir / "c" / "spectrum.csv"));
    CHECK(slurp(s.dir / "a" / "manifest.conf") == slurp(s.dir / "b" / "manifest.conf"));
    CHECK(slurp(s.dir / "c" / "manifest.conf").find("workers = 3") != std::string::npos);
}

TEST_CASE("cli jsa at the separable point") {
    Scratch s;
    const auto cfg = s.write("jsa.conf", "[run]\nkind = jsa\n\n[jsa]\nomega_plus_ev = 4.8\nomega_minus_ev = 0\n"
                                         "sigma_inverse_fs = 25\ntau_fs = 50\n");
    REQUIRE(run("jsa --config " + cfg.string() + " --out " + (s.dir / "j").string()) == 0);
    const auto man = slurp(s.dir / "j" / "manifest.conf");
    const auto at = man.find("schmidt_number = ");
    REQUIRE(at != std::string::npos);
    CHECK(std::stod(man.substr(at + 17)) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(fs::exists(s.dir / "j" / "jsa.csv"));
}
