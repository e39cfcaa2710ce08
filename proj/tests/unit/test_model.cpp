#include <doctest.h>

#include <cmath>
#include <filesystem>

#include <Eigen/Eigenvalues>

#include "qgs/basis.hpp"
#include "qgs/config.hpp"
#include "qgs/error.hpp"
#include "qgs/hamiltonian.hpp"
#include "qgs/model.hpp"
#include "qgs/units.hpp"

#include "../support/fixtures.hpp"

using namespace qgs;

namespace {

const char* kMinimal = R"(
[electronic]
n_monomers = 1
s1_energy_ev = 2.13
s2_energy_ev = 2.74
s1_dipole = 0.8
s2_dipole = 1.0
[couplings]
[modes]
mode1_frequency_cm1 = 300
mode1_g_s1_cm1 = 150
mode1_nmax = 4
[rates]
gamma0_ev = 0.41
)";

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no qgs::Error thrown");
    return ErrorCode::IoError;
}

std::string replaced(std::string text, const std::string& from, const std::string& to) {
    text.replace(text.find(from), from.size(), to);
    return text;
}

} // namespace

TEST_CASE("unit conversions") {
    CHECK(wavenumber_to_ev(8065.543937) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(inverse_fs_to_ev(10.0) == doctest::Approx(0.06582119569));
    CHECK(convert_units(0.61, Unit::ElectronVolt, Unit::FsPeriod) == doctest::Approx(6.7797).epsilon(1e-4));
    CHECK(convert_units(convert_units(1600.0, Unit::Wavenumber, Unit::FsInverse), Unit::FsInverse, Unit::Wavenumber) ==
          doctest::Approx(1600.0));
    CHECK(parse_unit("CM-1") == Unit::Wavenumber);
    CHECK(code_of([] { parse_unit("hartree"); }) == ErrorCode::UnknownUnit);
}

TEST_CASE("key/value documents") {
    const auto doc = KeyValueDocument::parse("# c\n[a]\nx = 1 ; tail\ny=2, 3\n[b]\nz_cm1 = 8065.543937\n");
    CHECK(doc.get("a", "x") == "1");
    CHECK(split_list(*doc.get("a", "y")).size() == 2);
    CHECK(get_energy_ev(doc, "b", "z").value() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_FALSE(doc.get("b", "missing").has_value());
    CHECK(code_of([] { KeyValueDocument::parse("[a]\nx = 1\nx = 2\n"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { get_energy_ev(KeyValueDocument::parse("[a]\nw_hz = 3\n"), "a", "w"); }) ==
          ErrorCode::UnknownUnit);
    CHECK(code_of([] { get_energy_ev(KeyValueDocument::parse("[a]\nw_ev = 1\nw_cm1 = 3\n"), "a", "w"); }) ==
          ErrorCode::ParseError);
    CHECK(code_of([] { parse_double("1.5x", "a.b"); }) == ErrorCode::ParseError);
    const double v = 0.1 + 0.2;
    CHECK(parse_double(format_double(v), "k") == v);
    auto edit = doc;
    edit.set("a", "x", "5");
    edit.erase("a", "y");
    CHECK(KeyValueDocument::parse(edit.to_string()).get("a", "x") == "5");
    CHECK_FALSE(KeyValueDocument::parse(edit.to_string()).get("a", "y").has_value());
}

TEST_CASE("model parsing and validation") {
    const auto m = parse_model_config(kMinimal);
    CHECK(m.n_monomers == 1);
    CHECK(m.modes.size() == 1);
    CHECK(m.modes[0].frequency_ev == doctest::Approx(300 * kEvPerWavenumber));
    CHECK(m.modes[0].default_cutoff == 4);
    CHECK(m.gamma0_ev == doctest::Approx(0.41));
    CHECK(m.zero_point_energy_ev() == doctest::Approx(150 * kEvPerWavenumber));

    const auto again = parse_model_config(serialize_model(m));
    CHECK(again.modes[0].diagonal_coupling_ev[0] == m.modes[0].diagonal_coupling_ev[0]);
    CHECK(again.state_energies_ev == m.state_energies_ev);

    CHECK(code_of([] { parse_model_config(replaced(kMinimal, "mode1_frequency_cm1 = 300", "mode1_frequency_cm1 = 0")); }) ==
          ErrorCode::NonPositiveFrequency);
    CHECK(code_of([] {
              parse_model_config(replaced(kMinimal, "mode1_nmax = 4", "mode1_g_s1s2_cm1 = 800\nmode1_g_s2s1_cm1 = 700"));
          }) == ErrorCode::NonHermitianCoupling);
    CHECK(code_of([] { parse_model_config(replaced(kMinimal, "s1_energy_ev = 2.13\n", "")); }) == ErrorCode::MissingField);
    CHECK(code_of([] { parse_model_config(replaced(kMinimal, "mode1_g_s1_cm1", "mode1_g_s1_kcal")); }) ==
          ErrorCode::UnknownUnit);
    CHECK(code_of([] { parse_model_config(replaced(kMinimal, "n_monomers = 1", "n_monomers = 4")); }) ==
          ErrorCode::InvalidValue);
}

TEST_CASE("shipped models load") {
    for (const char* name : {"pbi1_monomer.conf", "pbi1_dimer.conf", "pbi1_trimer.conf"}) {
        const auto m = load_model(std::filesystem::path(QGS_SOURCE_DIR) / "models" / name);
        CHECK(m.modes.size() >= 1);
        CHECK(m.state_energies_ev[1] - m.state_energies_ev[0] == doctest::Approx(0.61));
    }
    CHECK(code_of([] { load_model("/nonexistent/model.conf"); }) == ErrorCode::ConfigError);
}

TEST_CASE("product basis index map") {
    auto m = parse_model_config(kMinimal);
    m.n_monomers = 2;
    m.modes.push_back(m.modes[0]);
    m.modes[1].default_cutoff = 2;
    const ProductBasis b(m, FockTruncation::from_model(m));
    CHECK(b.electronic().dimension() == 5);
    CHECK(b.vib_dimension() == 5u * 3u * 5u * 3u);
    CHECK(b.dimension() == 5u * 225u);
    CHECK(b.electronic().index(1, Excited::S2) == 4);
    const std::vector<int> occ{1, 2, 3, 0};
    CHECK(b.decode(b.vib_index(occ)) == occ);
    CHECK(b.vib_index(std::vector<int>{1, 0, 0, 0}) == 45u); // first instance most significant
    CHECK_FALSE(b.contains(std::vector<int>{0, 3, 0, 0}));
    CHECK_THROWS_AS(ProductBasis(m, FockTruncation::from_model(m), 100), Error);
}

TEST_CASE("hamiltonian is real symmetric and matches the matrix-free action") {
    auto m = parse_model_config(kMinimal);
    m.n_monomers = 2;
    m.exciton_couplings_ev = {-0.06, -0.02};
    m.modes[0].offdiagonal_coupling_ev = 0.05;
    m.modes[0].default_cutoff = 3;
    const ProductBasis b(m, FockTruncation::from_model(m));
    const HamiltonianAction h(m, b);
    const Eigen::MatrixXd d = h.dense();
    CHECK((d - d.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::VectorXcd x = Eigen::VectorXcd::Random(static_cast<Eigen::Index>(b.dimension())), y;
    h.apply(x, y);
    CHECK((y - d.cast<cplx>() * x).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(h.expectation(x) == doctest::Approx((x.adjoint() * d.cast<cplx>() * x)(0, 0).real()));
    CHECK(d(0, 0) == doctest::Approx(m.ground_energy_ev + m.zero_point_energy_ev()));
}

TEST_CASE("displaced oscillator: lowest S1 level is shifted by -g^2 / (2 w)") {
    auto m = test::two_level(2.0, 9.0, 1.0, 0.0);
    m.modes[0].frequency_ev = 0.2;
    m.modes[0].diagonal_coupling_ev = {0.1, 0.0};
    m.modes[0].default_cutoff = 40;
    const ProductBasis b(m, FockTruncation::from_model(m));
    const HamiltonianAction h(m, b);
    const Eigen::MatrixXd d = h.dense();
    const auto nv = static_cast<Eigen::Index>(b.vib_dimension());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> s1(d.block(nv, nv, nv, nv));
    CHECK(s1.eigenvalues()[0] == doctest::Approx(2.0 + 0.1 - 0.1 * 0.1 / (2.0 * 0.2)).epsilon(1e-10));
}

TEST_CASE("dipole operator") {
    auto m = parse_model_config(kMinimal);
    m.n_monomers = 2;
    const ProductBasis b(m, FockTruncation::from_model(m));
    const DipoleOperator v(m, b);
    CHECK(v.total_strength() == doctest::Approx(2 * (0.64 + 1.0)));
    Eigen::VectorXcd g = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(b.dimension()));
    g[0] = 1.0;
    const auto up = v.raise(g);
    CHECK(up.squaredNorm() == doctest::Approx(v.total_strength()));
    CHECK(v.emission_overlap(up, 0).real() == doctest::Approx(v.total_strength()));
    CHECK(v.emission_overlap(up, 0).imag() == 0.0);
    const Eigen::MatrixXd r = v.dense_raise();
    CHECK((r.cast<cplx>() * g - up).norm() < 1e-14);
    CHECK((v.lower(up) - r.transpose().cast<cplx>() * up).norm() < 1e-14);
}
