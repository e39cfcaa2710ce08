#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "qgs/error.hpp"
#include "qgs/signal.hpp"

namespace qgs {

static_assert(std::endian::native == std::endian::little, "overlap table I/O assumes a little-endian host");

namespace {

void compositions(int remaining, std::size_t pos, std::vector<int>& current, std::vector<std::vector<int>>& out) {
    if (pos + 1 == current.size()) {
        current[pos] = remaining;
        out.push_back(current);
        return;
    }
    for (int n = remaining; n >= 0; --n) {
        current[pos] = n;
        compositions(remaining - n, pos + 1, current, out);
    }
    current[pos] = 0;
}

template <class T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T take(std::istream& is, const std::filesystem::path& path) {
    T v{};
    if (!is.read(reinterpret_cast<char*>(&v), sizeof(T)))
        throw Error(ErrorCode::IoError, path.string(), "truncated overlap table");
    return v;
}

constexpr char kMagic[8] = {'Q', 'G', 'S', 'O', 'V', 'L', '1', '\0'};

} // namespace

std::vector<FinalChannel> enumerate_final_channels(const VibronicModel& model, int n_f, std::size_t budget) {
    if (n_f < 0) throw Error(ErrorCode::InvalidValue, "channels.n_f", "must be >= 0");
    const int k = model.mode_instances();
    // C(k + n_f, n_f)
    double count = 1.0;
    for (int i = 1; i <= n_f; ++i) count = count * (k + i) / i;
    if (count > static_cast<double>(budget))
        throw Error(ErrorCode::ChannelBudgetExceeded, "channels.n_f",
                    std::to_string(static_cast<long long>(count)) + " channels > budget " + std::to_string(budget));

    std::vector<FinalChannel> out;
    if (k == 0) {
        out.push_back({{}, 0.0, 0});
        return out;
    }
    std::vector<int> current(static_cast<std::size_t>(k), 0);
    for (int total = 0; total <= n_f; ++total) {
        std::vector<std::vector<int>> level;
        compositions(total, 0, current, level);
        for (auto& occ : level) {
            double e = 0.0;
            for (int j = 0; j < k; ++j) e += occ[static_cast<std::size_t>(j)] * model.mode_of_instance(j).frequency_ev;
            out.push_back({std::move(occ), e, out.size()});
        }
    }
    return out;
}

std::vector<std::size_t> overlap_vib_indices(const ProductBasis& basis, const std::vector<FinalChannel>& channels) {
    std::vector<std::size_t> idx;
    idx.reserve(channels.size());
    for (const auto& c : channels) idx.push_back(basis.vib_index(c.occupations));
    return idx;
}

void OverlapTable::write(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorCode::IoError, path.string(), "cannot open for writing");
    os.write(kMagic, sizeof kMagic);
    put<std::uint64_t>(os, channels.size());
    put<std::uint64_t>(os, grid.steps);
    put<double>(os, grid.dt);
    put<double>(os, grid.t0);
    put<double>(os, ground_energy_ev);
    const auto n_inst = static_cast<std::uint32_t>(channels.empty() ? 0 : channels.front().occupations.size());
    put<std::uint32_t>(os, n_inst);
    for (const auto& c : channels) {
        for (int n : c.occupations) put<std::int32_t>(os, n);
        put<double>(os, c.energy_ev);
    }
    for (Eigen::Index c = 0; c < values.rows(); ++c)
        for (Eigen::Index s = 0; s < values.cols(); ++s) {
            put<double>(os, values(c, s).real());
            put<double>(os, values(c, s).imag());
        }
    if (!os) throw Error(ErrorCode::IoError, path.string(), "write failed");
}

OverlapTable OverlapTable::read(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorCode::IoError, path.string(), "cannot open");
    char magic[8];
    if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw Error(ErrorCode::IoError, path.string(), "not an overlap table");
    OverlapTable t;
    const auto n_channels = take<std::uint64_t>(is, path);
    t.grid.steps = take<std::uint64_t>(is, path);
    t.grid.dt = take<double>(is, path);
    t.grid.t0 = take<double>(is, path);
    t.ground_energy_ev = take<double>(is, path);
    const auto n_inst = take<std::uint32_t>(is, path);
    for (std::uint64_t c = 0; c < n_channels; ++c) {
        FinalChannel ch;
        ch.id = c;
        for (std::uint32_t j = 0; j < n_inst; ++j) ch.occupations.push_back(take<std::int32_t>(is, path));
        ch.energy_ev = take<double>(is, path);
        t.channels.push_back(std::move(ch));
    }
    t.values.resize(static_cast<Eigen::Index>(n_channels), static_cast<Eigen::Index>(t.grid.samples()));
    for (Eigen::Index c = 0; c < t.values.rows(); ++c)
        for (Eigen::Index s = 0; s < t.values.cols(); ++s) {
            const double re = take<double>(is, path);
            const double im = take<double>(is, path);
            t.values(c, s) = {re, im};
        }
    return t;
}

OverlapTable record_overlaps(const Trajectory& trajectory, const VibronicModel& model,
                             const std::vector<FinalChannel>& channels) {
    if (static_cast<std::size_t>(trajectory.overlaps.rows()) != channels.size())
        throw Error(ErrorCode::InvalidValue, "overlaps",
                    "trajectory recorded " + std::to_string(trajectory.overlaps.rows()) + " channels, expected " +
                        std::to_string(channels.size()));
    OverlapTable t{trajectory.grid, channels, trajectory.overlaps,
                   model.ground_energy_ev + model.zero_point_energy_ev()};
    if (t.values.cols() == 0) return t;
    double scale = 0.0;
    for (Eigen::Index c = 0; c < t.values.rows(); ++c) scale = std::max(scale, std::abs(t.values(c, 0)));
    for (std::size_t c = 0; c < channels.size(); ++c) {
        bool vacuum = true;
        for (int n : channels[c].occupations) vacuum = vacuum && n == 0;
        if (vacuum) continue;
        const double o = std::abs(t.values(static_cast<Eigen::Index>(c), 0));
        if (o > 1e-12 * std::max(scale, 1.0))
            throw Error(ErrorCode::InvalidValue, "overlaps", "O(0) = " + std::to_string(o) + " on excited channel " +
                                                                 std::to_string(c));
    }
    return t;
}

OverlapTable propagate_overlaps(const VibronicModel& model, const ProductBasis& basis,
                                const std::vector<FinalChannel>& channels, const TimeGrid& grid,
                                const PropagationOptions& options) {
    HamiltonianAction h(model, basis);
    RecorderSelection rec;
    rec.rdm = false;
    rec.mode_positions = false;
    rec.norm_energy = true;
    rec.overlap_vib_indices = overlap_vib_indices(basis, channels);
    const auto traj = propagate_trajectory(h, initial_excited_state(model, basis), grid, rec, options);
    return record_overlaps(traj, model, channels);
}

} // namespace qgs
