// basis.hpp: electronic basis, Fock truncation and the flat product-basis index map

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qgs/model.hpp"

namespace qgs {

// |G> at index 0, then |m, a> at 1 + 2 m + a.
class ElectronicBasis {
public:
    explicit ElectronicBasis(int n_monomers) : n_monomers_(n_monomers) {}

    int n_monomers() const { return n_monomers_; }
    int dimension() const { return 1 + n_monomers_ * kExcitedStates; }
    static constexpr int ground() { return 0; }
    int index(int monomer, Excited state) const { return 1 + monomer * kExcitedStates + static_cast<int>(state); }
    bool is_ground(int e) const { return e == 0; }
    int monomer_of(int e) const { return (e - 1) / kExcitedStates; }
    Excited state_of(int e) const { return static_cast<Excited>((e - 1) % kExcitedStates); }

private:
    int n_monomers_;
};

// n_max per mode instance (instance = monomer * modes_per_monomer + mode).
struct FockTruncation {
    std::vector<int> max_occupation;

    static FockTruncation from_model(const VibronicModel& model);
    static FockTruncation uniform(const VibronicModel& model, int n_max);
};

inline constexpr std::size_t kDefaultDimensionBudget = 5'000'000;

// Flat index = electronic * vib_dimension + vibrational, vibrational index
// lexicographic over mode instances with the first instance most significant.
class ProductBasis {
public:
    ProductBasis(const VibronicModel& model, const FockTruncation& trunc,
                 std::size_t dimension_budget = kDefaultDimensionBudget);

    const ElectronicBasis& electronic() const { return electronic_; }
    int mode_instances() const { return static_cast<int>(cutoff_.size()); }
    int modes_per_monomer() const { return modes_per_monomer_; }
    int cutoff(int instance) const { return cutoff_[static_cast<std::size_t>(instance)]; }
    std::size_t stride(int instance) const { return stride_[static_cast<std::size_t>(instance)]; }
    std::size_t vib_dimension() const { return vib_dimension_; }
    std::size_t dimension() const { return vib_dimension_ * static_cast<std::size_t>(electronic_.dimension()); }

    std::size_t vib_index(std::span<const int> occupations) const;
    bool contains(std::span<const int> occupations) const;
    std::size_t flat_index(int electronic, std::span<const int> occupations) const {
        return static_cast<std::size_t>(electronic) * vib_dimension_ + vib_index(occupations);
    }
    int occupation(std::size_t vib, int instance) const {
        return static_cast<int>((vib / stride(instance)) % static_cast<std::size_t>(cutoff(instance) + 1));
    }
    std::vector<int> decode(std::size_t vib) const;

private:
    ElectronicBasis electronic_;
    int modes_per_monomer_;
    std::vector<int> cutoff_;
    std::vector<std::size_t> stride_;
    std::size_t vib_dimension_ = 1;
};

ProductBasis build_basis(const VibronicModel& model, const FockTruncation& trunc,
                         std::size_t dimension_budget = kDefaultDimensionBudget);

} // namespace qgs
