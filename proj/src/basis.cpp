#include "qgs/basis.hpp"

#include <limits>
#include <string>

#include "qgs/error.hpp"

namespace qgs {

FockTruncation FockTruncation::from_model(const VibronicModel& model) {
    FockTruncation t;
    for (int j = 0; j < model.mode_instances(); ++j) t.max_occupation.push_back(model.mode_of_instance(j).default_cutoff);
    return t;
}

FockTruncation FockTruncation::uniform(const VibronicModel& model, int n_max) {
    return {std::vector<int>(static_cast<std::size_t>(model.mode_instances()), n_max)};
}

ProductBasis::ProductBasis(const VibronicModel& model, const FockTruncation& trunc, std::size_t dimension_budget)
    : electronic_(model.n_monomers)
    , modes_per_monomer_(model.modes_per_monomer())
    , cutoff_(trunc.max_occupation) {
    if (static_cast<int>(cutoff_.size()) != model.mode_instances())
        throw Error(ErrorCode::InvalidValue, "fock", "truncation has " + std::to_string(cutoff_.size()) +
                                                         " entries, model has " +
                                                         std::to_string(model.mode_instances()) + " mode instances");
    stride_.assign(cutoff_.size(), 1);
    const auto electronic_dim = static_cast<std::size_t>(electronic_.dimension());
    vib_dimension_ = 1;
    for (std::size_t j = cutoff_.size(); j-- > 0;) {
        if (cutoff_[j] < 0) throw Error(ErrorCode::InvalidValue, "fock", "negative cutoff");
        stride_[j] = vib_dimension_;
        const auto radix = static_cast<std::size_t>(cutoff_[j]) + 1;
        if (vib_dimension_ > dimension_budget / radix / electronic_dim)
            throw Error(ErrorCode::DimensionOverBudget, "fock",
                        "product dimension exceeds budget of " + std::to_string(dimension_budget));
        vib_dimension_ *= radix;
    }
    if (dimension() > dimension_budget)
        throw Error(ErrorCode::DimensionOverBudget, "fock",
                    "dimension " + std::to_string(dimension()) + " exceeds budget of " + std::to_string(dimension_budget));
}

bool ProductBasis::contains(std::span<const int> occupations) const {
    if (occupations.size() != cutoff_.size()) return false;
    for (std::size_t j = 0; j < cutoff_.size(); ++j)
        if (occupations[j] < 0 || occupations[j] > cutoff_[j]) return false;
    return true;
}

std::size_t ProductBasis::vib_index(std::span<const int> occupations) const {
    if (!contains(occupations)) throw Error(ErrorCode::ChannelNotInBasis, "occupations", "outside Fock truncation");
    std::size_t idx = 0;
    for (std::size_t j = 0; j < cutoff_.size(); ++j) idx += static_cast<std::size_t>(occupations[j]) * stride_[j];
    return idx;
}

std::vector<int> ProductBasis::decode(std::size_t vib) const {
    std::vector<int> occ(cutoff_.size());
    for (int j = 0; j < mode_instances(); ++j) occ[static_cast<std::size_t>(j)] = occupation(vib, j);
    return occ;
}

ProductBasis build_basis(const VibronicModel& model, const FockTruncation& trunc, std::size_t dimension_budget) {
    return ProductBasis(model, trunc, dimension_budget);
}

} // namespace qgs
