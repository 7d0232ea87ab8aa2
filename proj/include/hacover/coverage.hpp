#pragma once

#include <cstdint>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hacover/dataset.hpp"
#include "hacover/transfer.hpp"
#include "hacover/types.hpp"

namespace hacover {

struct CoverageParams {
    double radius = 5.0;  // dB, Chebyshev ball radius
    double gamma = 0.8;   // likelihood-mass threshold per fit type

    void validate() const;
};

struct PresetSet {
    std::vector<Configuration> presets;

    std::size_t size() const { return presets.size(); }
    bool empty() const { return presets.empty(); }
};

struct UserCoverage {
    bool covered = false;
    std::map<FitType, double> mass;  // covered likelihood mass per fit type
};

struct CoverageReport {
    double population_coverage = 0.0;
    CoverageParams params;
    std::vector<std::string> user_ids;   // dataset order
    std::vector<UserCoverage> per_user;  // dataset order
};

// Covered mass is a probability; summation noise on normalized weights can
// land an ulp above 1. Every evaluation path clips its result through this,
// so cross-checks between paths stay bit-identical.
inline double clip_unit_mass(double mass) { return mass > 1.0 ? 1.0 : mass; }

// True iff some preset is within `radius` (inclusive) of config in max-abs
// distance.
bool is_covered(const Configuration& config, const PresetSet& presets, double radius);

// Likelihood mass of the user's covered variations for one fit type.
double user_covered_mass(const User& user, FitType fit_type, const PresetSet& presets,
                         const TransferFunctionBank& bank, const CoverageParams& params);

// Population coverage per the thresholded per-fit-type rule: a unilateral
// user is covered when its mass reaches gamma, a bilateral user when all four
// fit types do.
CoverageReport population_coverage(const Dataset& dataset, const PresetSet& presets,
                                   const TransferFunctionBank& bank, const CoverageParams& params);

// Precomputed candidate-versus-variation coverage bits for the optimizers.
//
// Variations are laid out row-major: prescription row r and transfer function
// j form variation v = r * bank_size + j. Internally each row is padded to a
// whole number of 64-bit words so bit scans stay word-aligned.
class CoverageMatrix {
  public:
    std::size_t candidate_count() const { return candidate_count_; }
    std::size_t variation_count() const { return row_count_ * bank_size_; }
    std::size_t row_count() const { return row_count_; }
    std::size_t bank_size() const { return bank_size_; }

    bool covers(std::size_t candidate, std::size_t row, std::size_t tf) const;
    std::size_t bit_count(std::size_t candidate) const;

    // Raw word access for word-at-a-time scans. Bit j of row r lives at word
    // r * words_per_row() + j / 64.
    std::size_t words_per_row() const { return row_words_; }
    std::size_t words_per_candidate() const { return words_; }
    std::uint64_t covers_word(std::size_t candidate, std::size_t word) const {
        return candidate_bits(candidate)[word];
    }

    // w_u * cl_j for variation (row, tf).
    double variation_mass(std::size_t row, std::size_t tf) const;

    // Refreshes likelihood weights without touching the geometry bits.
    void set_bank_weights(std::span<const double> weights);

    // Exact population coverage of the candidate subset. Matches
    // population_coverage() on the corresponding preset set bit for bit.
    double evaluate(std::span<const std::size_t> selected, double gamma) const;

    struct RowRef {
        std::uint32_t user_index;
        FitType fit_type;
    };
    const std::vector<RowRef>& rows() const { return rows_; }
    const std::vector<double>& user_weights() const { return user_weights_; }

  private:
    friend CoverageMatrix precompute_matrix(std::span<const Configuration>, const Dataset&,
                                            const TransferFunctionBank&, const CoverageParams&);
    friend class GreedyState;

    std::size_t candidate_count_ = 0;
    std::size_t row_count_ = 0;
    std::size_t bank_size_ = 0;
    std::size_t row_words_ = 0;  // words per row
    std::size_t words_ = 0;      // words per candidate bitset
    std::vector<std::uint64_t> bits_;     // candidate-major
    std::vector<double> tf_weights_;      // cl_j, indexed by tf
    std::vector<RowRef> rows_;
    std::vector<std::uint32_t> user_row_begin_;  // users+1 entries
    std::vector<double> user_weights_;

    const std::uint64_t* candidate_bits(std::size_t candidate) const {
        return bits_.data() + candidate * words_;
    }
    double row_mass(const std::uint64_t* mask, std::size_t row) const;
};

CoverageMatrix precompute_matrix(std::span<const Configuration> candidates, const Dataset& dataset,
                                 const TransferFunctionBank& bank, const CoverageParams& params);

// Population coverage of a candidate index subset, recomputed fresh from the
// matrix. Exactly equal to population_coverage() on the lifted preset set.
double incremental_pc(const CoverageMatrix& matrix, std::span<const std::size_t> selected,
                      const CoverageParams& params);

// All variations as (configuration, w_u * cl_j) pairs, in variation order.
std::vector<std::pair<Configuration, double>> collect_variations(const Dataset& dataset,
                                                                 const TransferFunctionBank& bank);

}  // namespace hacover
