#include "hacover/coverage.hpp"

#include <bit>
#include <cmath>

#include "hacover/error.hpp"
#include "hacover/parallel.hpp"

namespace hacover {

void CoverageParams::validate() const {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw parameter_error("radius must be positive");
    if (!(gamma > 0.0) || !(gamma <= 1.0)) throw parameter_error("gamma must be in (0, 1]");
}

bool is_covered(const Configuration& config, const PresetSet& presets, double radius) {
    for (const Configuration& preset : presets.presets) {
        if (chebyshev_distance(config, preset) <= radius) return true;
    }
    return false;
}

double user_covered_mass(const User& user, FitType fit_type, const PresetSet& presets,
                         const TransferFunctionBank& bank, const CoverageParams& params) {
    auto it = user.configs.find(fit_type);
    if (it == user.configs.end()) {
        throw parameter_error("user " + user.id + " has no " + to_string(fit_type) + " configuration");
    }
    double mass = 0.0;
    for (std::size_t j = 0; j < bank.size(); ++j) {
        const Configuration varied = apply_transfer(it->second, bank.functions[j]);
        if (is_covered(varied, presets, params.radius)) mass += bank.weights[j];
    }
    return clip_unit_mass(mass);
}

CoverageReport population_coverage(const Dataset& dataset, const PresetSet& presets,
                                   const TransferFunctionBank& bank, const CoverageParams& params) {
    params.validate();
    if (bank.functions.empty()) throw parameter_error("bank is empty");
    if (dataset.users.empty()) throw validation_error("dataset has no users");

    CoverageReport report;
    report.params = params;
    report.user_ids.reserve(dataset.user_count());
    report.per_user.reserve(dataset.user_count());

    for (const User& user : dataset.users) {
        UserCoverage uc;
        uc.covered = true;
        for (const auto& [fit, config] : user.configs) {
            const double mass = user_covered_mass(user, fit, presets, bank, params);
            uc.mass[fit] = mass;
            if (mass < params.gamma) uc.covered = false;
        }
        if (uc.covered) report.population_coverage += user.weight;
        report.user_ids.push_back(user.id);
        report.per_user.push_back(std::move(uc));
    }
    report.population_coverage = clip_unit_mass(report.population_coverage);
    return report;
}

bool CoverageMatrix::covers(std::size_t candidate, std::size_t row, std::size_t tf) const {
    const std::size_t bit = row * row_words_ * 64 + tf;
    return (candidate_bits(candidate)[bit / 64] >> (bit % 64)) & 1u;
}

std::size_t CoverageMatrix::bit_count(std::size_t candidate) const {
    const std::uint64_t* words = candidate_bits(candidate);
    std::size_t count = 0;
    for (std::size_t w = 0; w < words_; ++w) count += static_cast<std::size_t>(std::popcount(words[w]));
    return count;
}

double CoverageMatrix::variation_mass(std::size_t row, std::size_t tf) const {
    return user_weights_[rows_[row].user_index] * tf_weights_[tf];
}

void CoverageMatrix::set_bank_weights(std::span<const double> weights) {
    if (weights.size() != bank_size_) {
        throw parameter_error("bank weight count does not match the matrix");
    }
    tf_weights_.assign(weights.begin(), weights.end());
}

double CoverageMatrix::row_mass(const std::uint64_t* mask, std::size_t row) const {
    // Accumulates in ascending transfer-function order so the sum is the same
    // double as the direct per-user computation.
    const std::uint64_t* words = mask + row * row_words_;
    double mass = 0.0;
    for (std::size_t w = 0; w < row_words_; ++w) {
        std::uint64_t bits = words[w];
        while (bits != 0) {
            const int b = std::countr_zero(bits);
            mass += tf_weights_[w * 64 + static_cast<std::size_t>(b)];
            bits &= bits - 1;
        }
    }
    return mass;
}

double CoverageMatrix::evaluate(std::span<const std::size_t> selected, double gamma) const {
    std::vector<std::uint64_t> mask(words_, 0);
    for (std::size_t c : selected) {
        if (c >= candidate_count_) throw parameter_error("candidate index out of range");
        const std::uint64_t* words = candidate_bits(c);
        for (std::size_t w = 0; w < words_; ++w) mask[w] |= words[w];
    }

    double pc = 0.0;
    const std::size_t users = user_weights_.size();
    for (std::size_t u = 0; u < users; ++u) {
        bool covered = true;
        for (std::uint32_t r = user_row_begin_[u]; r < user_row_begin_[u + 1]; ++r) {
            if (row_mass(mask.data(), r) < gamma) {
                covered = false;
                break;
            }
        }
        if (covered) pc += user_weights_[u];
    }
    return clip_unit_mass(pc);
}

CoverageMatrix precompute_matrix(std::span<const Configuration> candidates, const Dataset& dataset,
                                 const TransferFunctionBank& bank, const CoverageParams& params) {
    params.validate();
    if (candidates.empty()) throw parameter_error("candidate set is empty");
    if (bank.functions.empty()) throw parameter_error("bank is empty");
    dataset.validate();

    CoverageMatrix matrix;
    matrix.candidate_count_ = candidates.size();
    matrix.bank_size_ = bank.size();
    matrix.tf_weights_ = bank.weights;

    const auto rows = dataset.prescription_rows();
    matrix.row_count_ = rows.size();
    matrix.row_words_ = (matrix.bank_size_ + 63) / 64;
    matrix.words_ = matrix.row_count_ * matrix.row_words_;

    matrix.rows_.reserve(rows.size());
    matrix.user_row_begin_.assign(dataset.user_count() + 1, 0);
    for (const PrescriptionRow& row : rows) {
        matrix.rows_.push_back({static_cast<std::uint32_t>(row.user_index), row.fit_type});
        ++matrix.user_row_begin_[row.user_index + 1];
    }
    for (std::size_t u = 0; u < dataset.user_count(); ++u) {
        matrix.user_row_begin_[u + 1] += matrix.user_row_begin_[u];
    }
    matrix.user_weights_.reserve(dataset.user_count());
    for (const User& user : dataset.users) matrix.user_weights_.push_back(user.weight);

    // Flatten every variation's gains once; the candidate loop then runs over
    // contiguous memory.
    const std::size_t bank_size = matrix.bank_size_;
    std::vector<double> var_gains(rows.size() * bank_size * kNumFrequencies);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t j = 0; j < bank_size; ++j) {
            const Configuration varied = apply_transfer(rows[r].config, bank.functions[j]);
            double* out = var_gains.data() + (r * bank_size + j) * kNumFrequencies;
            for (std::size_t i = 0; i < kNumFrequencies; ++i) out[i] = varied.gains[i];
        }
    }

    matrix.bits_.assign(matrix.candidate_count_ * matrix.words_, 0);
    const double radius = params.radius;
    const std::size_t row_words = matrix.row_words_;
    const std::size_t words = matrix.words_;
    std::uint64_t* bits = matrix.bits_.data();
    const Configuration* cands = candidates.data();
    parallel_for(matrix.candidate_count_, [&, bits, cands](std::size_t begin, std::size_t end) {
        for (std::size_t c = begin; c < end; ++c) {
            const double* cg = cands[c].gains.data();
            std::uint64_t* cbits = bits + c * words;
            for (std::size_t r = 0; r < rows.size(); ++r) {
                std::uint64_t* rbits = cbits + r * row_words;
                const double* vg = var_gains.data() + r * bank_size * kNumFrequencies;
                for (std::size_t j = 0; j < bank_size; ++j, vg += kNumFrequencies) {
                    bool inside = true;
                    for (std::size_t i = 0; i < kNumFrequencies; ++i) {
                        if (std::fabs(cg[i] - vg[i]) > radius) {
                            inside = false;
                            break;
                        }
                    }
                    if (inside) rbits[j / 64] |= std::uint64_t{1} << (j % 64);
                }
            }
        }
    });
    return matrix;
}

double incremental_pc(const CoverageMatrix& matrix, std::span<const std::size_t> selected,
                      const CoverageParams& params) {
    params.validate();
    return matrix.evaluate(selected, params.gamma);
}

std::vector<std::pair<Configuration, double>> collect_variations(const Dataset& dataset,
                                                                 const TransferFunctionBank& bank) {
    if (bank.functions.empty()) throw parameter_error("bank is empty");
    const auto rows = dataset.prescription_rows();
    std::vector<std::pair<Configuration, double>> variations;
    variations.reserve(rows.size() * bank.size());
    for (const PrescriptionRow& row : rows) {
        const double user_weight = dataset.users[row.user_index].weight;
        for (std::size_t j = 0; j < bank.size(); ++j) {
            variations.emplace_back(apply_transfer(row.config, bank.functions[j]),
                                    user_weight * bank.weights[j]);
        }
    }
    return variations;
}

}  // namespace hacover
