#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "hacover/types.hpp"

namespace hacover {

struct User {
    std::string id;
    double weight = 0.0;  // normalized population weight
    LossType loss_type = LossType::unilateral;
    double age = 0.0;
    Sex sex = Sex::female;
    // Prescribed configuration per fit type: 1 entry for unilateral users,
    // 4 for bilateral users.
    std::map<FitType, Configuration> configs;

    void validate() const;
};

// One (user, fit_type) prescription, in flattened dataset order.
struct PrescriptionRow {
    std::size_t user_index;
    FitType fit_type;
    Configuration config;
};

struct Dataset {
    std::vector<User> users;

    std::size_t user_count() const { return users.size(); }

    // Rows in user order; bilateral fit types in uni_left, uni_right,
    // bi_left, bi_right order.
    std::vector<PrescriptionRow> prescription_rows() const;
    std::size_t prescription_row_count() const;

    // Scales user weights to sum to 1. Throws if the total is not positive.
    void normalize_weights();
    void validate() const;
};

// Restricts to users matched by `keep` flags and renormalizes weights.
Dataset subset_dataset(const Dataset& dataset, const std::vector<bool>& keep);

}  // namespace hacover
