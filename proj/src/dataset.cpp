#include "hacover/dataset.hpp"

#include <cmath>

#include "hacover/error.hpp"

namespace hacover {

void User::validate() const {
    if (id.empty()) throw validation_error("user has empty id");
    if (!(weight > 0.0) || !std::isfinite(weight)) {
        throw validation_error("user " + id + ": weight must be positive and finite");
    }
    if (!(age >= 0.0) || !std::isfinite(age)) {
        throw validation_error("user " + id + ": age must be non-negative");
    }
    for (const auto& [fit, config] : configs) {
        for (double g : config.gains) {
            if (!std::isfinite(g)) {
                throw validation_error("user " + id + ": non-finite gain in " + to_string(fit));
            }
        }
    }
    if (loss_type == LossType::unilateral) {
        if (configs.size() != 1) {
            throw validation_error("user " + id + ": unilateral users need exactly 1 configuration");
        }
        const FitType fit = configs.begin()->first;
        if (fit != FitType::uni_left && fit != FitType::uni_right) {
            throw validation_error("user " + id + ": unilateral fit must be uni_left or uni_right");
        }
    } else {
        if (configs.size() != kAllFitTypes.size()) {
            throw validation_error("user " + id + ": bilateral users need all 4 fit types");
        }
        for (FitType fit : kAllFitTypes) {
            if (!configs.contains(fit)) {
                throw validation_error("user " + id + ": missing " + to_string(fit) + " configuration");
            }
        }
    }
}

std::vector<PrescriptionRow> Dataset::prescription_rows() const {
    std::vector<PrescriptionRow> rows;
    rows.reserve(prescription_row_count());
    for (std::size_t u = 0; u < users.size(); ++u) {
        for (FitType fit : kAllFitTypes) {
            auto it = users[u].configs.find(fit);
            if (it != users[u].configs.end()) {
                rows.push_back({u, fit, it->second});
            }
        }
    }
    return rows;
}

std::size_t Dataset::prescription_row_count() const {
    std::size_t count = 0;
    for (const User& user : users) count += user.configs.size();
    return count;
}

void Dataset::normalize_weights() {
    double total = 0.0;
    for (const User& user : users) total += user.weight;
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw validation_error("total user weight must be positive and finite");
    }
    // Skip the division when already normalized so saving and reloading keeps
    // the weights bit-for-bit.
    if (std::fabs(total - 1.0) <= 1e-12) return;
    for (User& user : users) user.weight /= total;
}

void Dataset::validate() const {
    if (users.empty()) throw validation_error("dataset has no users");
    for (const User& user : users) user.validate();
}

Dataset subset_dataset(const Dataset& dataset, const std::vector<bool>& keep) {
    if (keep.size() != dataset.users.size()) {
        throw parameter_error("subset flags must match the user count");
    }
    Dataset out;
    for (std::size_t u = 0; u < dataset.users.size(); ++u) {
        if (keep[u]) out.users.push_back(dataset.users[u]);
    }
    if (out.users.empty()) throw validation_error("subset matches no users");
    out.normalize_weights();
    return out;
}

}  // namespace hacover
