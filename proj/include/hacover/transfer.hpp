#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "hacover/types.hpp"

namespace hacover {

// A log-linear deviation from a prescribed configuration, anchored at
// 500 Hz and 4000 Hz. Values at the other bands lie on the line through the
// anchors in log2-frequency; 6000 Hz extrapolates the same line.
struct TransferFunction {
    double anchor_low = 0.0;   // dB at 500 Hz
    double anchor_high = 0.0;  // dB at 4000 Hz
    std::array<double, kNumFrequencies> values{};

    bool is_identity() const;
};

// All candidate deviations plus one likelihood weight per deviation.
// Weights are shared across users and sum to 1 once populated.
struct TransferFunctionBank {
    std::vector<TransferFunction> functions;
    std::vector<double> weights;

    std::size_t size() const { return functions.size(); }
    std::size_t identity_index() const;
};

// 2D Gaussian over (low, high) average deviations, diagonal covariance.
struct DeviationModel {
    std::array<double, 2> mean{0.0, 0.0};  // dB
    std::array<double, 2> std{5.0, 5.0};   // dB, strictly positive
    double scale = 1.0;                    // multiplier on std

    DeviationModel with_scale(double s) const;
};

// Builds one function per (low, high) anchor pair on the lattice
// {-range, -range+step, ..., range}. Weights are left uniform.
TransferFunctionBank build_transfer_bank(double range_db = 15.0, double step_db = 3.75,
                                         const std::array<double, kNumFrequencies>& frequencies = kFrequenciesHz);

Configuration apply_transfer(const Configuration& config, const TransferFunction& tf);

// (low, high) averages: low over 500/1000 Hz, high over 2000/3000/4000 Hz.
std::pair<double, double> deviation_features(const TransferFunction& tf);

// Sample mean and standard deviation (n-1 convention) per coordinate.
DeviationModel fit_deviation_model(const std::vector<std::pair<double, double>>& points);

// Returns a copy of the bank with Gaussian likelihood weights, normalized to
// sum to 1 over the bank.
TransferFunctionBank variation_weights(const TransferFunctionBank& bank, const DeviationModel& model);

// Reads `low_dev,high_dev` rows from a CSV file.
std::vector<std::pair<double, double>> load_deviation_points(const std::string& path);

}  // namespace hacover
