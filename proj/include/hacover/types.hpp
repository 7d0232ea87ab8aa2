#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "hacover/error.hpp"

namespace hacover {

// The six REIG frequencies, in Hz. The whole schema is fixed to these bands.
inline constexpr std::size_t kNumFrequencies = 6;
inline constexpr std::array<double, kNumFrequencies> kFrequenciesHz{
    500.0, 1000.0, 2000.0, 3000.0, 4000.0, 6000.0};

// Anchor frequencies of the deviation lines.
inline constexpr double kAnchorLowHz = 500.0;
inline constexpr double kAnchorHighHz = 4000.0;

inline std::size_t frequency_index(double freq_hz) {
    for (std::size_t i = 0; i < kNumFrequencies; ++i) {
        if (kFrequenciesHz[i] == freq_hz) return i;
    }
    throw parameter_error("unknown frequency " + std::to_string(freq_hz) + " Hz");
}

// A gain-frequency response: one gain in dB per band.
struct Configuration {
    std::array<double, kNumFrequencies> gains{};

    double& operator[](std::size_t i) { return gains[i]; }
    double operator[](std::size_t i) const { return gains[i]; }

    double gain_at(double freq_hz) const { return gains[frequency_index(freq_hz)]; }

    bool operator==(const Configuration&) const = default;
};

// Chebyshev (max-abs) distance between two configurations.
inline double chebyshev_distance(const Configuration& a, const Configuration& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < kNumFrequencies; ++i) {
        d = std::max(d, std::abs(a.gains[i] - b.gains[i]));
    }
    return d;
}

enum class LossType { unilateral, bilateral };
enum class FitType { uni_left, uni_right, bi_left, bi_right };
enum class Sex { male, female };

inline constexpr std::size_t kNumFitTypes = 4;
inline constexpr std::array<FitType, kNumFitTypes> kAllFitTypes{
    FitType::uni_left, FitType::uni_right, FitType::bi_left, FitType::bi_right};

std::string to_string(LossType t);
std::string to_string(FitType t);
std::string to_string(Sex s);
LossType loss_type_from_string(const std::string& s);
FitType fit_type_from_string(const std::string& s);
Sex sex_from_string(const std::string& s);

}  // namespace hacover
