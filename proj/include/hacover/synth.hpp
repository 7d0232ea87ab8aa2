#pragma once

#include <cstdint>
#include <vector>

#include "hacover/dataset.hpp"

namespace hacover {

// Synthetic population generator. Users are drawn from a mixture of base
// profiles lying in a 2D plane of the 6D gain space (a loudness direction and
// a tilt direction), plus in-plane noise and a small off-plane jitter, so a
// 2-component reduction captures a tunable variance share.
struct SynthSpec {
    int n_users = 100;
    double bilateral_fraction = 0.3;
    int n_profiles = 3;
    std::vector<Configuration> profiles;  // optional; generated in-plane when empty
    double profile_spread_db = 8.0;       // spread of generated profiles
    double noise_std_db = 2.0;            // in-plane per-user noise
    double off_plane_std_db = 0.2;        // per-band jitter off the plane
    double weight_concentration = 1.0;    // Gamma shape of raw weights
    double male_fraction = 0.5;
    int age_min = 55;
    int age_max = 85;
    double ear_offset_std_db = 0.5;       // per-fit-type offset for bilateral users
    std::uint64_t seed = 0;

    void validate() const;
};

Dataset synth_dataset(const SynthSpec& spec);

}  // namespace hacover
