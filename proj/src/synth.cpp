#include "hacover/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "hacover/error.hpp"

namespace hacover {

namespace {

// In-plane directions: d1 raises all bands together (loudness), d2 tilts
// low bands against high bands. Both unit length, mutually orthogonal.
std::array<double, kNumFrequencies> loudness_direction() {
    std::array<double, kNumFrequencies> d;
    const double v = 1.0 / std::sqrt(static_cast<double>(kNumFrequencies));
    d.fill(v);
    return d;
}

std::array<double, kNumFrequencies> tilt_direction() {
    std::array<double, kNumFrequencies> d;
    double norm_sq = 0.0;
    const double mid = (static_cast<double>(kNumFrequencies) - 1.0) / 2.0;
    for (std::size_t i = 0; i < kNumFrequencies; ++i) {
        d[i] = static_cast<double>(i) - mid;
        norm_sq += d[i] * d[i];
    }
    const double norm = std::sqrt(norm_sq);
    for (double& v : d) v /= norm;
    return d;
}

Configuration plane_point(const Configuration& base, double along_loudness, double along_tilt) {
    static const auto d1 = loudness_direction();
    static const auto d2 = tilt_direction();
    Configuration out = base;
    for (std::size_t i = 0; i < kNumFrequencies; ++i) {
        out.gains[i] += along_loudness * d1[i] + along_tilt * d2[i];
    }
    return out;
}

}  // namespace

void SynthSpec::validate() const {
    if (n_users < 1) throw parameter_error("n_users must be at least 1");
    if (!(bilateral_fraction >= 0.0) || !(bilateral_fraction <= 1.0)) {
        throw parameter_error("bilateral_fraction must be in [0, 1]");
    }
    if (profiles.empty() && n_profiles < 1) throw parameter_error("n_profiles must be at least 1");
    if (!(profile_spread_db >= 0.0)) throw parameter_error("profile_spread_db must be non-negative");
    if (!(noise_std_db >= 0.0)) throw parameter_error("noise_std_db must be non-negative");
    if (!(off_plane_std_db >= 0.0)) throw parameter_error("off_plane_std_db must be non-negative");
    if (!(weight_concentration > 0.0)) throw parameter_error("weight_concentration must be positive");
    if (!(male_fraction >= 0.0) || !(male_fraction <= 1.0)) {
        throw parameter_error("male_fraction must be in [0, 1]");
    }
    if (age_min < 0 || age_max < age_min) throw parameter_error("need 0 <= age_min <= age_max");
    if (!(ear_offset_std_db >= 0.0)) throw parameter_error("ear_offset_std_db must be non-negative");
}

Dataset synth_dataset(const SynthSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);

    // A typical mild-to-moderate sloping-loss gain curve as the plane origin.
    Configuration base;
    base.gains = {12.0, 15.0, 20.0, 24.0, 26.0, 25.0};

    std::vector<Configuration> profiles = spec.profiles;
    if (profiles.empty()) {
        // Profiles on a circle in the plane so any pair is well separated.
        profiles.reserve(static_cast<std::size_t>(spec.n_profiles));
        for (int p = 0; p < spec.n_profiles; ++p) {
            const double angle = 2.0 * std::numbers::pi * static_cast<double>(p) / static_cast<double>(spec.n_profiles);
            profiles.push_back(plane_point(base, spec.profile_spread_db * std::cos(angle),
                                           spec.profile_spread_db * std::sin(angle)));
        }
    }

    std::uniform_int_distribution<std::size_t> pick_profile(0, profiles.size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> in_plane(0.0, spec.noise_std_db > 0.0 ? spec.noise_std_db : 1e-12);
    std::normal_distribution<double> off_plane(0.0, spec.off_plane_std_db > 0.0 ? spec.off_plane_std_db : 1e-12);
    std::normal_distribution<double> ear_offset(0.0, spec.ear_offset_std_db > 0.0 ? spec.ear_offset_std_db : 1e-12);
    std::gamma_distribution<double> raw_weight(spec.weight_concentration, 1.0);
    std::uniform_int_distribution<int> age(spec.age_min, spec.age_max);

    Dataset dataset;
    dataset.users.reserve(static_cast<std::size_t>(spec.n_users));
    for (int u = 0; u < spec.n_users; ++u) {
        User user;
        user.id = "synth_" + std::to_string(u);
        user.loss_type = unit(rng) < spec.bilateral_fraction ? LossType::bilateral : LossType::unilateral;
        user.sex = unit(rng) < spec.male_fraction ? Sex::male : Sex::female;
        user.age = static_cast<double>(age(rng));
        user.weight = raw_weight(rng);
        if (!(user.weight > 0.0)) user.weight = 1e-9;  // Gamma can underflow for tiny shapes

        const Configuration& profile = profiles[pick_profile(rng)];
        Configuration fitted = plane_point(profile, spec.noise_std_db > 0.0 ? in_plane(rng) : 0.0,
                                           spec.noise_std_db > 0.0 ? in_plane(rng) : 0.0);
        if (spec.off_plane_std_db > 0.0) {
            for (double& g : fitted.gains) g += off_plane(rng);
        }

        if (user.loss_type == LossType::unilateral) {
            const FitType fit = unit(rng) < 0.5 ? FitType::uni_left : FitType::uni_right;
            user.configs[fit] = fitted;
        } else {
            for (FitType fit : kAllFitTypes) {
                Configuration per_fit = fitted;
                if (spec.ear_offset_std_db > 0.0) {
                    for (double& g : per_fit.gains) g += ear_offset(rng);
                }
                user.configs[fit] = per_fit;
            }
        }
        dataset.users.push_back(std::move(user));
    }

    dataset.normalize_weights();
    dataset.validate();
    return dataset;
}

}  // namespace hacover
