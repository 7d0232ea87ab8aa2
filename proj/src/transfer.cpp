#include "hacover/transfer.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "hacover/error.hpp"

namespace hacover {

namespace {

TransferFunction make_transfer(double anchor_low, double anchor_high,
                               const std::array<double, kNumFrequencies>& frequencies) {
    TransferFunction tf;
    tf.anchor_low = anchor_low;
    tf.anchor_high = anchor_high;
    const double span = std::log2(kAnchorHighHz / kAnchorLowHz);
    for (std::size_t i = 0; i < kNumFrequencies; ++i) {
        const double t = std::log2(frequencies[i] / kAnchorLowHz) / span;
        tf.values[i] = anchor_low + (anchor_high - anchor_low) * t;
    }
    return tf;
}

}  // namespace

bool TransferFunction::is_identity() const {
    return anchor_low == 0.0 && anchor_high == 0.0;
}

std::size_t TransferFunctionBank::identity_index() const {
    for (std::size_t i = 0; i < functions.size(); ++i) {
        if (functions[i].is_identity()) return i;
    }
    throw parameter_error("bank has no identity function");
}

DeviationModel DeviationModel::with_scale(double s) const {
    if (!(s > 0.0)) throw parameter_error("deviation scale must be positive");
    DeviationModel scaled = *this;
    scaled.scale = s;
    return scaled;
}

TransferFunctionBank build_transfer_bank(double range_db, double step_db,
                                         const std::array<double, kNumFrequencies>& frequencies) {
    if (!(range_db > 0.0)) throw parameter_error("transfer range must be positive");
    if (!(step_db > 0.0)) throw parameter_error("transfer step must be positive");
    const double ratio = range_db / step_db;
    const long half = std::lround(ratio);
    if (std::abs(ratio - static_cast<double>(half)) > 1e-9) {
        throw parameter_error("transfer range must be an integer multiple of the step");
    }

    // Reconstruct each anchor as step * k with integer k so the lattice is
    // symmetric and 0 is hit exactly.
    TransferFunctionBank bank;
    const std::size_t side = static_cast<std::size_t>(2 * half + 1);
    bank.functions.reserve(side * side);
    for (long il = -half; il <= half; ++il) {
        for (long ih = -half; ih <= half; ++ih) {
            bank.functions.push_back(
                make_transfer(step_db * static_cast<double>(il), step_db * static_cast<double>(ih), frequencies));
        }
    }
    bank.weights.assign(bank.functions.size(), 1.0 / static_cast<double>(bank.functions.size()));
    return bank;
}

Configuration apply_transfer(const Configuration& config, const TransferFunction& tf) {
    Configuration out = config;
    for (std::size_t i = 0; i < kNumFrequencies; ++i) out.gains[i] += tf.values[i];
    return out;
}

std::pair<double, double> deviation_features(const TransferFunction& tf) {
    const double low = (tf.values[0] + tf.values[1]) / 2.0;
    const double high = (tf.values[2] + tf.values[3] + tf.values[4]) / 3.0;
    return {low, high};
}

DeviationModel fit_deviation_model(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) throw fit_error("deviation model needs at least 2 points");
    double mean_low = 0.0;
    double mean_high = 0.0;
    for (const auto& [low, high] : points) {
        mean_low += low;
        mean_high += high;
    }
    const double n = static_cast<double>(points.size());
    mean_low /= n;
    mean_high /= n;

    double ss_low = 0.0;
    double ss_high = 0.0;
    for (const auto& [low, high] : points) {
        ss_low += (low - mean_low) * (low - mean_low);
        ss_high += (high - mean_high) * (high - mean_high);
    }
    const double std_low = std::sqrt(ss_low / (n - 1.0));
    const double std_high = std::sqrt(ss_high / (n - 1.0));
    if (!(std_low > 0.0) || !(std_high > 0.0)) {
        throw fit_error("deviation points are degenerate along one axis");
    }

    DeviationModel model;
    model.mean = {mean_low, mean_high};
    model.std = {std_low, std_high};
    return model;
}

TransferFunctionBank variation_weights(const TransferFunctionBank& bank, const DeviationModel& model) {
    if (bank.functions.empty()) throw parameter_error("bank is empty");
    if (!(model.std[0] > 0.0) || !(model.std[1] > 0.0)) {
        throw parameter_error("deviation std must be positive");
    }
    if (!(model.scale > 0.0)) throw parameter_error("deviation scale must be positive");

    TransferFunctionBank weighted = bank;
    const double sl = model.scale * model.std[0];
    const double sh = model.scale * model.std[1];
    double total = 0.0;
    for (std::size_t i = 0; i < bank.functions.size(); ++i) {
        const auto [low, high] = deviation_features(bank.functions[i]);
        const double zl = (low - model.mean[0]) / sl;
        const double zh = (high - model.mean[1]) / sh;
        const double w = std::exp(-0.5 * (zl * zl + zh * zh));
        weighted.weights[i] = w;
        total += w;
    }
    if (!(total > 0.0)) throw fit_error("all variation weights underflowed to zero");
    for (double& w : weighted.weights) w /= total;
    return weighted;
}

std::vector<std::pair<double, double>> load_deviation_points(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open deviations file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw validation_error("deviations file is empty: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "low_dev,high_dev") {
        throw validation_error("deviations file must start with header low_dev,high_dev");
    }

    std::vector<std::pair<double, double>> points;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        double values[2];
        for (int i = 0; i < 2; ++i) {
            if (!std::getline(row, field, ',')) {
                throw validation_error("deviations line " + std::to_string(line_no) + ": expected 2 fields");
            }
            try {
                std::size_t used = 0;
                values[i] = std::stod(field, &used);
                if (used != field.size()) throw std::invalid_argument(field);
            } catch (const std::exception&) {
                throw validation_error("deviations line " + std::to_string(line_no) + ": bad number \"" + field +
                                       "\"");
            }
        }
        if (std::getline(row, field, ',')) {
            throw validation_error("deviations line " + std::to_string(line_no) + ": expected 2 fields");
        }
        points.emplace_back(values[0], values[1]);
    }
    if (points.size() < 2) throw validation_error("deviations file needs at least 2 rows");
    return points;
}

}  // namespace hacover
