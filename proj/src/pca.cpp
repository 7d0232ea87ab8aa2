#include "hacover/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "hacover/error.hpp"

namespace hacover {

PcaModel fit_pca(std::span<const Configuration> configs, std::size_t k) {
    if (k < 1 || k > kNumFrequencies) throw parameter_error("component count must be in [1, 6]");
    if (configs.size() < k + 1) {
        throw fit_error("need at least " + std::to_string(k + 1) + " configurations for " +
                        std::to_string(k) + " components");
    }

    const auto n = static_cast<Eigen::Index>(configs.size());
    Eigen::MatrixXd data(n, kNumFrequencies);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (std::size_t i = 0; i < kNumFrequencies; ++i) {
            data(r, static_cast<Eigen::Index>(i)) = configs[static_cast<std::size_t>(r)].gains[i];
        }
    }

    const Eigen::RowVectorXd mean = data.colwise().mean();
    data.rowwise() -= mean;
    const Eigen::MatrixXd cov = data.transpose() * data / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw fit_error("eigendecomposition failed");
    // Eigen returns ascending eigenvalues; flip to descending.
    Eigen::VectorXd eigenvalues = solver.eigenvalues().reverse();
    Eigen::MatrixXd eigenvectors = solver.eigenvectors().rowwise().reverse();

    const double total_variance = std::max(0.0, eigenvalues.sum());
    if (!(total_variance > 0.0)) throw fit_error("configurations have zero variance");

    PcaModel model;
    for (std::size_t i = 0; i < kNumFrequencies; ++i) {
        model.mean.gains[i] = mean(static_cast<Eigen::Index>(i));
    }
    model.components.resize(k);
    model.explained_variance_ratio.resize(k);
    for (std::size_t c = 0; c < k; ++c) {
        Eigen::VectorXd component = eigenvectors.col(static_cast<Eigen::Index>(c));
        Eigen::Index largest = 0;
        component.cwiseAbs().maxCoeff(&largest);
        if (component(largest) < 0.0) component = -component;
        for (std::size_t i = 0; i < kNumFrequencies; ++i) {
            model.components[c][i] = component(static_cast<Eigen::Index>(i));
        }
        model.explained_variance_ratio[c] =
            std::max(0.0, eigenvalues(static_cast<Eigen::Index>(c))) / total_variance;
    }
    return model;
}

Point2 transform(const PcaModel& model, const Configuration& config) {
    if (model.component_count() != 2) throw parameter_error("transform expects a 2-component model");
    Point2 p;
    for (std::size_t i = 0; i < kNumFrequencies; ++i) {
        const double centered = config.gains[i] - model.mean.gains[i];
        p.x += centered * model.components[0][i];
        p.y += centered * model.components[1][i];
    }
    return p;
}

Configuration inverse_transform(const PcaModel& model, const Point2& point) {
    if (model.component_count() != 2) throw parameter_error("inverse_transform expects a 2-component model");
    Configuration config = model.mean;
    for (std::size_t i = 0; i < kNumFrequencies; ++i) {
        config.gains[i] += point.x * model.components[0][i] + point.y * model.components[1][i];
    }
    return config;
}

BboxSource bbox_source_from_string(const std::string& s) {
    if (s == "prescriptions") return BboxSource::prescriptions;
    if (s == "variations") return BboxSource::variations;
    throw parameter_error("unknown bounding-box source: \"" + s + "\"");
}

std::string to_string(BboxSource s) {
    switch (s) {
        case BboxSource::prescriptions: return "prescriptions";
        case BboxSource::variations: return "variations";
    }
    throw parameter_error("invalid bounding-box source value");
}

std::vector<std::size_t> CandidateGrid::neighbors(std::size_t index) const {
    if (index >= points.size()) throw parameter_error("grid index out of range");
    const int ix = static_cast<int>(index) % steps_x;
    const int iy = static_cast<int>(index) / steps_x;
    std::vector<std::size_t> out;
    out.reserve(8);
    for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const int nx = ix + dx;
            const int ny = iy + dy;
            if (nx < 0 || nx >= steps_x || ny < 0 || ny >= steps_y) continue;
            out.push_back(index_of(nx, ny));
        }
    }
    return out;
}

CandidateGrid build_grid(const PcaModel& model, std::span<const Point2> source_points, int steps_x,
                         int steps_y) {
    if (model.component_count() != 2) throw parameter_error("grid requires a 2-component model");
    if (steps_x < 2 || steps_y < 2) throw parameter_error("grid needs at least 2 vertices per axis");
    if (source_points.empty()) throw parameter_error("no source points for the grid bounding box");

    CandidateGrid grid;
    grid.box_min = {source_points[0].x, source_points[0].y};
    grid.box_max = grid.box_min;
    for (const Point2& p : source_points) {
        grid.box_min.x = std::min(grid.box_min.x, p.x);
        grid.box_min.y = std::min(grid.box_min.y, p.y);
        grid.box_max.x = std::max(grid.box_max.x, p.x);
        grid.box_max.y = std::max(grid.box_max.y, p.y);
    }
    if (!(grid.box_max.x > grid.box_min.x) || !(grid.box_max.y > grid.box_min.y)) {
        throw fit_error("degenerate bounding box");
    }

    grid.steps_x = steps_x;
    grid.steps_y = steps_y;
    const double dx = (grid.box_max.x - grid.box_min.x) / static_cast<double>(steps_x - 1);
    const double dy = (grid.box_max.y - grid.box_min.y) / static_cast<double>(steps_y - 1);
    grid.points.reserve(static_cast<std::size_t>(steps_x) * static_cast<std::size_t>(steps_y));
    grid.lifted.reserve(grid.points.capacity());
    for (int iy = 0; iy < steps_y; ++iy) {
        for (int ix = 0; ix < steps_x; ++ix) {
            Point2 p{grid.box_min.x + dx * static_cast<double>(ix),
                     grid.box_min.y + dy * static_cast<double>(iy)};
            grid.points.push_back(p);
            grid.lifted.push_back(inverse_transform(model, p));
        }
    }
    return grid;
}

std::vector<Point2> grid_source_points(const PcaModel& model, const Dataset& dataset,
                                       const TransferFunctionBank& bank, BboxSource source) {
    std::vector<Point2> points;
    if (source == BboxSource::prescriptions) {
        const auto rows = dataset.prescription_rows();
        points.reserve(rows.size());
        for (const PrescriptionRow& row : rows) points.push_back(transform(model, row.config));
    } else {
        const auto variations = collect_variations(dataset, bank);
        points.reserve(variations.size());
        for (const auto& [config, mass] : variations) points.push_back(transform(model, config));
    }
    return points;
}

std::pair<int, int> steps_from_step_size(const Point2& box_min, const Point2& box_max,
                                         double step_size) {
    if (!(step_size > 0.0)) throw parameter_error("step size must be positive");
    const double span_x = box_max.x - box_min.x;
    const double span_y = box_max.y - box_min.y;
    if (!(span_x > 0.0) || !(span_y > 0.0)) throw fit_error("degenerate bounding box");
    const int sx = std::max(2, static_cast<int>(std::ceil(span_x / step_size)) + 1);
    const int sy = std::max(2, static_cast<int>(std::ceil(span_y / step_size)) + 1);
    return {sx, sy};
}

}  // namespace hacover
