#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "hacover/coverage.hpp"
#include "hacover/dataset.hpp"
#include "hacover/transfer.hpp"
#include "hacover/types.hpp"

namespace hacover {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

// Centered linear reduction with orthonormal component rows, ordered by
// decreasing variance. Sign convention: the largest-magnitude coefficient of
// each component is positive.
struct PcaModel {
    Configuration mean;
    std::vector<std::array<double, kNumFrequencies>> components;  // k rows
    std::vector<double> explained_variance_ratio;                 // k entries

    std::size_t component_count() const { return components.size(); }
};

PcaModel fit_pca(std::span<const Configuration> configs, std::size_t k = 2);

Point2 transform(const PcaModel& model, const Configuration& config);
Configuration inverse_transform(const PcaModel& model, const Point2& point);

enum class BboxSource { prescriptions, variations };
BboxSource bbox_source_from_string(const std::string& s);
std::string to_string(BboxSource s);

// Candidate lattice over the bounding box of the source points. The grid is
// closed: both box edges are vertex rows. Vertex (ix, iy) has index
// iy * steps_x + ix.
struct CandidateGrid {
    Point2 box_min;
    Point2 box_max;
    int steps_x = 0;
    int steps_y = 0;
    std::vector<Point2> points;
    std::vector<Configuration> lifted;

    std::size_t size() const { return points.size(); }
    std::size_t index_of(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * static_cast<std::size_t>(steps_x) +
               static_cast<std::size_t>(ix);
    }
    // Grid neighbours (8-connected) of a vertex index.
    std::vector<std::size_t> neighbors(std::size_t index) const;
};

CandidateGrid build_grid(const PcaModel& model, std::span<const Point2> source_points, int steps_x,
                         int steps_y);

// Source points for the grid bounding box: transformed prescriptions, or all
// prescription+transfer variations.
std::vector<Point2> grid_source_points(const PcaModel& model, const Dataset& dataset,
                                       const TransferFunctionBank& bank, BboxSource source);

// Vertex counts so that grid spacing does not exceed step_size on an axis.
std::pair<int, int> steps_from_step_size(const Point2& box_min, const Point2& box_max,
                                         double step_size);

}  // namespace hacover
