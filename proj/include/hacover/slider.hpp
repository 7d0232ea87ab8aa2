#pragma once

#include "hacover/coverage.hpp"
#include "hacover/pca.hpp"

namespace hacover {

struct SliderSpec {
    int steps_x = 10;  // vertex count per axis, in [2, 200]
    int steps_y = 10;
    BboxSource bbox_source = BboxSource::variations;

    void validate() const;
};

// Presets reachable by a two-slider interface: the closed steps_x x steps_y
// lattice over the configuration bounding box, lifted to 6D.
PresetSet slider_presets(const PcaModel& model, const SliderSpec& spec, const Dataset& dataset,
                         const TransferFunctionBank& bank);

// Slider position (ix, iy) to its 6D configuration; (0, 0) is the box origin
// corner.
Configuration position_to_config(const PcaModel& model, const CandidateGrid& grid, int ix, int iy);

CoverageReport slider_coverage(const Dataset& dataset, const TransferFunctionBank& bank,
                               const CoverageParams& params, const PcaModel& model,
                               const SliderSpec& spec);

}  // namespace hacover
