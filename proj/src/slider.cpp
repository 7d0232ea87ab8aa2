#include "hacover/slider.hpp"

#include "hacover/error.hpp"

namespace hacover {

void SliderSpec::validate() const {
    if (steps_x < 2 || steps_x > 200 || steps_y < 2 || steps_y > 200) {
        throw parameter_error("slider steps must be in [2, 200] per axis");
    }
}

PresetSet slider_presets(const PcaModel& model, const SliderSpec& spec, const Dataset& dataset,
                         const TransferFunctionBank& bank) {
    spec.validate();
    const auto source = grid_source_points(model, dataset, bank, spec.bbox_source);
    const CandidateGrid grid = build_grid(model, source, spec.steps_x, spec.steps_y);
    PresetSet presets;
    presets.presets = grid.lifted;
    return presets;
}

Configuration position_to_config(const PcaModel& model, const CandidateGrid& grid, int ix, int iy) {
    if (ix < 0 || ix >= grid.steps_x || iy < 0 || iy >= grid.steps_y) {
        throw parameter_error("slider position out of range");
    }
    return inverse_transform(model, grid.points[grid.index_of(ix, iy)]);
}

CoverageReport slider_coverage(const Dataset& dataset, const TransferFunctionBank& bank,
                               const CoverageParams& params, const PcaModel& model,
                               const SliderSpec& spec) {
    const PresetSet presets = slider_presets(model, spec, dataset, bank);
    return population_coverage(dataset, presets, bank, params);
}

}  // namespace hacover
