#pragma once

#include <string>

#include "hacover/coverage.hpp"
#include "hacover/dataset.hpp"
#include "hacover/optimize.hpp"
#include "hacover/pca.hpp"

namespace hacover {

// Shortest round-trip decimal representation.
std::string format_double(double value);

// dataset.csv: user_id,weight,loss_type,fit_type,g500,...,g6000,age,sex with
// one row per (user, fit_type). Weights are normalized on load; a raw sum off
// by more than 1e-6 is reported through the optional warning sink.
Dataset load_dataset(const std::string& path, std::string* warning = nullptr);
void save_dataset(const Dataset& dataset, const std::string& path);

PresetSet load_presets(const std::string& path);
void save_presets(const PresetSet& presets, const std::string& path);

void save_report(const CoverageReport& report, const std::string& path);

void save_selection(const SelectionResult& result, const std::string& path);

PcaModel load_pca(const std::string& path);
void save_pca(const PcaModel& model, const std::string& path);

void save_grid(const CandidateGrid& grid, const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace hacover
