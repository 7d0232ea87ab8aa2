#include "hacover/optimize.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "hacover/error.hpp"
#include "hacover/parallel.hpp"

namespace hacover {

// Working state for greedy selection. Cached row masses always equal a fresh
// ascending-order scan of the current mask, so marginal scores are the exact
// population coverage the final evaluation reports, not an approximation.
class GreedyState {
  public:
    GreedyState(const CoverageMatrix& matrix, double gamma)
        : m_(matrix),
          gamma_(gamma),
          mask_(matrix.words_, 0),
          row_mass_(matrix.row_count_, 0.0),
          user_covered_(matrix.user_weights_.size(), false) {}

    // Population coverage if `candidate` were added to the current selection.
    double pc_with(std::size_t candidate) const {
        const std::uint64_t* cand = m_.candidate_bits(candidate);
        double pc = 0.0;
        for (std::size_t u = 0; u < m_.user_weights_.size(); ++u) {
            bool covered = user_covered_[u];  // adding presets never uncovers
            if (!covered) {
                covered = true;
                for (std::uint32_t r = m_.user_row_begin_[u]; r < m_.user_row_begin_[u + 1]; ++r) {
                    if (row_mass_with(cand, r) < gamma_) {
                        covered = false;
                        break;
                    }
                }
            }
            if (covered) pc += m_.user_weights_[u];
        }
        return clip_unit_mass(pc);
    }

    void commit(std::size_t candidate) {
        const std::uint64_t* cand = m_.candidate_bits(candidate);
        for (std::size_t w = 0; w < m_.words_; ++w) mask_[w] |= cand[w];
        for (std::size_t r = 0; r < m_.row_count_; ++r) row_mass_[r] = m_.row_mass(mask_.data(), r);
        pc_ = 0.0;
        for (std::size_t u = 0; u < m_.user_weights_.size(); ++u) {
            bool covered = true;
            for (std::uint32_t r = m_.user_row_begin_[u]; r < m_.user_row_begin_[u + 1]; ++r) {
                if (row_mass_[r] < gamma_) {
                    covered = false;
                    break;
                }
            }
            user_covered_[u] = covered;
            if (covered) pc_ += m_.user_weights_[u];
        }
        pc_ = clip_unit_mass(pc_);
    }

    double pc() const { return pc_; }

  private:
    double row_mass_with(const std::uint64_t* cand, std::size_t r) const {
        const std::uint64_t* mrow = mask_.data() + r * m_.row_words_;
        const std::uint64_t* crow = cand + r * m_.row_words_;
        bool changed = false;
        for (std::size_t w = 0; w < m_.row_words_; ++w) {
            if (crow[w] & ~mrow[w]) {
                changed = true;
                break;
            }
        }
        if (!changed) return row_mass_[r];
        double mass = 0.0;
        for (std::size_t w = 0; w < m_.row_words_; ++w) {
            std::uint64_t bits = mrow[w] | crow[w];
            while (bits != 0) {
                const int b = std::countr_zero(bits);
                mass += m_.tf_weights_[w * 64 + static_cast<std::size_t>(b)];
                bits &= bits - 1;
            }
        }
        return mass;
    }

    const CoverageMatrix& m_;
    double gamma_;
    std::vector<std::uint64_t> mask_;
    std::vector<double> row_mass_;
    std::vector<bool> user_covered_;
    double pc_ = 0.0;
};

namespace {

void check_selection_args(const CandidateGrid& grid, const CoverageParams& params, std::size_t n) {
    params.validate();
    if (grid.lifted.empty()) throw parameter_error("candidate grid is empty");
    if (n < 1) throw parameter_error("preset count must be at least 1");
    if (n > grid.size()) {
        throw parameter_error("cannot pick " + std::to_string(n) + " presets from " +
                              std::to_string(grid.size()) + " candidates");
    }
}

PresetSet lift_selection(const CandidateGrid& grid, const std::vector<std::size_t>& chosen) {
    PresetSet presets;
    presets.presets.reserve(chosen.size());
    for (std::size_t c : chosen) presets.presets.push_back(grid.lifted[c]);
    return presets;
}

}  // namespace

void GaParams::validate() const {
    if (population_size < 2) throw parameter_error("population_size must be at least 2");
    if (iterations < 1) throw parameter_error("iterations must be at least 1");
    if (elitism < 0 || elitism >= population_size) {
        throw parameter_error("elitism must be in [0, population_size)");
    }
    if (!(crossover_fraction >= 0.0) || !(crossover_fraction <= 1.0)) {
        throw parameter_error("crossover_fraction must be in [0, 1]");
    }
}

SelectionResult greedy_select_matrix(const CoverageMatrix& matrix, const CoverageParams& params,
                                     std::size_t n) {
    params.validate();
    if (n < 1) throw parameter_error("preset count must be at least 1");
    if (n > matrix.candidate_count()) {
        throw parameter_error("cannot pick " + std::to_string(n) + " presets from " +
                              std::to_string(matrix.candidate_count()) + " candidates");
    }
    GreedyState state(matrix, params.gamma);

    SelectionResult result;
    result.method = "greedy";
    std::vector<bool> taken(matrix.candidate_count(), false);
    for (std::size_t step = 0; step < n; ++step) {
        double best_pc = -1.0;
        std::size_t best_c = matrix.candidate_count();
        for (std::size_t c = 0; c < matrix.candidate_count(); ++c) {
            if (taken[c]) continue;
            const double pc = state.pc_with(c);
            if (pc > best_pc) {
                best_pc = pc;
                best_c = c;
            }
        }
        state.commit(best_c);
        taken[best_c] = true;
        result.chosen_indices.push_back(best_c);
        result.trace.push_back(state.pc());
    }

    result.coverage = incremental_pc(matrix, result.chosen_indices, params);
    return result;
}

SelectionResult greedy_select(const CandidateGrid& grid, const Dataset& dataset,
                              const TransferFunctionBank& bank, const CoverageParams& params,
                              std::size_t n) {
    check_selection_args(grid, params, n);
    const CoverageMatrix matrix = precompute_matrix(grid.lifted, dataset, bank, params);
    SelectionResult result = greedy_select_matrix(matrix, params, n);
    result.presets = lift_selection(grid, result.chosen_indices);
    return result;
}

SelectionResult greedy_select_removal_shortcut(const CandidateGrid& grid, const Dataset& dataset,
                                               const TransferFunctionBank& bank,
                                               const CoverageParams& params, std::size_t n) {
    check_selection_args(grid, params, n);
    const CoverageMatrix matrix = precompute_matrix(grid.lifted, dataset, bank, params);
    const std::size_t words = matrix.words_per_candidate();
    const std::size_t row_words = matrix.words_per_row();
    std::vector<std::uint64_t> mask(words, 0);

    SelectionResult result;
    result.method = "greedy_removal";
    std::vector<bool> taken(grid.size(), false);
    for (std::size_t step = 0; step < n; ++step) {
        double best_gain = -1.0;
        std::size_t best_c = grid.size();
        for (std::size_t c = 0; c < grid.size(); ++c) {
            if (taken[c]) continue;
            // Mass of variations this candidate covers that nothing selected
            // covers yet; the gamma threshold is deliberately ignored here.
            double gain = 0.0;
            for (std::size_t w = 0; w < words; ++w) {
                std::uint64_t fresh = matrix.covers_word(c, w) & ~mask[w];
                while (fresh != 0) {
                    const int b = std::countr_zero(fresh);
                    const std::size_t row = w / row_words;
                    const std::size_t tf = (w % row_words) * 64 + static_cast<std::size_t>(b);
                    gain += matrix.variation_mass(row, tf);
                    fresh &= fresh - 1;
                }
            }
            if (gain > best_gain) {
                best_gain = gain;
                best_c = c;
            }
        }
        for (std::size_t w = 0; w < words; ++w) mask[w] |= matrix.covers_word(best_c, w);
        taken[best_c] = true;
        result.chosen_indices.push_back(best_c);
        result.trace.push_back(incremental_pc(matrix, result.chosen_indices, params));
    }

    result.presets = lift_selection(grid, result.chosen_indices);
    result.coverage = incremental_pc(matrix, result.chosen_indices, params);
    return result;
}

namespace {

using Bits = std::vector<char>;

std::vector<std::size_t> bits_to_indices(const Bits& bits) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) out.push_back(i);
    }
    return out;
}

Bits random_subset(std::size_t g, std::size_t n, std::mt19937_64& rng) {
    std::vector<std::size_t> idx(g);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, g - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    Bits bits(g, 0);
    for (std::size_t i = 0; i < n; ++i) bits[idx[i]] = 1;
    return bits;
}

// Forces exactly n ones: surplus ones are dropped at random, missing ones are
// added at random zero positions.
void repair(Bits& bits, std::size_t n, std::mt19937_64& rng) {
    std::vector<std::size_t> ones;
    std::vector<std::size_t> zeros;
    for (std::size_t i = 0; i < bits.size(); ++i) (bits[i] ? ones : zeros).push_back(i);
    while (ones.size() > n) {
        std::uniform_int_distribution<std::size_t> pick(0, ones.size() - 1);
        const std::size_t k = pick(rng);
        bits[ones[k]] = 0;
        ones[k] = ones.back();
        ones.pop_back();
    }
    while (ones.size() < n) {
        std::uniform_int_distribution<std::size_t> pick(0, zeros.size() - 1);
        const std::size_t k = pick(rng);
        bits[zeros[k]] = 1;
        ones.push_back(zeros[k]);
        zeros[k] = zeros.back();
        zeros.pop_back();
    }
}

Bits crossover(const Bits& a, const Bits& b, std::size_t n, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick_cut(1, a.size() - 1);
    const std::size_t cut = pick_cut(rng);
    Bits child(a.size());
    std::copy(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(cut), child.begin());
    std::copy(b.begin() + static_cast<std::ptrdiff_t>(cut), b.end(),
              child.begin() + static_cast<std::ptrdiff_t>(cut));
    repair(child, n, rng);
    return child;
}

Bits mutate(const Bits& parent, std::mt19937_64& rng) {
    Bits child = parent;
    std::vector<std::size_t> ones;
    std::vector<std::size_t> zeros;
    for (std::size_t i = 0; i < child.size(); ++i) (child[i] ? ones : zeros).push_back(i);
    if (ones.empty() || zeros.empty()) return child;
    std::uniform_int_distribution<std::size_t> pick_one(0, ones.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_zero(0, zeros.size() - 1);
    child[ones[pick_one(rng)]] = 0;
    child[zeros[pick_zero(rng)]] = 1;
    return child;
}

}  // namespace

SelectionResult ga_select(const CandidateGrid& grid, const Dataset& dataset,
                          const TransferFunctionBank& bank, const CoverageParams& params,
                          std::size_t n, const GaParams& ga) {
    check_selection_args(grid, params, n);
    ga.validate();
    const CoverageMatrix matrix = precompute_matrix(grid.lifted, dataset, bank, params);
    std::mt19937_64 rng(ga.seed);

    const auto fitness_of = [&](const Bits& bits) {
        const auto chosen = bits_to_indices(bits);
        return matrix.evaluate(chosen, params.gamma);
    };

    const auto pop_size = static_cast<std::size_t>(ga.population_size);
    std::vector<Bits> pop;
    pop.reserve(pop_size);
    for (std::size_t i = 0; i < pop_size; ++i) pop.push_back(random_subset(grid.size(), n, rng));

    Bits best_ever;
    double best_ever_fit = -1.0;
    std::vector<double> fitness(pop_size);
    std::vector<std::size_t> order(pop_size);
    SelectionResult result;
    result.method = "ga";
    result.seed = ga.seed;

    for (int iteration = 0; iteration < ga.iterations; ++iteration) {
        for (std::size_t i = 0; i < pop_size; ++i) fitness[i] = fitness_of(pop[i]);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fitness[a] > fitness[b]; });

        // One neighbour-swap pass on the best individual: move one selected
        // candidate to an adjacent free grid vertex if that strictly improves
        // fitness; the best such swap wins.
        if (ga.local_improvement && ga.elitism > 0) {
            Bits& best = pop[order[0]];
            double best_fit = fitness[order[0]];
            std::size_t swap_from = grid.size();
            std::size_t swap_to = grid.size();
            double swap_fit = best_fit;
            for (std::size_t s = 0; s < grid.size(); ++s) {
                if (!best[s]) continue;
                for (std::size_t nb : grid.neighbors(s)) {
                    if (best[nb]) continue;
                    best[s] = 0;
                    best[nb] = 1;
                    const double fit = fitness_of(best);
                    best[s] = 1;
                    best[nb] = 0;
                    if (fit > swap_fit) {
                        swap_fit = fit;
                        swap_from = s;
                        swap_to = nb;
                    }
                }
            }
            if (swap_from < grid.size()) {
                best[swap_from] = 0;
                best[swap_to] = 1;
                fitness[order[0]] = swap_fit;
            }
        }

        if (fitness[order[0]] > best_ever_fit) {
            best_ever_fit = fitness[order[0]];
            best_ever = pop[order[0]];
        }
        result.trace.push_back(best_ever_fit);
        if (iteration + 1 == ga.iterations) break;

        std::vector<Bits> next;
        next.reserve(pop_size);
        for (int e = 0; e < ga.elitism; ++e) next.push_back(pop[order[static_cast<std::size_t>(e)]]);

        const std::size_t remaining = pop_size - static_cast<std::size_t>(ga.elitism);
        const auto n_cross =
            static_cast<std::size_t>(std::llround(ga.crossover_fraction * static_cast<double>(remaining)));
        const std::size_t top_half = std::max<std::size_t>(1, pop_size / 2);
        std::uniform_int_distribution<std::size_t> pick_parent(0, top_half - 1);
        std::uniform_int_distribution<std::size_t> pick_any(0, pop_size - 1);
        for (std::size_t i = 0; i < n_cross; ++i) {
            const Bits& a = pop[order[pick_parent(rng)]];
            const Bits& b = pop[order[pick_parent(rng)]];
            next.push_back(crossover(a, b, n, rng));
        }
        for (std::size_t i = n_cross; i < remaining; ++i) {
            next.push_back(mutate(pop[pick_any(rng)], rng));
        }
        pop = std::move(next);
    }

    result.chosen_indices = bits_to_indices(best_ever);
    result.presets = lift_selection(grid, result.chosen_indices);
    result.coverage = incremental_pc(matrix, result.chosen_indices, params);
    return result;
}

namespace {

double sq_distance(const double* a, const Configuration& b) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < kNumFrequencies; ++i) {
        const double d = a[i] - b.gains[i];
        d2 += d * d;
    }
    return d2;
}

}  // namespace

SelectionResult kmeans_presets(const std::vector<std::pair<Configuration, double>>& variations,
                               const Dataset& dataset, const TransferFunctionBank& bank,
                               const CoverageParams& params, std::size_t n, std::uint64_t seed) {
    params.validate();
    if (variations.empty()) throw parameter_error("no variations to cluster");
    if (n < 1) throw parameter_error("preset count must be at least 1");
    if (n > variations.size()) {
        throw parameter_error("cannot pick " + std::to_string(n) + " clusters from " +
                              std::to_string(variations.size()) + " variations");
    }

    const std::size_t count = variations.size();
    std::vector<double> mass(count);
    for (std::size_t i = 0; i < count; ++i) mass[i] = variations[i].second;
    std::mt19937_64 rng(seed);

    // Mass-weighted k-means++ seeding.
    std::vector<Configuration> centers;
    centers.reserve(n);
    {
        std::discrete_distribution<std::size_t> first(mass.begin(), mass.end());
        centers.push_back(variations[first(rng)].first);
    }
    std::vector<double> d2(count);
    for (std::size_t i = 0; i < count; ++i) d2[i] = sq_distance(variations[i].first.gains.data(), centers[0]);
    while (centers.size() < n) {
        std::vector<double> score(count);
        double total = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            score[i] = mass[i] * d2[i];
            total += score[i];
        }
        std::size_t next = 0;
        if (total > 0.0) {
            std::discrete_distribution<std::size_t> pick(score.begin(), score.end());
            next = pick(rng);
        }
        centers.push_back(variations[next].first);
        for (std::size_t i = 0; i < count; ++i) {
            d2[i] = std::min(d2[i], sq_distance(variations[i].first.gains.data(), centers.back()));
        }
    }

    // Lloyd iterations; assignment ties go to the lowest centroid index.
    std::vector<std::size_t> assign(count, 0);
    std::vector<std::size_t> prev_assign;
    for (int iteration = 0; iteration < 100; ++iteration) {
        parallel_for(count, [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                double best_d2 = sq_distance(variations[i].first.gains.data(), centers[0]);
                std::size_t best_c = 0;
                for (std::size_t c = 1; c < centers.size(); ++c) {
                    const double d = sq_distance(variations[i].first.gains.data(), centers[c]);
                    if (d < best_d2) {
                        best_d2 = d;
                        best_c = c;
                    }
                }
                assign[i] = best_c;
            }
        });
        if (assign == prev_assign) break;
        prev_assign = assign;

        std::vector<std::array<double, kNumFrequencies>> sums(n, std::array<double, kNumFrequencies>{});
        std::vector<double> cluster_mass(n, 0.0);
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t c = assign[i];
            cluster_mass[c] += mass[i];
            for (std::size_t f = 0; f < kNumFrequencies; ++f) {
                sums[c][f] += mass[i] * variations[i].first.gains[f];
            }
        }
        for (std::size_t c = 0; c < n; ++c) {
            if (cluster_mass[c] > 0.0) {
                for (std::size_t f = 0; f < kNumFrequencies; ++f) centers[c].gains[f] = sums[c][f] / cluster_mass[c];
            }
        }
        // Re-seed each empty cluster at the point farthest (by mass-weighted
        // squared distance) from its updated centroid.
        std::vector<bool> claimed(count, false);
        for (std::size_t c = 0; c < n; ++c) {
            if (cluster_mass[c] > 0.0) continue;
            double best_score = -1.0;
            std::size_t best_i = 0;
            for (std::size_t i = 0; i < count; ++i) {
                if (claimed[i]) continue;
                const double score = mass[i] * sq_distance(variations[i].first.gains.data(), centers[assign[i]]);
                if (score > best_score) {
                    best_score = score;
                    best_i = i;
                }
            }
            centers[c] = variations[best_i].first;
            claimed[best_i] = true;
        }
    }

    SelectionResult result;
    result.method = "kmeans";
    result.seed = seed;
    result.presets.presets = std::move(centers);
    result.coverage = population_coverage(dataset, result.presets, bank, params).population_coverage;
    return result;
}

namespace {

// Exact C(g, n), or UINT64_MAX if it does not fit in 64 bits.
std::uint64_t exact_combinations(std::size_t g, std::size_t n) {
    if (n > g) return 0;
    n = std::min(n, g - n);
    unsigned __int128 c = 1;
    for (std::size_t i = 1; i <= n; ++i) {
        c = c * (g - n + i) / i;
        if (c > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(c);
}

}  // namespace

std::uint64_t combination_count(std::size_t g, std::size_t n, std::uint64_t limit) {
    const std::uint64_t exact = exact_combinations(g, n);
    return exact > limit ? limit + 1 : exact;
}

SelectionResult brute_force_select(const CandidateGrid& grid, const Dataset& dataset,
                                   const TransferFunctionBank& bank, const CoverageParams& params,
                                   std::size_t n, std::uint64_t combination_limit) {
    check_selection_args(grid, params, n);
    const std::uint64_t exact = exact_combinations(grid.size(), n);
    if (exact > combination_limit) {
        const std::string count = exact == std::numeric_limits<std::uint64_t>::max()
                                      ? "more than " + std::to_string(combination_limit)
                                      : std::to_string(exact);
        throw parameter_error("refusing brute force: " + count + " combinations exceed the limit of " +
                              std::to_string(combination_limit));
    }

    const CoverageMatrix matrix = precompute_matrix(grid.lifted, dataset, bank, params);
    std::vector<std::size_t> combo(n);
    std::iota(combo.begin(), combo.end(), 0);

    // Lexicographic enumeration; strict improvement keeps the first optimum,
    // which is the lexicographically smallest index tuple.
    std::vector<std::size_t> best_combo = combo;
    double best_pc = -1.0;
    const std::size_t g = grid.size();
    while (true) {
        const double pc = matrix.evaluate(combo, params.gamma);
        if (pc > best_pc) {
            best_pc = pc;
            best_combo = combo;
        }
        std::size_t i = n;
        while (i > 0 && combo[i - 1] == g - n + i - 1) --i;
        if (i == 0) break;
        ++combo[i - 1];
        for (std::size_t j = i; j < n; ++j) combo[j] = combo[j - 1] + 1;
    }

    SelectionResult result;
    result.method = "brute";
    result.chosen_indices = best_combo;
    result.presets = lift_selection(grid, result.chosen_indices);
    result.coverage = best_pc;
    return result;
}

}  // namespace hacover
