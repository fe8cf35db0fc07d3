#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "treehash/schedule.hpp"
#include "treehash/topology.hpp"

namespace treehash {

enum class Arrival { Stored, Streamed };

/// Cost units: `a` per payload item (block or chaining value), `b` per node.
/// Streamed arrival makes block k (0-based) available at k * block_interval.
struct CostModel {
  std::uint64_t a = 1;
  std::uint64_t b = 0;
  Arrival arrival = Arrival::Stored;
  std::uint64_t block_interval = 1;

  void validate() const;
};

inline constexpr std::uint64_t kUnlimitedProcessors = std::numeric_limits<std::uint64_t>::max();

/// Completion time of the root with one processor per node. Items of a node
/// are absorbed in order, each as soon as it is ready and the previous one is
/// done; the per-node overhead b is paid after the last item.
std::uint64_t ideal_time(const Topology& topology, const CostModel& cost = {});

/// Completion time of every node, completion_times()[i-1][j-1].
std::vector<std::vector<std::uint64_t>> completion_times(const Topology& topology, const CostModel& cost = {});

/// Greedy list scheduling of absorb steps on p processors, preferring the
/// highest level, then the lowest index.
std::uint64_t simulate_makespan(const Topology& topology, const CostModel& cost, std::uint64_t processors);

/// Nodes that embed message bits, i.e. the level-1 nodes.
std::uint64_t count_processors(const Topology& topology);

struct Metrics {
  std::uint64_t n_blocks = 0;
  std::uint64_t height = 0;
  std::uint64_t ideal_time = 0;
  std::uint64_t processors = 0;
  std::uint64_t nodes = 0;
  /// Absorbed 512-bit items: message blocks plus chaining values.
  std::uint64_t work_blocks = 0;
  std::uint64_t work_permutation_calls = 0;
  std::uint64_t sum_level_max_arities = 0;
  std::optional<std::uint64_t> max_live_states;
};

Metrics compute_metrics(const Topology& topology, const CostModel& cost = {});

/// Peak live hash states of a dry sequential run over n_blocks full blocks.
std::uint64_t measure_live_states(const ModeParams& params, std::uint64_t n_blocks);

/// Processor-reduction helper: builds the reduced topology with T(n) taken as
/// the ideal time of the original tree under `cost`.
Topology reduced_topology(const ModeParams& params, std::uint64_t n_blocks, const CostModel& cost = {});

struct GrowthRow {
  Metrics metrics;
  std::vector<std::pair<std::string, double>> ratios;
};

struct GrowthOptions {
  CostModel cost;
  bool with_states = true;
};

std::vector<GrowthRow> growth_report(const ModeParams& params, const std::vector<std::uint64_t>& n_list,
                                     const GrowthOptions& options = {});
std::string growth_report_text(const ModeParams& params, const std::vector<GrowthRow>& rows);
/// One JSON object per row, newline separated.
std::string growth_report_json(const ModeParams& params, const std::vector<GrowthRow>& rows);

}  // namespace treehash
