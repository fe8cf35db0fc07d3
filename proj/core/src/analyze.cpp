#include "treehash/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <queue>
#include <sstream>

#include <json.hpp>

#include "treehash/error.hpp"
#include "treehash/exec.hpp"

namespace treehash {

namespace {

// Ready times of the block-sized items of leaf j, in absorb order.
std::vector<std::uint64_t> leaf_ready_times(const Topology& topo, std::uint64_t j, const CostModel& cost) {
  std::vector<std::uint64_t> out;
  const std::uint64_t items = topo.arity(1, j);
  if (cost.arrival == Arrival::Stored) {
    out.assign(static_cast<std::size_t>(items), 0);
    return out;
  }
  const std::vector<Segment> segs = topo.leaf_segments(j);
  std::uint64_t acc = 0;
  for (const Segment& seg : segs) {
    std::uint64_t pos = seg.offset;
    std::uint64_t left = seg.length;
    while (left > 0) {
      std::uint64_t take = std::min(left, kBlockBytes - acc % kBlockBytes);
      acc += take;
      pos += take;
      left -= take;
      if (acc % kBlockBytes == 0) out.push_back((pos - 1) / kBlockBytes * cost.block_interval);
    }
  }
  // a trailing partial chunk is ready with the last byte of the leaf
  if (acc % kBlockBytes != 0) {
    const Segment& last = segs.back();
    out.push_back((last.offset + last.length - 1) / kBlockBytes * cost.block_interval);
  }
  return out;
}

std::uint64_t flat_offset(const std::vector<std::uint64_t>& level_offsets, std::size_t level, std::uint64_t j) {
  return level_offsets[level - 1] + j - 1;
}

}  // namespace

void CostModel::validate() const {
  if (a < 1) throw ConfigError("cost per item a must be >= 1");
  if (block_interval < 1) throw ConfigError("block interval must be >= 1");
}

std::vector<std::vector<std::uint64_t>> completion_times(const Topology& topo, const CostModel& cost) {
  cost.validate();
  std::vector<std::vector<std::uint64_t>> done(topo.height());
  const bool contiguous = !topo.interleave().has_value();
  std::uint64_t block = 0;
  for (std::uint64_t j = 1; j <= topo.level_size(1); ++j) {
    std::uint64_t t = 0;
    if (contiguous || cost.arrival == Arrival::Stored) {
      const std::uint64_t items = topo.arity(1, j);
      for (std::uint64_t k = 0; k < items; ++k) {
        std::uint64_t ready = cost.arrival == Arrival::Stored ? 0 : (block + k) * cost.block_interval;
        t = std::max(t, ready) + cost.a;
      }
      block += items;
    } else {
      for (std::uint64_t ready : leaf_ready_times(topo, j, cost)) t = std::max(t, ready) + cost.a;
    }
    done[0].push_back(t + cost.b);
  }
  for (std::size_t i = 2; i <= topo.height(); ++i) {
    done[i - 1].reserve(static_cast<std::size_t>(topo.level_size(i)));
    for (std::uint64_t j = 1; j <= topo.level_size(i); ++j) {
      auto [first, last] = topo.children(i, j);
      std::uint64_t t = 0;
      for (std::uint64_t c = first; c <= last; ++c) t = std::max(t, done[i - 2][c - 1]) + cost.a;
      done[i - 1].push_back(t + cost.b);
    }
  }
  return done;
}

std::uint64_t ideal_time(const Topology& topo, const CostModel& cost) { return completion_times(topo, cost).back().front(); }

std::uint64_t simulate_makespan(const Topology& topo, const CostModel& cost, std::uint64_t processors) {
  cost.validate();
  if (processors < 1) throw ConfigError("at least one processor is needed");
  const std::size_t h = topo.height();
  std::vector<std::uint64_t> offsets(h + 1, 0);
  for (std::size_t i = 1; i <= h; ++i) offsets[i] = offsets[i - 1] + topo.level_size(i);
  const std::uint64_t total = offsets[h];

  struct NodeState {
    std::uint32_t level = 0;
    std::uint64_t index = 0;
    std::uint64_t items = 0;
    std::uint64_t next = 0;       // items absorbed so far
    std::uint64_t first_child = 0;
    bool busy = false;
    bool queued = false;
    bool complete = false;
    std::uint64_t done_at = 0;
  };
  std::vector<NodeState> nodes(static_cast<std::size_t>(total));
  std::vector<std::vector<std::uint64_t>> leaf_ready(static_cast<std::size_t>(topo.level_size(1)));
  std::uint64_t block = 0;
  for (std::size_t i = 1; i <= h; ++i) {
    for (std::uint64_t j = 1; j <= topo.level_size(i); ++j) {
      NodeState& n = nodes[flat_offset(offsets, i, j)];
      n.level = static_cast<std::uint32_t>(i);
      n.index = j;
      n.items = topo.arity(i, j);
      if (i >= 2) n.first_child = topo.children(i, j).first;
      if (i == 1 && cost.arrival == Arrival::Streamed) {
        if (topo.interleave()) {
          leaf_ready[j - 1] = leaf_ready_times(topo, j, cost);
        } else {
          for (std::uint64_t k = 0; k < n.items; ++k) leaf_ready[j - 1].push_back((block + k) * cost.block_interval);
        }
        block += n.items;
      }
    }
  }
  std::vector<std::uint64_t> parent_of(static_cast<std::size_t>(total), 0);
  for (std::size_t i = 1; i < h; ++i) {
    for (std::uint64_t j = 1; j <= topo.level_size(i); ++j) {
      parent_of[flat_offset(offsets, i, j)] = flat_offset(offsets, i + 1, topo.parent(i, j));
    }
  }

  struct Event {
    std::uint64_t time;
    std::uint64_t node;
    bool step_done;  // otherwise: an item arrival
  };
  auto later = [](const Event& x, const Event& y) { return x.time > y.time; };
  std::priority_queue<Event, std::vector<Event>, decltype(later)> events(later);
  auto higher_first = [&](std::uint64_t x, std::uint64_t y) {
    const NodeState& a = nodes[x];
    const NodeState& b = nodes[y];
    if (a.level != b.level) return a.level < b.level;
    return a.index > b.index;
  };
  std::priority_queue<std::uint64_t, std::vector<std::uint64_t>, decltype(higher_first)> ready(higher_first);

  std::uint64_t now = 0;
  std::uint64_t completed = 0;
  std::uint64_t root_done = 0;

  // Item `next` of node id available at time `now`?
  auto item_time = [&](std::uint64_t id) -> std::optional<std::uint64_t> {
    NodeState& n = nodes[id];
    if (n.level == 1) {
      if (cost.arrival == Arrival::Stored) return 0;
      return leaf_ready[n.index - 1][n.next];
    }
    const NodeState& child = nodes[flat_offset(offsets, n.level - 1, n.first_child + n.next)];
    if (!child.complete) return std::nullopt;
    return child.done_at;
  };

  std::function<void(std::uint64_t)> complete;
  auto consider = [&](std::uint64_t id) {
    NodeState& n = nodes[id];
    if (n.busy || n.queued || n.complete) return;
    if (n.next == n.items) {
      if (cost.b == 0) {
        complete(id);
      } else {
        n.queued = true;
        ready.push(id);
      }
      return;
    }
    auto t = item_time(id);
    if (!t) return;  // woken by the child's completion
    if (*t <= now) {
      n.queued = true;
      ready.push(id);
    } else {
      events.push({*t, id, false});
    }
  };
  complete = [&](std::uint64_t id) {
    NodeState& n = nodes[id];
    n.complete = true;
    n.done_at = now;
    ++completed;
    if (n.level == h) {
      root_done = now;
      return;
    }
    consider(parent_of[id]);
  };

  for (std::uint64_t id = 0; id < offsets[1]; ++id) consider(id);

  std::uint64_t free = processors;
  while (completed < total) {
    while (free > 0 && !ready.empty()) {
      std::uint64_t id = ready.top();
      ready.pop();
      NodeState& n = nodes[id];
      n.queued = false;
      n.busy = true;
      --free;
      events.push({now + (n.next < n.items ? cost.a : cost.b), id, true});
    }
    if (events.empty()) throw std::logic_error("simulation stalled");
    now = events.top().time;
    while (!events.empty() && events.top().time == now) {
      Event e = events.top();
      events.pop();
      NodeState& n = nodes[e.node];
      if (e.step_done) {
        n.busy = false;
        ++free;
        if (n.next < n.items) {
          ++n.next;
          consider(e.node);
        } else {
          complete(e.node);
        }
      } else {
        consider(e.node);
      }
    }
  }
  return root_done;
}

std::uint64_t count_processors(const Topology& topology) { return topology.level_size(1); }

Metrics compute_metrics(const Topology& topo, const CostModel& cost) {
  Metrics m;
  m.n_blocks = topo.n_blocks();
  m.height = topo.height();
  m.ideal_time = ideal_time(topo, cost);
  m.processors = count_processors(topo);
  m.nodes = topo.node_count();
  for (std::size_t i = 1; i <= topo.height(); ++i) {
    std::uint64_t level_max = 0;
    for (std::uint64_t j = 1; j <= topo.level_size(i); ++j) {
      std::uint64_t a = topo.arity(i, j);
      m.work_blocks += a;
      level_max = std::max(level_max, a);
      m.work_permutation_calls += permutation_calls_for(topo.framed_bits(i, j));
    }
    m.sum_level_max_arities += level_max;
  }
  return m;
}

std::uint64_t measure_live_states(const ModeParams& params, std::uint64_t n_blocks) {
  const std::uint64_t bytes = n_blocks * kBlockBytes;
  SequentialHasher h(params, bytes, true);
  h.update_zeros(bytes);
  return h.finish().max_live_states;
}

Topology reduced_topology(const ModeParams& params, std::uint64_t n_blocks, const CostModel& cost) {
  AritySchedule original(params);
  auto t = [&](std::uint64_t n) { return ideal_time(build_topology(original, n), cost); };
  AritySchedule reduced = reduce_processors(original, n_blocks, t);
  return build_topology(reduced, n_blocks);
}

namespace {

double lg(double x) { return std::log2(x); }

std::vector<std::pair<std::string, double>> ratios_for(const ModeParams& p, const Metrics& m) {
  std::vector<std::pair<std::string, double>> r;
  const double n = static_cast<double>(std::max<std::uint64_t>(m.n_blocks, 2));
  const double T = static_cast<double>(m.ideal_time);
  const double h = static_cast<double>(m.height);
  const double states = m.max_live_states ? static_cast<double>(*m.max_live_states) : std::nan("");
  const double L = lg(n);
  const double LL = lg(std::max(L, 2.0));
  const double LLL = lg(std::max(LL, 2.0));
  switch (p.mode) {
    case Mode::M1:
      r.emplace_back("T/n", T / n);
      break;
    case Mode::M2S:
    case Mode::M2L:
      r.emplace_back("T*q/n", T * static_cast<double>(p.q) / n);
      break;
    case Mode::M3:
    case Mode::WC:
      r.emplace_back("T/log2n", T / L);
      r.emplace_back("states/log2n", states / L);
      break;
    case Mode::M4S:
      r.emplace_back("T/n^eps", T / std::pow(n, p.epsilon.value()));
      r.emplace_back("states", states);
      break;
    case Mode::M4L:
      r.emplace_back("T/n^(1/h)", T / std::pow(n, 1.0 / static_cast<double>(p.h)));
      r.emplace_back("states", states);
      break;
    case Mode::M5S:
    case Mode::M5L:
      r.emplace_back("T/log2n", T / L);
      r.emplace_back("states*log2log2n/log2n", states * LL / L);
      break;
    case Mode::M6S:
    case Mode::M6L:
      r.emplace_back("T/log2n", T / L);
      r.emplace_back("states/log2(n/log2n)", states / lg(n / L));
      break;
    case Mode::B1:
      r.emplace_back("h/sqrt(2log2n)", h / std::sqrt(2 * L));
      r.emplace_back("T/log2n", T / L);
      break;
    case Mode::B2:
      r.emplace_back("h*log2log2n/log2n", h * LL / L);
      r.emplace_back("T/log2n", T / L);
      break;
    case Mode::B3:
      r.emplace_back("h*log2log2log2n/log2n", h * LLL / L);
      r.emplace_back("T/(log2n*log2log2n/log2log2log2n)", T / (L * LL / LLL));
      break;
  }
  return r;
}

}  // namespace

std::vector<GrowthRow> growth_report(const ModeParams& params, const std::vector<std::uint64_t>& n_list,
                                     const GrowthOptions& options) {
  AritySchedule schedule(params);
  std::vector<GrowthRow> rows;
  for (std::uint64_t n : n_list) {
    GrowthRow row;
    row.metrics = compute_metrics(build_topology(schedule, n), options.cost);
    if (options.with_states) row.metrics.max_live_states = measure_live_states(params, n);
    row.ratios = ratios_for(params, row.metrics);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string growth_report_text(const ModeParams& params, const std::vector<GrowthRow>& rows) {
  std::ostringstream os;
  os << "# mode " << mode_name(params.mode) << "\n";
  os << std::setw(10) << "n" << std::setw(8) << "height" << std::setw(10) << "T" << std::setw(10) << "P"
     << std::setw(10) << "nodes" << std::setw(12) << "work" << std::setw(12) << "perms" << std::setw(8) << "states";
  if (!rows.empty()) {
    for (const auto& [name, v] : rows.front().ratios) os << "  " << name;
  }
  os << "\n";
  for (const GrowthRow& row : rows) {
    const Metrics& m = row.metrics;
    os << std::setw(10) << m.n_blocks << std::setw(8) << m.height << std::setw(10) << m.ideal_time << std::setw(10)
       << m.processors << std::setw(10) << m.nodes << std::setw(12) << m.work_blocks << std::setw(12)
       << m.work_permutation_calls << std::setw(8)
       << (m.max_live_states ? std::to_string(*m.max_live_states) : std::string("-"));
    for (const auto& [name, v] : row.ratios) {
      os << "  " << std::setw(static_cast<int>(name.size())) << std::fixed << std::setprecision(3) << v;
    }
    os << "\n";
  }
  return os.str();
}

std::string growth_report_json(const ModeParams& params, const std::vector<GrowthRow>& rows) {
  std::ostringstream os;
  for (const GrowthRow& row : rows) {
    const Metrics& m = row.metrics;
    nlohmann::json j;
    j["mode"] = std::string(mode_name(params.mode));
    j["n"] = m.n_blocks;
    j["height"] = m.height;
    j["ideal_time"] = m.ideal_time;
    j["processors"] = m.processors;
    j["nodes"] = m.nodes;
    j["work_blocks"] = m.work_blocks;
    j["work_permutation_calls"] = m.work_permutation_calls;
    j["sum_level_max_arities"] = m.sum_level_max_arities;
    j["max_live_states"] = m.max_live_states ? nlohmann::json(*m.max_live_states) : nlohmann::json(nullptr);
    nlohmann::json ratios = nlohmann::json::object();
    for (const auto& [name, v] : row.ratios) ratios[name] = std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v);
    j["ratios"] = ratios;
    os << j.dump() << "\n";
  }
  return os.str();
}

}  // namespace treehash
