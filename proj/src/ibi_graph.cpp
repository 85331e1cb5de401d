#include "pulsegraph/ibi_graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pulsegraph/error.hpp"

namespace pulsegraph {

double PenaltyConfig::operator()(double d) const {
  double p = 1.0;
  for (int k = 0; k < exponent; ++k) p *= d;
  return lambda * p;
}

void validate(const PenaltyConfig& cfg) {
  if (!(cfg.lambda > 0.0)) throw Error(ErrorCode::InvalidInput, "penalty lambda must be positive");
  if (cfg.exponent < 1) throw Error(ErrorCode::InvalidInput, "penalty exponent must be >= 1");
  if (!(cfg.window_factor > 0.0)) throw Error(ErrorCode::InvalidInput, "neighbor window factor must be positive");
}

BeatGraph build_graph(std::vector<double> vertices_s, std::vector<double> avg_ibi_ms, double window_factor) {
  if (vertices_s.empty()) throw Error(ErrorCode::EmptyResult, "no candidate beats");
  if (avg_ibi_ms.size() != vertices_s.size()) throw Error(ErrorCode::InvalidInput, "prior length mismatch");
  BeatGraph g;
  const std::size_t n = vertices_s.size();
  g.vertices_s = std::move(vertices_s);
  g.avg_ibi_ms = std::move(avg_ibi_ms);
  g.channel.assign(n, 1);
  g.neighbor_first.resize(n);
  g.neighbor_last.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double window_s = window_factor * g.avg_ibi_ms[i] / 1000.0;
    std::size_t j = i;
    while (j > 0 && g.vertices_s[j - 1] == g.vertices_s[i]) --j;
    g.neighbor_last[i] = j;
    while (j > 0 && g.vertices_s[i] - g.vertices_s[j - 1] < window_s) --j;
    g.neighbor_first[i] = j;
  }
  g.weights.assign(n, 0.0);
  g.prev.assign(n, BeatGraph::kNone);
  g.gap_start.assign(n, false);
  return g;
}

namespace {

std::vector<double> prior_at(const std::vector<double>& ts, const HrPrior& prior) {
  if (prior.empty()) throw Error(ErrorCode::MissingPrior, "graph construction needs an HR prior");
  std::vector<double> ibi(ts.size());
  std::transform(ts.begin(), ts.end(), ibi.begin(), [&](double t) { return avg_ibi_at(prior, t); });
  return ibi;
}

}  // namespace

BeatGraph build_graph(const FiducialSeries& candidates, const HrPrior& prior, double window_factor) {
  if (candidates.empty()) throw Error(ErrorCode::EmptyResult, "no candidate beats");
  BeatGraph g = build_graph(candidates.timestamps_s, prior_at(candidates.timestamps_s, prior), window_factor);
  g.channel.assign(g.size(), candidates.channel_id);
  return g;
}

BeatGraph build_graph_two_channel(const FiducialSeries& c1, const FiducialSeries& c2, const HrPrior& prior,
                                  double window_factor) {
  struct Vertex {
    double t;
    int channel;
  };
  std::vector<Vertex> merged;
  merged.reserve(c1.size() + c2.size());
  for (double t : c1.timestamps_s) merged.push_back({t, c1.channel_id});
  for (double t : c2.timestamps_s) merged.push_back({t, c2.channel_id});
  if (merged.empty()) throw Error(ErrorCode::EmptyResult, "no candidate beats");
  std::stable_sort(merged.begin(), merged.end(), [](const Vertex& a, const Vertex& b) { return a.t < b.t; });

  std::vector<double> ts(merged.size());
  std::transform(merged.begin(), merged.end(), ts.begin(), [](const Vertex& v) { return v.t; });
  BeatGraph g = build_graph(ts, prior_at(ts, prior), window_factor);
  std::transform(merged.begin(), merged.end(), g.channel.begin(), [](const Vertex& v) { return v.channel; });
  return g;
}

namespace {

// Lowest-weight vertex among the neighbors of `last` and `last` itself; ties go to
// the later vertex.
std::size_t destination(const BeatGraph& g, std::size_t last) {
  std::size_t best = last;
  for (std::size_t j = g.neighbor_last[last]; j-- > g.neighbor_first[last];)
    if (g.weights[j] < g.weights[best]) best = j;
  return best;
}

}  // namespace

BeatPath shortest_path(BeatGraph& g, const PenaltyConfig& cfg, Feature source) {
  validate(cfg);
  const std::size_t n = g.size();
  BeatPath path;
  if (n == 0) return path;
  g.weights.assign(n, 0.0);
  g.prev.assign(n, BeatGraph::kNone);
  g.gap_start.assign(n, false);

  const double first = g.vertices_s.front();
  for (std::size_t i = 0; i < n; ++i) {
    const double expected_prev = g.vertices_s[i] - g.avg_ibi_ms[i] / 1000.0;
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = BeatGraph::kNone;
    // Nearest neighbor first so that ties keep the shorter edge.
    for (std::size_t j = g.neighbor_last[i]; j-- > g.neighbor_first[i];) {
      const double cost = g.weights[j] + cfg(std::abs(g.vertices_s[j] - expected_prev));
      if (cost < best) {
        best = cost;
        arg = j;
      }
    }
    const bool in_first_window = g.vertices_s[i] - first < cfg.window_factor * g.avg_ibi_ms[i] / 1000.0;
    g.prev[i] = arg;
    if (arg == BeatGraph::kNone) {
      g.weights[i] = 0.0;
      g.gap_start[i] = i > 0 && !in_first_window;
    } else {
      // Inside the first window the chain is free: the true first beat is unknown, but
      // the predecessor is kept so the walk still recovers the leading beats.
      g.weights[i] = in_first_window ? 0.0 : best;
    }
  }

  std::size_t at = destination(g, n - 1);
  path.destination_weight = g.weights[at];
  std::vector<std::size_t> reversed;
  std::vector<std::size_t> break_vertices;
  while (true) {
    reversed.push_back(at);
    if (g.prev[at] != BeatGraph::kNone) {
      const std::size_t from = g.prev[at];
      path.total_weight += cfg(std::abs(g.vertices_s[from] - (g.vertices_s[at] - g.avg_ibi_ms[at] / 1000.0)));
      at = from;
      continue;
    }
    if (!g.gap_start[at]) break;
    break_vertices.push_back(at);
    at = destination(g, at - 1);
  }
  path.chosen.assign(reversed.rbegin(), reversed.rend());
  std::vector<bool> opens(n, false);
  for (std::size_t v : break_vertices) opens[v] = true;
  for (std::size_t pos = 1; pos < path.chosen.size(); ++pos)
    if (opens[path.chosen[pos]]) path.breaks_before.push_back(pos);

  std::vector<double> beats(path.chosen.size());
  std::transform(path.chosen.begin(), path.chosen.end(), beats.begin(), [&](std::size_t v) { return g.vertices_s[v]; });
  path.ibis = IbiSequence::from_beats(beats, source, path.breaks_before);
  return path;
}

}  // namespace pulsegraph
