#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "pulsegraph/hrv.hpp"
#include "pulsegraph/types.hpp"

namespace pulsegraph {

struct AlignedPairs {
  struct Pair {
    double true_ibi_ms;
    double est_ibi_ms;
    double true_beat_t_s;
  };
  std::vector<Pair> pairs;
  std::size_t unmatched_true{0};
  std::size_t unmatched_est{0};

  std::size_t total_true() const { return pairs.size() + unmatched_true; }
  double coverage() const {
    return total_true() ? static_cast<double>(pairs.size()) / static_cast<double>(total_true()) : 0.0;
  }
};

/// One-to-one greedy matching of intervals: a pair qualifies when both the start beats
/// and the end beats lie within `tolerance_factor` times the mean of the two durations.
/// Pairs are taken cheapest first (sum of both beat offsets). Empty input → InvalidInput.
AlignedPairs align(const IbiSequence& truth, const IbiSequence& estimate, double tolerance_factor = 0.5);

struct IbiMetrics {
  std::optional<double> corr;  // nullopt: CorrUndefined (zero variance)
  double mape_pct{0};
  double coverage{0};
  std::size_t pairs{0};
};

/// Needs >= 3 pairs (InvalidInput).
IbiMetrics ibi_metrics(const AlignedPairs& a);

struct ParameterMetrics {
  std::string name;
  std::optional<double> corr;
  double mape_pct{0};
};

/// Cross-subject agreement per HRV parameter. Needs >= 3 subjects.
std::array<ParameterMetrics, HrvReport::kParameters> hrv_metrics(const std::vector<HrvReport>& truth,
                                                                 const std::vector<HrvReport>& estimate);

struct SubjectRow {
  std::string subject;
  std::optional<double> corr;
  double mape_pct{0};
  double coverage{0};
};

struct SubjectReport {
  std::vector<SubjectRow> rows;
  SubjectRow average;  // subject == "Average"
  SubjectRow sd;       // subject == "SD", population SD across subjects
};

SubjectReport subject_report(std::vector<SubjectRow> rows);

std::string format_corr(const std::optional<double>& corr);
std::string subject_report_csv(const SubjectReport& report);
std::string subject_report_ndjson(const SubjectReport& report);

}  // namespace pulsegraph
