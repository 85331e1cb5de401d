#include "pulsegraph/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "pulsegraph/error.hpp"
#include "pulsegraph/stats.hpp"

namespace pulsegraph {

AlignedPairs align(const IbiSequence& truth, const IbiSequence& est, double factor) {
  if (truth.empty() || est.empty()) throw Error(ErrorCode::InvalidInput, "align: empty sequence");

  std::vector<std::size_t> order(est.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return est.starts_s[a] < est.starts_s[b]; });
  std::vector<double> sorted_starts(est.size());
  for (std::size_t i = 0; i < order.size(); ++i) sorted_starts[i] = est.starts_s[order[i]];
  const double max_ibi_s =
      std::max(*std::max_element(truth.ibis_ms.begin(), truth.ibis_ms.end()),
               *std::max_element(est.ibis_ms.begin(), est.ibis_ms.end())) / 1000.0;
  const double reach = factor * max_ibi_s;

  struct Candidate {
    double cost, start_sum, start_min;
    std::size_t t, e;
  };
  std::vector<Candidate> cand;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    const double ts = truth.starts_s[t], te = truth.end_s(t);
    auto it = std::lower_bound(sorted_starts.begin(), sorted_starts.end(), ts - reach);
    for (; it != sorted_starts.end() && *it <= ts + reach; ++it) {
      const std::size_t e = order[static_cast<std::size_t>(it - sorted_starts.begin())];
      const double tol = factor * 0.5 * (truth.ibis_ms[t] + est.ibis_ms[e]) / 1000.0;
      const double ds = std::abs(est.starts_s[e] - ts), de = std::abs(est.end_s(e) - te);
      if (ds <= tol && de <= tol)
        cand.push_back({ds + de, ts + est.starts_s[e], std::min(ts, est.starts_s[e]), t, e});
    }
  }
  std::stable_sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.cost, a.start_sum, a.start_min) < std::tie(b.cost, b.start_sum, b.start_min);
  });

  std::vector<bool> used_t(truth.size(), false), used_e(est.size(), false);
  std::vector<std::pair<std::size_t, std::size_t>> matched;
  for (const auto& c : cand) {
    if (used_t[c.t] || used_e[c.e]) continue;
    used_t[c.t] = used_e[c.e] = true;
    matched.emplace_back(c.t, c.e);
  }
  std::sort(matched.begin(), matched.end());

  AlignedPairs out;
  for (auto [t, e] : matched) out.pairs.push_back({truth.ibis_ms[t], est.ibis_ms[e], truth.end_s(t)});
  out.unmatched_true = truth.size() - matched.size();
  out.unmatched_est = est.size() - matched.size();
  return out;
}

IbiMetrics ibi_metrics(const AlignedPairs& a) {
  if (a.pairs.size() < 3) throw Error(ErrorCode::InvalidInput, "ibi_metrics needs >= 3 aligned pairs");
  Eigen::VectorXd t(static_cast<Eigen::Index>(a.pairs.size())), e(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    t[i] = a.pairs[static_cast<std::size_t>(i)].true_ibi_ms;
    e[i] = a.pairs[static_cast<std::size_t>(i)].est_ibi_ms;
  }
  IbiMetrics m;
  m.corr = pearson(t, e);
  m.mape_pct = mape_pct(t, e);
  m.coverage = a.coverage();
  m.pairs = a.pairs.size();
  return m;
}

std::array<ParameterMetrics, HrvReport::kParameters> hrv_metrics(const std::vector<HrvReport>& truth,
                                                                 const std::vector<HrvReport>& est) {
  if (truth.size() != est.size()) throw Error(ErrorCode::InvalidInput, "hrv_metrics: subject count mismatch");
  if (truth.size() < 3) throw Error(ErrorCode::InvalidInput, "hrv_metrics needs >= 3 subjects");
  const auto n = static_cast<Eigen::Index>(truth.size());
  std::array<ParameterMetrics, HrvReport::kParameters> out;
  for (std::size_t p = 0; p < HrvReport::kParameters; ++p) {
    Eigen::VectorXd t(n), e(n);
    for (Eigen::Index s = 0; s < n; ++s) {
      t[s] = truth[static_cast<std::size_t>(s)].values()[p];
      e[s] = est[static_cast<std::size_t>(s)].values()[p];
    }
    out[p].name = HrvReport::names()[p];
    out[p].corr = pearson(t, e);
    // Subjects whose true value is zero have no defined percentage error.
    std::vector<double> terms;
    for (Eigen::Index s = 0; s < n; ++s)
      if (t[s] != 0.0) terms.push_back(std::abs(t[s] - e[s]) / std::abs(t[s]) * 100.0);
    out[p].mape_pct = terms.empty() ? 0.0 : std::accumulate(terms.begin(), terms.end(), 0.0) / static_cast<double>(terms.size());
  }
  return out;
}

SubjectReport subject_report(std::vector<SubjectRow> rows) {
  SubjectReport r;
  r.rows = std::move(rows);
  r.average.subject = "Average";
  r.sd.subject = "SD";
  if (r.rows.empty()) return r;
  std::vector<double> corr, mape, cov;
  for (const auto& row : r.rows) {
    if (row.corr) corr.push_back(*row.corr);
    mape.push_back(row.mape_pct);
    cov.push_back(row.coverage);
  }
  auto mean_sd = [](const std::vector<double>& v) {
    const Eigen::Map<const Eigen::VectorXd> m(v.data(), static_cast<Eigen::Index>(v.size()));
    return std::make_pair(m.mean(), population_sd(m));
  };
  if (!corr.empty()) std::tie(r.average.corr, r.sd.corr) = mean_sd(corr);
  std::tie(r.average.mape_pct, r.sd.mape_pct) = mean_sd(mape);
  std::tie(r.average.coverage, r.sd.coverage) = mean_sd(cov);
  return r;
}

std::string format_corr(const std::optional<double>& corr) {
  if (!corr) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *corr);
  return buf;
}

std::string subject_report_csv(const SubjectReport& report) {
  std::ostringstream out;
  out << "subject,corr,mape_pct,coverage\n";
  char buf[64];
  auto row = [&](const SubjectRow& r) {
    std::snprintf(buf, sizeof buf, ",%.3f,%.4f\n", r.mape_pct, r.coverage);
    out << r.subject << ',' << format_corr(r.corr) << buf;
  };
  for (const auto& r : report.rows) row(r);
  row(report.average);
  row(report.sd);
  return out.str();
}

std::string subject_report_ndjson(const SubjectReport& report) {
  std::ostringstream out;
  auto row = [&](const SubjectRow& r, const char* kind) {
    nlohmann::json j;
    j["kind"] = kind;
    j["subject"] = r.subject;
    j["corr"] = r.corr ? nlohmann::json(*r.corr) : nlohmann::json(nullptr);
    j["mape_pct"] = r.mape_pct;
    j["coverage"] = r.coverage;
    out << j.dump() << '\n';
  };
  for (const auto& r : report.rows) row(r, "subject");
  row(report.average, "average");
  row(report.sd, "sd");
  return out.str();
}

}  // namespace pulsegraph
