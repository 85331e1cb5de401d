#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "pulsegraph/error.hpp"
#include "pulsegraph/eval.hpp"
#include "pulsegraph/hrv.hpp"
#include "pulsegraph/pipeline.hpp"
#include "pulsegraph/session.hpp"
#include "pulsegraph/synth.hpp"

namespace fs = std::filesystem;
using namespace pulsegraph;

namespace {

const char* kFeatureNames[] = {"peak", "slope", "onset", "fused"};

int feature_slot(const std::string& name) {
  for (int i = 0; i < 4; ++i)
    if (name == kFeatureNames[i]) return i;
  throw Error(ErrorCode::InvalidInput, "unknown feature '" + name + "'");
}

std::vector<std::pair<double, double>> parse_profile(const std::string& text) {
  std::vector<std::pair<double, double>> knots;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw Error(ErrorCode::InvalidInput, "hr profile knots are t:bpm");
    knots.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
  }
  std::sort(knots.begin(), knots.end());
  return knots;
}

std::vector<fs::path> dataset_sessions(const fs::path& root) {
  std::vector<fs::path> out;
  if (fs::exists(root / "manifest.json")) return {root};
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory() && fs::exists(e.path() / "manifest.json")) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  if (out.empty()) throw Error(ErrorCode::ManifestError, "no sessions under " + root.string());
  return out;
}

std::string fmt(double v, const char* f) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string metrics_row(const std::string& subject, ChannelSet cs, const std::string& feature,
                        const std::optional<IbiMetrics>& m) {
  std::string row = subject + "," + std::string(to_string(cs)) + "," + feature + ",";
  if (!m) return row + "undefined,,0\n";
  return row + format_corr(m->corr) + "," + fmt(m->mape_pct, "%.3f") + "," + fmt(m->coverage, "%.4f") + "\n";
}

struct Options {
  std::string session, dataset, channels = "1", feature = "fused", config, out = ".", group_by = "subject", metrics;
  std::string ibis;
  int jobs = 1;
  std::uint64_t seed = 1;
  SynthConfig synth;
  std::string hr_profile = "0:72";
  std::string subject, activity = "synthetic";
  bool write_hr = false;
};

int cmd_synth(Options& o) {
  o.synth.hr_profile = parse_profile(o.hr_profile);
  o.synth.seed = o.seed;
  const SynthRecord rec = generate(o.synth);
  const std::string id = fs::path(o.out).filename().string();
  Session s = to_session(rec, id.empty() ? "synth" : id, o.subject, o.activity);
  if (o.write_hr) {
    std::string hr = "t_s,hr_bpm\n";
    for (double t = 4.0; t <= o.synth.duration_s - 4.0 + 1e-9; t += 2.0)
      hr += format_number(t) + "," + format_number(hr_profile_at(o.synth.hr_profile, t)) + "\n";
    write_atomic(fs::path(o.out) / "hr.csv", hr);
    s.manifest.hr_file = "hr.csv";
  }
  write_session(o.out, s);
  std::cout << "wrote " << o.out << " (" << rec.r_peaks.size() << " beats)\n";
  return 0;
}

int cmd_estimate(const Options& o) {
  const PipelineConfig cfg = resolve_config(o.config);
  const Session s = ingest(o.session);
  const PipelineResult r = run_pipeline(s, cfg, parse_channel_set(o.channels));
  write_outputs(r, cfg, o.out);
  const int slot = feature_slot(o.feature);
  std::cout << o.feature << ": " << r.ibis[slot].size() << " IBIs";
  if (r.metrics[slot])
    std::cout << ", corr " << format_corr(r.metrics[slot]->corr) << ", MAPE " << fmt(r.metrics[slot]->mape_pct, "%.2f") << "%";
  std::cout << "\n";
  return 0;
}

int cmd_hrv(const Options& o) {
  const PipelineConfig cfg = resolve_config(o.config);
  IbiSequence ibis;
  std::string id = "ibis";
  if (!o.ibis.empty()) {
    ibis = parse_ibi_csv(read_text(o.ibis), o.ibis);
  } else {
    const Session s = ingest(o.session);
    id = s.manifest.session_id;
    ibis = run_pipeline(s, cfg, parse_channel_set(o.channels)).ibis[feature_slot(o.feature)];
  }
  const HrvReport rep = hrv_report(ibis, cfg.hrv);
  write_atomic(fs::path(o.out) / "hrv.json", hrv_json(rep, std::nullopt, id));
  const auto v = rep.values();
  for (std::size_t i = 0; i < HrvReport::kParameters; ++i)
    std::cout << HrvReport::names()[i] << " " << fmt(v[i], "%.3f") << "\n";
  return 0;
}

int cmd_evaluate(const Options& o) {
  const PipelineConfig cfg = resolve_config(o.config);
  const ChannelSet cs = parse_channel_set(o.channels);
  const auto sessions = dataset_sessions(o.dataset);
  std::vector<std::optional<PipelineResult>> results(sessions.size());
  std::vector<std::string> failures(sessions.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < sessions.size();) {
      try {
        const Session s = ingest(sessions[i]);
        PipelineResult r = run_pipeline(s, cfg, cs);
        write_outputs(r, cfg, fs::path(o.out) / sessions[i].filename());
        results[i] = std::move(r);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const int n = std::clamp(o.jobs, 1, static_cast<int>(sessions.size()));
  for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  int failed = 0;
  for (std::size_t i = 0; i < sessions.size(); ++i)
    if (!failures[i].empty()) {
      std::cerr << sessions[i].string() << ": " << failures[i] << "\n";
      ++failed;
    }

  // Group aligned pairs by subject (or session) and recompute metrics on the pooled pairs.
  std::map<std::string, std::array<AlignedPairs, 4>> groups;
  std::map<std::string, std::pair<std::vector<HrvReport>, std::vector<HrvReport>>> hrv_by_group;
  for (const auto& r : results) {
    if (!r) continue;
    const std::string key = o.group_by == "session" ? r->session_id : r->subject;
    auto& g = groups[key];
    for (int f = 0; f < 4; ++f) {
      if (!r->aligned[f]) continue;
      g[f].pairs.insert(g[f].pairs.end(), r->aligned[f]->pairs.begin(), r->aligned[f]->pairs.end());
      g[f].unmatched_true += r->aligned[f]->unmatched_true;
      g[f].unmatched_est += r->aligned[f]->unmatched_est;
    }
    if (r->hrv && r->true_hrv) {
      hrv_by_group[key].first.push_back(*r->true_hrv);
      hrv_by_group[key].second.push_back(*r->hrv);
    }
  }

  const int only = o.feature == "all" ? -1 : feature_slot(o.feature);
  std::string csv = "subject,channelset,feature,corr,mape_pct,coverage\n";
  std::array<std::vector<SubjectRow>, 4> rows;
  for (const auto& [key, g] : groups)
    for (int f = 0; f < 4; ++f) {
      if (only >= 0 && f != only) continue;
      std::optional<IbiMetrics> m;
      if (g[f].pairs.size() >= 3) m = ibi_metrics(g[f]);
      csv += metrics_row(key, cs, kFeatureNames[f], m);
      if (m) rows[f].push_back({key, m->corr, m->mape_pct, m->coverage});
    }
  write_atomic(fs::path(o.out) / "metrics.csv", csv);

  for (int f = 0; f < 4; ++f) {
    if (rows[f].empty()) continue;
    const SubjectReport rep = subject_report(rows[f]);
    const std::string base = std::string("report_") + kFeatureNames[f];
    write_atomic(fs::path(o.out) / (base + ".csv"), subject_report_csv(rep));
    write_atomic(fs::path(o.out) / (base + ".ndjson"), subject_report_ndjson(rep));
    std::cout << kFeatureNames[f] << ": Average corr " << format_corr(rep.average.corr) << ", MAPE "
              << fmt(rep.average.mape_pct, "%.2f") << "% over " << rep.rows.size() << " " << o.group_by << "(s)\n";
  }

  // Cross-subject HRV agreement, one report per group averaged over its sessions.
  std::vector<HrvReport> t, e;
  for (const auto& [key, pr] : hrv_by_group) {
    HrvReport tm{}, em{};
    auto acc = [](HrvReport& dst, const std::vector<HrvReport>& src) {
      std::array<double, HrvReport::kParameters> sum{};
      for (const auto& r : src) {
        const auto v = r.values();
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += v[i] / static_cast<double>(src.size());
      }
      dst = {sum[0], sum[1], sum[2], sum[3], sum[4], sum[5], sum[6], sum[7]};
    };
    acc(tm, pr.first);
    acc(em, pr.second);
    t.push_back(tm);
    e.push_back(em);
  }
  if (t.size() >= 3) {
    std::string hcsv = "parameter,corr,mape_pct\n";
    for (const auto& p : hrv_metrics(t, e)) hcsv += p.name + "," + format_corr(p.corr) + "," + fmt(p.mape_pct, "%.3f") + "\n";
    write_atomic(fs::path(o.out) / "hrv_metrics.csv", hcsv);
  }
  return failed ? 1 : 0;
}

int cmd_report(const Options& o) {
  const std::string text = read_text(o.metrics);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<SubjectRow> rows;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) f.push_back(c);
    if (f.size() < 6 || f[2] != o.feature) continue;
    SubjectRow r;
    r.subject = f[0];
    if (f[3] != "undefined") r.corr = std::stod(f[3]);
    if (!f[4].empty()) r.mape_pct = std::stod(f[4]);
    r.coverage = std::stod(f[5]);
    rows.push_back(r);
  }
  if (rows.empty()) throw Error(ErrorCode::EmptyResult, "no rows for feature " + o.feature + " in " + o.metrics);
  const SubjectReport rep = subject_report(rows);
  const std::string base = std::string("report_") + o.feature;
  write_atomic(fs::path(o.out) / (base + ".csv"), subject_report_csv(rep));
  write_atomic(fs::path(o.out) / (base + ".ndjson"), subject_report_ndjson(rep));
  std::cout << subject_report_csv(rep);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pulsegraph: interbeat intervals and HRV from PPG"};
  app.require_subcommand(1);
  Options o;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic session");
  synth->add_option("--out", o.out, "Session directory")->required();
  synth->add_option("--seed", o.seed);
  synth->add_option("--duration", o.synth.duration_s, "Seconds");
  synth->add_option("--rate", o.synth.sample_rate_hz, "Sample rate (Hz)");
  synth->add_option("--hr-profile", o.hr_profile, "Comma list of t:bpm knots");
  synth->add_option("--jitter", o.synth.ibi_jitter_ms, "IBI jitter SD (ms)");
  synth->add_option("--spike-rate", o.synth.artifacts.spike_rate_per_min, "Spikes per minute");
  synth->add_option("--spike-amp", o.synth.artifacts.spike_amp_rel);
  synth->add_option("--wander", o.synth.artifacts.wander_amp_rel);
  synth->add_option("--noise", o.synth.artifacts.noise_amp_rel);
  synth->add_option("--channels", o.synth.channels)->check(CLI::Range(1, 2));
  synth->add_option("--subject", o.subject);
  synth->add_option("--activity", o.activity);
  synth->add_flag("--with-hr", o.write_hr, "Also write the generating HR track as the prior");

  auto common = [&](CLI::App* c) {
    c->add_option("--channels", o.channels, "1, 2 or 1,2");
    c->add_option("--feature", o.feature, "peak, slope, onset or fused");
    c->add_option("--config", o.config, "Config file (falls back to $PULSEGRAPH_CONFIG)");
    c->add_option("--out", o.out, "Output directory");
  };
  auto* estimate = app.add_subcommand("estimate", "Run the pipeline on one session");
  estimate->add_option("--session", o.session)->required();
  common(estimate);

  auto* hrv = app.add_subcommand("hrv", "HRV parameters from a session or an IBI file");
  auto* hs = hrv->add_option("--session", o.session);
  hrv->add_option("--ibis", o.ibis, "ibis_*.csv file")->excludes(hs);
  common(hrv);

  auto* evaluate = app.add_subcommand("evaluate", "Run and score every session of a dataset");
  evaluate->add_option("--dataset", o.dataset)->required();
  evaluate->add_option("--jobs", o.jobs)->check(CLI::PositiveNumber);
  evaluate->add_option("--group-by", o.group_by)->check(CLI::IsMember({"subject", "session"}));
  common(evaluate);

  auto* report = app.add_subcommand("report", "Per-subject table with Average and SD rows");
  report->add_option("--metrics", o.metrics, "metrics.csv from evaluate")->required();
  report->add_option("--feature", o.feature);
  report->add_option("--out", o.out);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*synth) return cmd_synth(o);
    if (*estimate) return cmd_estimate(o);
    if (*hrv) {
      if (o.session.empty() && o.ibis.empty()) throw Error(ErrorCode::InvalidInput, "hrv needs --session or --ibis");
      return cmd_hrv(o);
    }
    if (*evaluate) {
      if (evaluate->count("--feature") == 0) o.feature = "all";
      return cmd_evaluate(o);
    }
    if (*report) return cmd_report(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
