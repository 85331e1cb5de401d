#include "pulsegraph/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "pulsegraph/error.hpp"

namespace pulsegraph {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct Value {
  std::string raw;
  std::string where;

  [[noreturn]] void fail(const char* want) const {
    throw Error(ErrorCode::ParseError, where + ": expected " + want + ", got '" + raw + "'");
  }
  double number() const {
    double v = 0;
    const auto* end = raw.data() + raw.size();
    auto [p, ec] = std::from_chars(raw.data(), end, v);
    if (ec != std::errc() || p != end) fail("a number");
    return v;
  }
  int integer() const {
    int v = 0;
    const auto* end = raw.data() + raw.size();
    auto [p, ec] = std::from_chars(raw.data(), end, v);
    if (ec != std::errc() || p != end) fail("an integer");
    return v;
  }
  bool boolean() const {
    if (raw == "true") return true;
    if (raw == "false") return false;
    fail("true or false");
  }
};

using Setter = std::function<void(PipelineConfig&, const Value&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"prep.working_rate_hz", [](auto& c, const Value& v) { c.working_rate_hz = v.number(); }},
      {"prep.low_cut_hz", [](auto& c, const Value& v) { c.single_channel_filter.low_cut_hz = v.number(); }},
      {"prep.two_channel_low_cut_hz", [](auto& c, const Value& v) { c.two_channel_filter.low_cut_hz = v.number(); }},
      {"prep.high_cut_hz",
       [](auto& c, const Value& v) { c.single_channel_filter.high_cut_hz = c.two_channel_filter.high_cut_hz = v.number(); }},
      {"prep.filter_order",
       [](auto& c, const Value& v) { c.single_channel_filter.order = c.two_channel_filter.order = v.integer(); }},
      {"prep.smoothing", [](auto& c, const Value& v) { c.smoothing = v.boolean(); }},
      {"prep.spline_degree", [](auto& c, const Value& v) { c.spline.degree = v.integer(); }},
      {"prep.knot_spacing_s", [](auto& c, const Value& v) { c.spline.knot_spacing_s = v.number(); }},
      {"prep.penalty_order", [](auto& c, const Value& v) { c.spline.penalty_order = v.integer(); }},
      {"prep.smoothing_lambda", [](auto& c, const Value& v) { c.spline.lambda = v.number(); }},
      {"features.min_peak_distance_s", [](auto& c, const Value& v) { c.features.min_peak_distance_s = v.number(); }},
      {"features.min_prominence_iqr", [](auto& c, const Value& v) { c.features.min_prominence_iqr = v.number(); }},
      {"features.edge_margin_s", [](auto& c, const Value& v) { c.features.edge_margin_s = v.number(); }},
      {"graph.lambda", [](auto& c, const Value& v) { c.penalty.lambda = v.number(); }},
      {"graph.exponent", [](auto& c, const Value& v) { c.penalty.exponent = v.integer(); }},
      {"graph.window_factor", [](auto& c, const Value& v) { c.penalty.window_factor = v.number(); }},
      {"prior.window_s",
       [](auto& c, const Value& v) { c.hr_window_s = c.spectral.window_len_s = v.number(); }},
      {"prior.step_s", [](auto& c, const Value& v) { c.spectral.step_s = v.number(); }},
      {"prior.min_hz", [](auto& c, const Value& v) { c.spectral.min_hz = v.number(); }},
      {"prior.max_hz", [](auto& c, const Value& v) { c.spectral.max_hz = v.number(); }},
      {"prior.max_jump_bpm", [](auto& c, const Value& v) { c.spectral.max_jump_bpm = v.number(); }},
      {"prior.fft_size", [](auto& c, const Value& v) { c.spectral.fft_size = v.integer(); }},
      {"fusion.temporal_order", [](auto& c, const Value& v) { c.fusion.temporal_order = v.boolean(); }},
      {"hrv.ar_order", [](auto& c, const Value& v) { c.hrv.ar_order = v.integer(); }},
      {"hrv.tachogram_rate_hz", [](auto& c, const Value& v) { c.hrv.tachogram_rate_hz = v.number(); }},
      {"hrv.vlf_low_hz", [](auto& c, const Value& v) { c.hrv.vlf_low_hz = v.number(); }},
      {"hrv.lf_low_hz", [](auto& c, const Value& v) { c.hrv.lf_low_hz = v.number(); }},
      {"hrv.hf_low_hz", [](auto& c, const Value& v) { c.hrv.hf_low_hz = v.number(); }},
      {"hrv.hf_high_hz", [](auto& c, const Value& v) { c.hrv.hf_high_hz = v.number(); }},
      {"hrv.min_record_s", [](auto& c, const Value& v) { c.hrv.min_record_s = v.number(); }},
      {"hrv.mean_hr_per_beat", [](auto& c, const Value& v) { c.hrv.mean_hr_per_beat = v.boolean(); }},
      {"ecg.highpass_hz", [](auto& c, const Value& v) { c.ecg_highpass_hz = v.number(); }},
      {"ecg.wavelet_center_frequency", [](auto& c, const Value& v) { c.rpeaks.wavelet_center_frequency = v.number(); }},
      {"ecg.qrs_frequency_hz", [](auto& c, const Value& v) { c.rpeaks.qrs_frequency_hz = v.number(); }},
      {"ecg.mad_factor", [](auto& c, const Value& v) { c.rpeaks.mad_factor = v.number(); }},
      {"ecg.refractory_s", [](auto& c, const Value& v) { c.rpeaks.refractory_s = v.number(); }},
      {"ecg.relative_height", [](auto& c, const Value& v) { c.rpeaks.relative_height = v.number(); }},
      {"eval.align_tolerance", [](auto& c, const Value& v) { c.align_tolerance = v.number(); }},
  };
  return table;
}

}  // namespace

PipelineConfig parse_config(const std::string& text, const std::string& origin) {
  PipelineConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    // Strip comments outside quotes.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    const std::string s = trim(line);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw Error(ErrorCode::ParseError, where + ": unterminated section header");
      section = trim(std::string_view(s).substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::ParseError, where + ": expected key = value");
    const std::string key = trim(std::string_view(s).substr(0, eq));
    std::string raw = trim(std::string_view(s).substr(eq + 1));
    if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') raw = raw.substr(1, raw.size() - 2);
    const std::string full = section.empty() ? key : section + "." + key;
    const auto it = setters().find(full);
    if (it == setters().end()) throw Error(ErrorCode::ParseError, where + ": unknown key '" + full + "'");
    it->second(cfg, Value{raw, where});
  }
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::ParseError, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path.string());
}

PipelineConfig resolve_config(const std::filesystem::path& explicit_path) {
  if (!explicit_path.empty()) return load_config(explicit_path);
  if (const char* env = std::getenv("PULSEGRAPH_CONFIG"); env && *env) return load_config(env);
  return {};
}

std::string config_json(const PipelineConfig& c) {
  nlohmann::ordered_json j;
  j["prep"] = {{"working_rate_hz", c.working_rate_hz},
               {"low_cut_hz", c.single_channel_filter.low_cut_hz},
               {"two_channel_low_cut_hz", c.two_channel_filter.low_cut_hz},
               {"high_cut_hz", c.single_channel_filter.high_cut_hz.value_or(0.0)},
               {"filter_order", c.single_channel_filter.order},
               {"smoothing", c.smoothing},
               {"spline_degree", c.spline.degree},
               {"knot_spacing_s", c.spline.knot_spacing_s},
               {"penalty_order", c.spline.penalty_order},
               {"smoothing_lambda", c.spline.lambda}};
  j["features"] = {{"min_peak_distance_s", c.features.min_peak_distance_s},
                   {"min_prominence_iqr", c.features.min_prominence_iqr},
                   {"edge_margin_s", c.features.edge_margin_s}};
  j["graph"] = {{"lambda", c.penalty.lambda}, {"exponent", c.penalty.exponent}, {"window_factor", c.penalty.window_factor}};
  j["prior"] = {{"window_s", c.hr_window_s},       {"step_s", c.spectral.step_s},
                {"min_hz", c.spectral.min_hz},     {"max_hz", c.spectral.max_hz},
                {"max_jump_bpm", c.spectral.max_jump_bpm}, {"fft_size", c.spectral.fft_size}};
  j["fusion"] = {{"temporal_order", c.fusion.temporal_order}};
  j["hrv"] = {{"ar_order", c.hrv.ar_order},     {"tachogram_rate_hz", c.hrv.tachogram_rate_hz},
              {"vlf_low_hz", c.hrv.vlf_low_hz}, {"lf_low_hz", c.hrv.lf_low_hz},
              {"hf_low_hz", c.hrv.hf_low_hz},   {"hf_high_hz", c.hrv.hf_high_hz},
              {"min_record_s", c.hrv.min_record_s}, {"mean_hr_per_beat", c.hrv.mean_hr_per_beat}};
  j["ecg"] = {{"highpass_hz", c.ecg_highpass_hz},
              {"wavelet_center_frequency", c.rpeaks.wavelet_center_frequency},
              {"qrs_frequency_hz", c.rpeaks.qrs_frequency_hz},
              {"mad_factor", c.rpeaks.mad_factor},
              {"refractory_s", c.rpeaks.refractory_s},
              {"relative_height", c.rpeaks.relative_height}};
  j["eval"] = {{"align_tolerance", c.align_tolerance}};
  return j.dump(2) + "\n";
}

}  // namespace pulsegraph
