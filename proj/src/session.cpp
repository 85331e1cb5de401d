#include "pulsegraph/session.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pulsegraph/error.hpp"

namespace pulsegraph {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void parse_fail(const std::string& origin, int line, const std::string& msg) {
  throw Error(ErrorCode::ParseError, origin + ":" + std::to_string(line) + ": " + msg);
}

bool parse_double(std::string_view s, double& out) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t b = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == sep) {
      out.push_back(line.substr(b, i - b));
      b = i + 1;
    }
  }
  return out;
}

// Rows of numeric columns; a first line that fails to parse is taken as a header.
std::vector<std::vector<double>> read_numeric_csv(const std::string& text, const std::string& origin, std::size_t cols) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto fields = split(line);
    std::vector<double> row(cols);
    bool ok = fields.size() >= cols;
    for (std::size_t c = 0; ok && c < cols; ++c) ok = parse_double(fields[c], row[c]);
    if (!ok) {
      if (rows.empty() && lineno == 1) continue;
      parse_fail(origin, lineno, "expected " + std::to_string(cols) + " numeric column(s)");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

ChannelRef channel_from(const nlohmann::json& j, const std::string& name, const std::string& origin) {
  if (!j.is_object() || !j.contains("file") || !j["file"].is_string())
    throw Error(ErrorCode::ManifestError, origin + ": channel '" + name + "' needs a file");
  ChannelRef c;
  c.file = j["file"].get<std::string>();
  if (!j.contains("sample_rate_hz") || !j["sample_rate_hz"].is_number())
    throw Error(ErrorCode::ManifestError, origin + ": channel '" + name + "' needs sample_rate_hz");
  c.sample_rate_hz = j["sample_rate_hz"].get<double>();
  if (!(c.sample_rate_hz > 0.0))
    throw Error(ErrorCode::ManifestError, origin + ": channel '" + name + "' has a non-positive rate");
  return c;
}

}  // namespace

std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::ParseError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::InvalidInput, "cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw Error(ErrorCode::InvalidInput, "short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

SessionManifest parse_manifest(const std::string& text, const std::string& origin) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ManifestError, origin + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::ManifestError, origin + ": expected an object");
  SessionManifest m;
  m.session_id = j.value("session_id", std::string{});
  m.subject = j.value("subject", m.session_id);
  m.activity = j.value("activity", std::string{});
  if (!j.contains("channels") || !j["channels"].is_object())
    throw Error(ErrorCode::ManifestError, origin + ": missing channels");
  const auto& ch = j["channels"];
  if (!ch.contains("ppg1")) throw Error(ErrorCode::ManifestError, origin + ": missing required channel ppg1");
  m.ppg1 = channel_from(ch["ppg1"], "ppg1", origin);
  if (ch.contains("ppg2")) m.ppg2 = channel_from(ch["ppg2"], "ppg2", origin);
  if (ch.contains("ecg")) m.ecg = channel_from(ch["ecg"], "ecg", origin);
  if (j.contains("hr")) m.hr_file = j["hr"].get<std::string>();
  if (j.contains("rpeaks")) m.rpeaks_file = j["rpeaks"].get<std::string>();
  return m;
}

std::string manifest_json(const SessionManifest& m) {
  nlohmann::ordered_json j;
  j["session_id"] = m.session_id;
  j["subject"] = m.subject;
  j["activity"] = m.activity;
  auto ch = [](const ChannelRef& c) { return nlohmann::ordered_json{{"file", c.file}, {"sample_rate_hz", c.sample_rate_hz}}; };
  j["channels"]["ppg1"] = ch(m.ppg1);
  if (m.ppg2) j["channels"]["ppg2"] = ch(*m.ppg2);
  if (m.ecg) j["channels"]["ecg"] = ch(*m.ecg);
  if (m.hr_file) j["hr"] = *m.hr_file;
  if (m.rpeaks_file) j["rpeaks"] = *m.rpeaks_file;
  return j.dump(2) + "\n";
}

Waveform read_signal_csv(const fs::path& path, double rate) {
  const auto rows = read_numeric_csv(read_text(path), path.string(), 2);
  if (rows.empty()) throw Error(ErrorCode::ParseError, path.string() + ": no samples");
  Waveform w;
  w.sample_rate_hz = rate;
  w.t0_s = rows.front()[0];
  w.samples.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) w.samples[static_cast<Eigen::Index>(i)] = rows[i][1];
  return w;
}

std::string signal_csv(const Waveform& w) {
  std::string out = "t_s,value\n";
  out.reserve(out.size() + static_cast<std::size_t>(w.size()) * 24);
  for (Eigen::Index i = 0; i < w.samples.size(); ++i) {
    out += format_number(w.time_at(i));
    out += ',';
    out += format_number(w.samples[i]);
    out += '\n';
  }
  return out;
}

std::vector<double> read_time_list(const fs::path& path) {
  std::vector<double> t;
  for (const auto& r : read_numeric_csv(read_text(path), path.string(), 1)) t.push_back(r[0]);
  return t;
}

std::string time_list_csv(const std::vector<double>& t) {
  std::string out = "t_s\n";
  for (double v : t) out += format_number(v) + "\n";
  return out;
}

std::string ibi_csv(const IbiSequence& s) {
  std::string out = "beat_t_s,ibi_ms,source,segment_break\n";
  for (std::size_t k = 0; k < s.ibis_ms.size(); ++k) {
    out += format_number(s.starts_s[k]);
    out += ',';
    out += format_number(s.ibis_ms[k]);
    out += ',';
    out += to_string(s.source);
    out += s.is_break(k) ? ",1\n" : ",0\n";
  }
  return out;
}

IbiSequence parse_ibi_csv(const std::string& text, const std::string& origin) {
  IbiSequence s;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool have_source = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    double t = 0, ibi = 0, brk = 0;
    if (f.size() != 4 || !parse_double(f[0], t) || !parse_double(f[1], ibi) || !parse_double(f[3], brk)) {
      if (lineno == 1) continue;
      parse_fail(origin, lineno, "expected beat_t_s,ibi_ms,source,segment_break");
    }
    if (!have_source) {
      try {
        s.source = feature_from_string(f[2]);
      } catch (const Error&) {
        parse_fail(origin, lineno, "unknown source '" + std::string(f[2]) + "'");
      }
      have_source = true;
    }
    if (brk != 0.0) s.segment_breaks.push_back(s.ibis_ms.size());
    s.starts_s.push_back(t);
    s.ibis_ms.push_back(ibi);
  }
  return s;
}

Session ingest(const fs::path& dir) {
  const fs::path mpath = dir / "manifest.json";
  if (!fs::exists(mpath)) throw Error(ErrorCode::ManifestError, mpath.string() + ": not found");
  Session s;
  s.dir = dir;
  s.manifest = parse_manifest(read_text(mpath), mpath.string());
  auto load = [&](const ChannelRef& c) {
    const fs::path p = dir / c.file;
    if (!fs::exists(p)) throw Error(ErrorCode::ManifestError, "referenced file missing: " + p.string());
    return read_signal_csv(p, c.sample_rate_hz);
  };
  s.ppg1 = load(s.manifest.ppg1);
  if (s.manifest.ppg2) s.ppg2 = load(*s.manifest.ppg2);
  if (s.manifest.ecg) s.ecg = load(*s.manifest.ecg);
  if (s.manifest.hr_file && !fs::exists(dir / *s.manifest.hr_file))
    throw Error(ErrorCode::ManifestError, "referenced file missing: " + (dir / *s.manifest.hr_file).string());
  if (s.manifest.rpeaks_file) {
    const fs::path p = dir / *s.manifest.rpeaks_file;
    if (!fs::exists(p)) throw Error(ErrorCode::ManifestError, "referenced file missing: " + p.string());
    FiducialSeries r;
    r.channel_id = 0;
    r.timestamps_s = read_time_list(p);
    r.span_begin_s = s.ppg1.t0_s;
    r.span_end_s = s.ppg1.end_s();
    s.rpeaks = std::move(r);
  }
  return s;
}

void write_session(const fs::path& dir, const Session& s) {
  fs::create_directories(dir);
  const auto& m = s.manifest;
  write_atomic(dir / m.ppg1.file, signal_csv(s.ppg1));
  if (m.ppg2 && s.ppg2) write_atomic(dir / m.ppg2->file, signal_csv(*s.ppg2));
  if (m.ecg && s.ecg) write_atomic(dir / m.ecg->file, signal_csv(*s.ecg));
  if (m.rpeaks_file && s.rpeaks) write_atomic(dir / *m.rpeaks_file, time_list_csv(s.rpeaks->timestamps_s));
  write_atomic(dir / "manifest.json", manifest_json(m));
}

}  // namespace pulsegraph
