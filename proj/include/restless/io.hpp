#pragma once

// Configuration loading and validation, provenance, CSV / JSON writers and
// the packed-bit stream format.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "restless/config_schema.hpp"
#include "restless/experiments.hpp"
#include "restless/gst.hpp"
#include "restless/t1_psd.hpp"

namespace restless {

using json = nlohmann::json;

inline constexpr const char* kToolVersion = "1.0.0";

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> messages)
      : std::runtime_error(join(messages)), messages_(std::move(messages)) {}
  const std::vector<std::string>& messages() const { return messages_; }

 private:
  static std::string join(const std::vector<std::string>& m) {
    std::string s;
    for (const auto& line : m) s += (s.empty() ? "" : "\n") + line;
    return s;
  }
  std::vector<std::string> messages_;
};

// ---------------------------------------------------------------------------
// Source positions

namespace detail {

/// Line of every value in a JSON document, keyed by JSON pointer. Assumes
/// the text already parsed successfully.
class LineIndex {
 public:
  explicit LineIndex(const std::string& text) : s_(text) {
    skip_ws();
    value("");
  }
  int line_of(const std::string& pointer) const {
    std::string p = pointer;
    while (true) {
      auto it = lines_.find(p);
      if (it != lines_.end()) return it->second;
      const auto cut = p.rfind('/');
      if (cut == std::string::npos) return 1;
      p = p.substr(0, cut);
    }
  }

 private:
  void skip_ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) {
      if (s_[i_] == '\n') ++line_;
      ++i_;
    }
  }
  std::string string_token() {
    std::string out;
    ++i_;
    while (i_ < s_.size() && s_[i_] != '"') {
      if (s_[i_] == '\\' && i_ + 1 < s_.size()) ++i_;
      out += s_[i_++];
    }
    ++i_;
    return out;
  }
  static std::string escape(const std::string& key) {
    std::string out;
    for (char c : key) out += c == '~' ? "~0" : c == '/' ? "~1" : std::string(1, c);
    return out;
  }
  void value(const std::string& ptr) {
    lines_[ptr] = line_;
    if (i_ >= s_.size()) return;
    const char c = s_[i_];
    if (c == '{') {
      ++i_;
      skip_ws();
      while (i_ < s_.size() && s_[i_] != '}') {
        const int key_line = line_;
        const std::string key = string_token();
        skip_ws();
        ++i_;  // ':'
        skip_ws();
        const std::string child = ptr + "/" + escape(key);
        value(child);
        lines_[child] = key_line;
        skip_ws();
        if (i_ < s_.size() && s_[i_] == ',') ++i_;
        skip_ws();
      }
      ++i_;
    } else if (c == '[') {
      ++i_;
      skip_ws();
      for (int k = 0; i_ < s_.size() && s_[i_] != ']'; ++k) {
        value(ptr + "/" + std::to_string(k));
        skip_ws();
        if (i_ < s_.size() && s_[i_] == ',') ++i_;
        skip_ws();
      }
      ++i_;
    } else if (c == '"') {
      string_token();
    } else {
      while (i_ < s_.size() && s_[i_] != ',' && s_[i_] != '}' && s_[i_] != ']' &&
             !std::isspace(static_cast<unsigned char>(s_[i_])))
        ++i_;
    }
  }

  const std::string& s_;
  std::size_t i_ = 0;
  int line_ = 1;
  std::map<std::string, int> lines_;
};

// Subset of JSON Schema draft-07 used by config/schema.json.
inline void validate_node(const json& v, const json& schema, const std::string& ptr, std::vector<std::pair<std::string, std::string>>& errors) {
  auto fail = [&](const std::string& msg) { errors.emplace_back(ptr, msg); };
  if (schema.contains("type")) {
    const std::string t = schema["type"];
    const bool ok = (t == "object" && v.is_object()) || (t == "array" && v.is_array()) ||
                    (t == "string" && v.is_string()) || (t == "boolean" && v.is_boolean()) ||
                    (t == "number" && v.is_number()) ||
                    (t == "integer" && (v.is_number_integer() ||
                                        (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>())));
    if (!ok) return fail("expected " + t + ", got " + std::string(v.type_name()));
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& e : schema["enum"]) found = found || e == v;
    if (!found) return fail("value " + v.dump() + " not in " + schema["enum"].dump());
  }
  if (v.is_number()) {
    const double x = v.get<double>();
    auto bound = [&](const char* key, bool violated, const char* rel) {
      if (schema.contains(key) && violated) fail("value " + v.dump() + " must be " + rel + " " + schema[key].dump());
    };
    bound("minimum", schema.contains("minimum") && x < schema["minimum"].get<double>(), ">=");
    bound("maximum", schema.contains("maximum") && x > schema["maximum"].get<double>(), "<=");
    bound("exclusiveMinimum", schema.contains("exclusiveMinimum") && !(x > schema["exclusiveMinimum"].get<double>()), ">");
    bound("exclusiveMaximum", schema.contains("exclusiveMaximum") && !(x < schema["exclusiveMaximum"].get<double>()), "<");
  }
  if (v.is_object()) {
    const json props = schema.value("properties", json::object());
    for (const auto& r : schema.value("required", json::array()))
      if (!v.contains(r.get<std::string>())) fail("missing required key '" + r.get<std::string>() + "'");
    for (auto it = v.begin(); it != v.end(); ++it) {
      const std::string child = ptr + "/" + it.key();
      if (props.contains(it.key()))
        validate_node(it.value(), props[it.key()], child, errors);
      else if (schema.contains("additionalProperties") && schema["additionalProperties"] == false)
        errors.emplace_back(child, "unknown key '" + it.key() + "'");
    }
  }
  if (v.is_array()) {
    if (schema.contains("minItems") && v.size() < schema["minItems"].get<std::size_t>())
      fail("needs at least " + schema["minItems"].dump() + " items");
    if (schema.contains("items"))
      for (std::size_t k = 0; k < v.size(); ++k)
        validate_node(v[k], schema["items"], ptr + "/" + std::to_string(k), errors);
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Experiment configuration

struct ExperimentConfig {
  PhysicsConfig physics;
  AcquisitionSettings acquisition;
  TuneupSettings optimizer;
  NoiseModelParams noise_model;
  std::uint64_t master_seed = 0;
  std::string output_dir = "out";
  json document;  // validated input, used for hashing and per-command sections

  /// Section of the document with an empty object as fallback.
  json section(const std::string& name) const { return document.value(name, json::object()); }
};

/// Parses and validates `text` ("source" names it in messages). Messages
/// carry "source:line: /json/pointer: problem".
inline ExperimentConfig parse_config(const std::string& text, const std::string& source = "config") {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    int line = 1;
    for (std::size_t k = 0; k < std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size()); ++k)
      line += text[k] == '\n';
    throw ConfigError({source + ":" + std::to_string(line) + ": " + msg});
  }
  std::vector<std::pair<std::string, std::string>> errors;
  detail::validate_node(doc, json::parse(kConfigSchema), "", errors);
  const detail::LineIndex lines(text);
  auto report = [&](std::vector<std::pair<std::string, std::string>>& errs) {
    std::vector<std::string> msgs;
    for (const auto& [ptr, msg] : errs)
      msgs.push_back(source + ":" + std::to_string(lines.line_of(ptr)) + ": " + (ptr.empty() ? "/" : ptr) + ": " + msg);
    throw ConfigError(msgs);
  };
  if (!errors.empty()) report(errors);

  ExperimentConfig cfg;
  cfg.document = doc;
  cfg.master_seed = doc["rng"]["master_seed"].get<std::uint64_t>();
  cfg.output_dir = doc.value("output_dir", std::string("out"));

  const json ph = doc["physics"];
  auto& p = cfg.physics;
  p.t1_mean = ph.value("t1_mean_s", p.t1_mean);
  if (ph.contains("t1_psd")) p.t1_psd = {ph["t1_psd"]["alpha_s2_per_hz"], ph["t1_psd"]["beta"]};
  p.tau_p = ph.value("tau_p_s", p.tau_p);
  p.tau_cl = ph.value("tau_cl_s", p.tau_cl);
  p.tau_m = ph.value("tau_m_s", p.tau_m);
  p.tau_ro = ph.value("tau_ro_s", p.tau_ro);
  p.p_s_c = ph.value("p_s_c", p.p_s_c);
  if (ph.contains("opt")) p.opt = {ph["opt"]["a_g"], ph["opt"]["a_d"], ph["opt"]["f_detuning_hz"]};
  if (ph.contains("curvatures"))
    p.curvatures = {ph["curvatures"]["c_g"], ph["curvatures"]["c_d"], ph["curvatures"]["c_f"]};
  p.leak_curvature = ph.value("leak_curvature", p.leak_curvature);
  p.p_pulse_floor = ph.value("p_pulse_floor", p.p_pulse_floor);
  p.p_leak_floor = ph.value("p_leak_floor", p.p_leak_floor);

  const json aq = cfg.section("acquisition");
  auto& a = cfg.acquisition;
  a.n_shots = aq.value("n_shots", a.n_shots);
  a.n_seeds = aq.value("n_seeds", a.n_seeds);
  a.init_wait = aq.value("init_wait_s", a.init_wait);
  a.fluctuating_t1 = aq.value("fluctuating_t1", a.fluctuating_t1);
  a.t1_trace_dt = aq.value("t1_trace_dt_s", a.t1_trace_dt);
  const json oh = cfg.section("overhead");
  a.overhead.set_params = oh.value("set_params_s", a.overhead.set_params);
  a.overhead.process = oh.value("process_s", a.overhead.process);
  a.overhead.misc = oh.value("misc_s", a.overhead.misc);

  const json op = cfg.section("optimizer");
  auto& o = cfg.optimizer;
  o.max_evaluations_per_step = op.value("max_evaluations_per_step", o.max_evaluations_per_step);
  o.cost_spread_rel = op.value("cost_spread_rel", o.cost_spread_rel);
  o.noise_spread_z = op.value("noise_spread_z", o.noise_spread_z);
  if (op.contains("coefficients")) {
    const json& c = op["coefficients"];
    o.coefficients = {c["reflection"], c["expansion"], c["contraction"], c["shrink"]};
  }
  for (auto [key, step] : {std::pair{"step1", &o.step1}, std::pair{"step2", &o.step2}})
    if (op.contains(key)) *step = {op[key]["n_cl"], op[key]["rel_a_g"], op[key]["rel_a_d"], op[key]["f_hz"]};

  const json nm = cfg.section("noise_model");
  auto& n = cfg.noise_model;
  n.p_s_c = nm.value("p_s_c", n.p_s_c);
  n.t1_mean = nm.value("t1_mean_s", n.t1_mean);
  n.t1_sigma = nm.value("t1_sigma_s", n.t1_sigma);
  n.tau_cl = p.tau_cl;
  n.n_shots = static_cast<int>(a.n_shots);

  try {
    p.validate();
    n.timing = p.timing();
  } catch (const std::invalid_argument& e) {
    std::vector<std::pair<std::string, std::string>> errs{{"/physics", e.what()}};
    report(errs);
  }
  return cfg;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ExperimentConfig load_config(const std::string& path) { return parse_config(read_file(path), path); }

/// FNV-1a 64 over the canonical (key-sorted, compact) serialization.
inline std::string config_hash(const json& doc) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : doc.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Provenance and writers

struct Provenance {
  std::string config_hash;
  std::uint64_t master_seed = 0;
  std::string tool_version = kToolVersion;
  std::string rng_algorithm = kRngAlgorithm;
  std::string command;
};

inline Provenance provenance_for(const ExperimentConfig& cfg, const std::string& command) {
  return {config_hash(cfg.document), cfg.master_seed, kToolVersion, kRngAlgorithm, command};
}

inline json to_json(const Provenance& p) {
  return {{"config_hash", p.config_hash}, {"master_seed", p.master_seed}, {"tool_version", p.tool_version},
          {"rng", p.rng_algorithm}, {"command", p.command}};
}

/// Round-trip formatting for doubles.
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const Provenance& prov, const std::vector<std::string>& columns) : n_cols_(columns.size()) {
    out_ << "# tool: restless " << prov.tool_version << "\n"
         << "# command: " << prov.command << "\n"
         << "# config_hash: " << prov.config_hash << "\n"
         << "# master_seed: " << prov.master_seed << "\n"
         << "# rng: " << prov.rng_algorithm << "\n";
    row(columns);
  }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != n_cols_) throw std::logic_error("CsvWriter: wrong number of cells");
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }

  std::string str() const { return out_.str(); }

 private:
  std::size_t n_cols_;
  std::ostringstream out_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline json to_json(const PulseParams& p) {
  return {{"a_g", p.a_g}, {"a_d", p.a_d}, {"f_detuning_hz", p.f_detuning}};
}

inline json to_json(const RBFit& f) {
  json cov = json::array();
  for (const auto& row : f.covariance) cov.push_back(row);
  return {{"amp", f.amp}, {"offset", f.offset}, {"p_cl", f.p_cl}, {"f_cl", f.f_cl},
          {"f_cl_stderr", f.f_cl_stderr}, {"chi2", f.chi2}, {"p_at_boundary", f.p_at_boundary},
          {"covariance_a_b_p", cov}};
}

inline json to_json(const TuneupReport& r) {
  return {{"mode", mode_name(r.mode)},
          {"n_params", r.n_params},
          {"start", to_json(r.start)},
          {"final_params", to_json(r.final_params)},
          {"final_cost", r.final_cost},
          {"n_iterations", r.n_iterations},
          {"simulated_time_s", r.simulated_time},
          {"step_boundary", r.step_boundary},
          {"converged", {r.converged[0], r.converged[1]}},
          {"budget_exhausted", {r.budget_exhausted[0], r.budget_exhausted[1]}}};
}

inline std::string trajectory_csv(const TuneupReport& r, const Provenance& prov) {
  CsvWriter csv(prov, {"iteration", "step", "a_g", "a_d", "f_detuning_hz", "epsilon"});
  for (const auto& t : r.trajectory)
    csv.row({std::to_string(t.iteration), std::to_string(t.step), fmt(t.params.a_g), fmt(t.params.a_d),
             fmt(t.params.f_detuning), fmt(t.epsilon)});
  return csv.str();
}

inline json sequences_to_json(const std::vector<CliffordSequence>& seqs) {
  json out = json::array();
  for (const auto& s : seqs) {
    json idx = json::array(), labels = json::array();
    for (const auto& e : s.elements) idx.push_back(e.index);
    for (Gate g : s.gate_program) labels.push_back(gate_name(g));
    out.push_back({{"seed", s.seed}, {"n_cliffords", s.n_cliffords}, {"net_op", net_op_name(s.net_op)},
                   {"element_indices", idx}, {"gate_labels", labels}});
  }
  return out;
}

inline std::string t1_series_csv(const T1Series& s, const Provenance& prov) {
  CsvWriter csv(prov, {"time_s", "t1_s"});
  for (std::size_t i = 0; i < s.values.size(); ++i) csv.row({fmt(static_cast<double>(i) * s.dt), fmt(s.values[i])});
  return csv.str();
}

/// Reads (time_s, t1_s) rows, skipping '#' comments and the header.
inline T1Series read_t1_series_csv(const std::string& text, std::size_t segment_length) {
  std::istringstream in(text);
  std::string line;
  std::vector<double> t, v;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("t1 series: malformed row '" + line + "'");
    t.push_back(std::stod(line.substr(0, comma)));
    v.push_back(std::stod(line.substr(comma + 1)));
  }
  if (t.size() < 2) throw std::runtime_error("t1 series: need at least 2 samples");
  T1Series s;
  s.dt = t[1] - t[0];
  s.segment_length = segment_length;
  s.values = v;
  return s;
}

inline std::string psd_csv(const PsdEstimate& psd, const Provenance& prov) {
  CsvWriter csv(prov, {"freq_hz", "psd_s2_per_hz"});
  for (std::size_t i = 0; i < psd.frequencies.size(); ++i) csv.row({fmt(psd.frequencies[i]), fmt(psd.s_t1[i])});
  return csv.str();
}

// ---------------------------------------------------------------------------
// GST gate-set files: {label: 16 row-major floats}

inline GateSet gate_set_from_json(const json& j) {
  if (!j.is_object()) throw std::runtime_error("gate set: expected a JSON object");
  GateSet gs;
  for (Gate g : kGateSetLabels) {
    const std::string label(gate_name(g));
    if (!j.contains(label)) throw std::runtime_error("gate set: missing label " + label);
    const auto& arr = j[label];
    if (!arr.is_array() || arr.size() != 16) throw std::runtime_error("gate set: " + label + " needs 16 numbers");
    for (int k = 0; k < 16; ++k) {
      if (!arr[static_cast<std::size_t>(k)].is_number())
        throw std::runtime_error("gate set: " + label + " has a non-numeric entry");
      gs[g][k / 4][k % 4] = arr[static_cast<std::size_t>(k)].get<double>();
    }
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (Gate g : kGateSetLabels) known = known || it.key() == gate_name(g);
    if (!known) throw std::runtime_error("gate set: unknown label " + it.key());
  }
  return gs;
}

inline json gate_set_to_json(const GateSet& gs) {
  json j = json::object();
  for (Gate g : kGateSetLabels) {
    json arr = json::array();
    for (const auto& row : gs[g])
      for (double v : row) arr.push_back(v);
    j[std::string(gate_name(g))] = arr;
  }
  return j;
}

inline json to_json(const CliffordFidelity& f) {
  json pn = json::array();
  for (const auto& p : f.p_n) pn.push_back(p ? json(*p) : json(nullptr));
  return {{"p_n", pn}, {"p_cl", f.p_cl}, {"f_cl", f.f_cl}, {"warnings", f.warnings}};
}

// ---------------------------------------------------------------------------
// Packed-bit stream: "RSTLBITS", u32 LE header length, JSON header, then
// ceil(N / 8) bytes, bit i of the stream at byte i / 8, bit i % 8 (LSB first).

inline constexpr char kStreamMagic[8] = {'R', 'S', 'T', 'L', 'B', 'I', 'T', 'S'};

inline std::string pack_stream(const ShotStream& s, const std::string& cfg_hash) {
  const std::string header = json{{"mode", mode_name(s.mode)}, {"N", s.bits.size()}, {"N_Cl", s.n_cliffords},
                                  {"seed", s.seed}, {"config_hash", cfg_hash}}
                                 .dump();
  std::string out(kStreamMagic, 8);
  const auto len = static_cast<std::uint32_t>(header.size());
  for (int k = 0; k < 4; ++k) out += static_cast<char>((len >> (8 * k)) & 0xffu);
  out += header;
  std::string bytes((s.bits.size() + 7) / 8, '\0');
  for (std::size_t i = 0; i < s.bits.size(); ++i)
    if (s.bits[i]) bytes[i / 8] = static_cast<char>(static_cast<unsigned char>(bytes[i / 8]) | (1u << (i % 8)));
  return out + bytes;
}

struct PackedStream {
  ShotStream stream;
  std::string config_hash;
};

inline PackedStream unpack_stream(const std::string& data) {
  if (data.size() < 12 || data.compare(0, 8, std::string(kStreamMagic, 8)) != 0)
    throw std::runtime_error("packed stream: bad magic");
  std::uint32_t len = 0;
  for (int k = 0; k < 4; ++k) len |= static_cast<std::uint32_t>(static_cast<unsigned char>(data[8 + k])) << (8 * k);
  if (data.size() < 12 + static_cast<std::size_t>(len)) throw std::runtime_error("packed stream: truncated header");
  const json h = json::parse(data.substr(12, len));
  PackedStream ps;
  const std::string mode = h.at("mode");
  if (mode != "restless" && mode != "conventional") throw std::runtime_error("packed stream: unknown mode " + mode);
  ps.stream.mode = mode == "restless" ? Mode::Restless : Mode::Conventional;
  ps.stream.n_cliffords = h.at("N_Cl");
  ps.stream.seed = h.at("seed");
  ps.config_hash = h.at("config_hash");
  const std::size_t n = h.at("N");
  const std::size_t off = 12 + len;
  if (data.size() != off + (n + 7) / 8) throw std::runtime_error("packed stream: payload size mismatch");
  ps.stream.bits.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    ps.stream.bits[i] = (static_cast<unsigned char>(data[off + i / 8]) >> (i % 8)) & 1u;
  return ps;
}

}  // namespace restless
