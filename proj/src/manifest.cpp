#include "ibptc/manifest.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>

namespace ibptc {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::TP: return "tp";
    case Variant::TB: return "tb";
    case Variant::C: return "c";
  }
  return "tp";
}

std::string to_string(CodeRate r) {
  return r == CodeRate::R13 ? "1/3" : "1/2";
}

std::string to_string(SisoAlgo a) {
  return a == SisoAlgo::LogMAP ? "logmap" : "maxlog";
}

std::string to_string(IntraKind k) {
  switch (k) {
    case IntraKind::SRandom: return "srandom";
    case IntraKind::Rectangular: return "rect";
    case IntraKind::Identity: return "identity";
    case IntraKind::File: return "file";
  }
  return "srandom";
}

std::string to_string(BoundaryMode b) {
  return b == BoundaryMode::Wrap ? "wrap" : "clamp";
}

Variant variant_from_string(const std::string& s) {
  if (s == "tp") return Variant::TP;
  if (s == "tb") return Variant::TB;
  if (s == "c") return Variant::C;
  throw std::invalid_argument("unknown variant: " + s);
}

CodeRate rate_from_string(const std::string& s) {
  if (s == "1/3") return CodeRate::R13;
  if (s == "1/2") return CodeRate::R12;
  throw std::invalid_argument("unknown rate: " + s);
}

SisoAlgo algo_from_string(const std::string& s) {
  if (s == "logmap") return SisoAlgo::LogMAP;
  if (s == "maxlog") return SisoAlgo::MaxLogMAP;
  throw std::invalid_argument("unknown algo: " + s);
}

IntraKind intra_from_string(const std::string& s) {
  if (s == "srandom") return IntraKind::SRandom;
  if (s == "rect") return IntraKind::Rectangular;
  if (s == "identity") return IntraKind::Identity;
  if (s == "file") return IntraKind::File;
  throw std::invalid_argument("unknown intra kind: " + s);
}

BoundaryMode boundary_from_string(const std::string& s) {
  if (s == "wrap") return BoundaryMode::Wrap;
  if (s == "clamp") return BoundaryMode::Clamp;
  throw std::invalid_argument("unknown boundary mode: " + s);
}

nlohmann::json to_json(const TurboConfig& cfg) {
  nlohmann::json j;
  j["generator"] = {{"feedback_taps", cfg.generator.feedback_taps},
                    {"forward_taps", cfg.generator.forward_taps},
                    {"memory", cfg.generator.memory}};
  j["interleaver"] = {
      {"intra", to_string(cfg.interleaver.intra)},
      {"spread", cfg.interleaver.spread},
      {"seed", cfg.interleaver.seed},
      {"rect_rows", cfg.interleaver.rect_rows},
      {"path", cfg.interleaver.path},
      {"ibp",
       {{"block_len", cfg.interleaver.ibp.block_len},
        {"span", cfg.interleaver.ibp.span},
        {"period", cfg.interleaver.ibp.period},
        {"step", cfg.interleaver.ibp.step},
        {"num_blocks", cfg.interleaver.ibp.num_blocks},
        {"boundary", to_string(cfg.interleaver.ibp.boundary)}}}};
  j["rate"] = to_string(cfg.rate);
  j["variant"] = to_string(cfg.variant);
  j["iterations"] = cfg.iterations;
  j["decoder"] = {{"algo", to_string(cfg.decoder_mode.algo)}};
  if (cfg.decoder_mode.window) {
    j["decoder"]["window"] = cfg.decoder_mode.window->window_len;
    j["decoder"]["warmup"] = cfg.decoder_mode.window->warmup_len;
  }
  return j;
}

TurboConfig turbo_config_from_json(const nlohmann::json& j) {
  TurboConfig cfg;
  const auto& g = j.at("generator");
  cfg.generator.feedback_taps = g.at("feedback_taps").get<unsigned>();
  cfg.generator.forward_taps = g.at("forward_taps").get<unsigned>();
  cfg.generator.memory = g.at("memory").get<int>();
  const auto& il = j.at("interleaver");
  cfg.interleaver.intra = intra_from_string(il.at("intra").get<std::string>());
  cfg.interleaver.spread = il.at("spread").get<int>();
  cfg.interleaver.seed = il.at("seed").get<std::uint64_t>();
  cfg.interleaver.rect_rows = il.at("rect_rows").get<int>();
  cfg.interleaver.path = il.at("path").get<std::string>();
  const auto& ibp = il.at("ibp");
  cfg.interleaver.ibp.block_len = ibp.at("block_len").get<int>();
  cfg.interleaver.ibp.span = ibp.at("span").get<int>();
  cfg.interleaver.ibp.period = ibp.at("period").get<int>();
  cfg.interleaver.ibp.step = ibp.at("step").get<int>();
  cfg.interleaver.ibp.num_blocks = ibp.at("num_blocks").get<int>();
  cfg.interleaver.ibp.boundary =
      boundary_from_string(ibp.at("boundary").get<std::string>());
  cfg.rate = rate_from_string(j.at("rate").get<std::string>());
  cfg.variant = variant_from_string(j.at("variant").get<std::string>());
  cfg.iterations = j.at("iterations").get<int>();
  const auto& d = j.at("decoder");
  cfg.decoder_mode.algo = algo_from_string(d.at("algo").get<std::string>());
  if (d.contains("window")) {
    cfg.decoder_mode.window =
        WindowSpec{d.at("window").get<int>(), d.at("warmup").get<int>()};
  }
  return cfg;
}

void save_manifest(const RunManifest& m, const std::string& path) {
  nlohmann::json j;
  j["command"] = m.command;
  j["config"] = m.config;
  j["experiment"] = m.experiment;
  j["master_seed"] = m.master_seed;
  j["tool_version"] = m.tool_version;
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  j["timing"] = m.timing;
  j["output"] = m.output;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << j.dump(2) << '\n';
}

RunManifest load_manifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  is >> j;
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.config = j.value("config", nlohmann::json::object());
  m.experiment = j.value("experiment", nlohmann::json::object());
  m.master_seed = j.at("master_seed").get<std::uint64_t>();
  m.tool_version = j.value("tool_version", std::string());
  m.started_at = j.value("started_at", std::string());
  m.finished_at = j.value("finished_at", std::string());
  m.timing = j.value("timing", nlohmann::json::object());
  m.output = j.value("output", std::string());
  return m;
}

std::string manifest_path_for(const std::string& output_path) {
  return output_path + ".manifest.json";
}

std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace ibptc
