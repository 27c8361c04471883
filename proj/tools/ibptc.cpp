#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ibptc/analysis.hpp"
#include "ibptc/interleave.hpp"
#include "ibptc/manifest.hpp"
#include "ibptc/rng.hpp"
#include "ibptc/turbo.hpp"

namespace {

using namespace ibptc;

// "a:step:b" (inclusive of b when it lands on the grid) or a single value.
std::vector<double> parse_grid(const std::string& text, const char* flag) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ':')) parts.push_back(item);
  try {
    if (parts.size() == 1) return {std::stod(parts[0])};
    if (parts.size() == 3) {
      const double a = std::stod(parts[0]);
      const double step = std::stod(parts[1]);
      const double b = std::stod(parts[2]);
      require(step > 0.0, std::string(flag) + ": grid step must be positive");
      require(a <= b + 1e-12, std::string(flag) + ": grid start exceeds stop");
      std::vector<double> grid;
      const double slack = 1e-9 * std::max(1.0, std::abs(b));
      for (long i = 0;; ++i) {
        const double v = a + i * step;
        if (v > b + slack) break;
        grid.push_back(v);
      }
      return grid;
    }
  } catch (const std::invalid_argument&) {
  } catch (const std::out_of_range&) {
  }
  throw std::invalid_argument(std::string(flag) +
                              ": expected a number or start:step:stop");
}

struct CodecFlags {
  int block_len = 0;
  int span = 0;
  int period = 0;
  int step = 1;
  int stream_blocks = 20;
  std::string boundary = "wrap";
  std::string intra = "srandom";
  int spread = 0;
  int rect_rows = 0;
  std::string intra_file;
  std::string rate = "1/3";
  std::string variant = "tp";
  std::string algo = "logmap";
  int iters = 10;
  int window = 0;
  int warmup = -1;

  void add_to(CLI::App* c) {
    c->add_option("--block-len", block_len, "block length L in bits")
        ->required()
        ->check(CLI::PositiveNumber);
    c->add_option("--span", span, "inter-block span S")->check(CLI::NonNegativeNumber);
    c->add_option("--period", period, "displacement period T_s (0 = 2S+1)")
        ->check(CLI::NonNegativeNumber);
    c->add_option("--step", step, "displacement step, coprime to 2S+1");
    c->add_option("--stream-blocks", stream_blocks, "blocks per stream frame B")
        ->check(CLI::PositiveNumber);
    c->add_option("--boundary", boundary, "stream edge handling")
        ->check(CLI::IsMember({"wrap", "clamp"}));
    c->add_option("--intra", intra, "intra-block permutation kind")
        ->check(CLI::IsMember({"srandom", "rect", "identity", "file"}));
    c->add_option("--spread", spread, "s-random spread (0 = 85% of sqrt(L/2))")
        ->check(CLI::NonNegativeNumber);
    c->add_option("--rect-rows", rect_rows, "rows of the rectangular intra map");
    c->add_option("--intra-file", intra_file, "permutation file for --intra file");
    c->add_option("--rate", rate, "code rate")->check(CLI::IsMember({"1/3", "1/2"}));
    c->add_option("--variant", variant, "stream termination variant")
        ->check(CLI::IsMember({"tp", "tb", "c"}));
    c->add_option("--iters", iters, "decoder iterations")->check(CLI::PositiveNumber);
    c->add_option("--algo", algo, "APP algorithm")
        ->check(CLI::IsMember({"logmap", "maxlog"}));
    c->add_option("--window", window, "sliding window length (continuous variant)")
        ->check(CLI::NonNegativeNumber);
    c->add_option("--warmup", warmup, "sliding window warmup (default: window)");
  }

  TurboConfig to_config(std::uint64_t master_seed) const {
    TurboConfig cfg;
    cfg.interleaver.intra = intra_from_string(intra);
    cfg.interleaver.spread = spread;
    cfg.interleaver.seed = mix64(master_seed ^ 1);  // derived: one seed knob
    cfg.interleaver.rect_rows = rect_rows;
    cfg.interleaver.path = intra_file;
    cfg.interleaver.ibp.block_len = block_len;
    cfg.interleaver.ibp.span = span;
    cfg.interleaver.ibp.period = period;
    cfg.interleaver.ibp.step = step;
    cfg.interleaver.ibp.num_blocks = stream_blocks;
    cfg.interleaver.ibp.boundary = boundary_from_string(boundary);
    cfg.rate = rate_from_string(rate);
    cfg.variant = variant_from_string(variant);
    cfg.iterations = iters;
    cfg.decoder_mode.algo = algo_from_string(algo);
    if (window > 0) {
      cfg.decoder_mode.window = WindowSpec{window, warmup >= 0 ? warmup : window};
    }
    cfg.validate();
    return cfg;
  }
};

void write_file(const std::string& path, const std::string& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << body;
}

RunManifest base_manifest(const std::string& command, const TurboConfig* cfg,
                          std::uint64_t master_seed, const std::string& output,
                          const std::string& started) {
  RunManifest m;
  m.command = command;
  if (cfg) m.config = to_json(*cfg);
  m.master_seed = master_seed;
  m.started_at = started;
  m.output = output;
  return m;
}

int do_ber(const TurboConfig& cfg, const std::vector<double>& grid,
           const StopRule& stop, std::uint64_t master_seed,
           const std::string& out) {
  const std::string started = utc_timestamp();
  const auto results = run_ber(cfg, grid, stop, master_seed);

  std::ostringstream csv;
  csv << "ebn0_db,bits,bit_errors,ber,frames,frame_errors,fer,mean_iters\n";
  for (const auto& r : results) {
    csv << csv_double(r.ebn0_db) << ',' << r.bits << ',' << r.bit_errors << ','
        << csv_double(r.ber) << ',' << r.frames << ',' << r.frame_errors << ','
        << csv_double(r.fer) << ',' << csv_double(r.mean_iterations) << '\n';
  }
  write_file(out, csv.str());

  RunManifest m = base_manifest("ber", &cfg, master_seed, out, started);
  m.experiment = {{"ebn0_grid", grid},
                  {"max_blocks", stop.max_blocks},
                  {"min_bit_errors", stop.min_bit_errors}};
  double total = 0;
  std::vector<double> secs;
  std::vector<bool> under;
  for (const auto& r : results) {
    total += r.wall_seconds;
    secs.push_back(r.wall_seconds);
    under.push_back(r.undersampled);
  }
  m.timing = {{"point_seconds", secs},
              {"total_seconds", total},
              {"undersampled", under}};
  m.finished_at = utc_timestamp();
  save_manifest(m, manifest_path_for(out));
  return 0;
}

int do_exit(const TurboConfig& cfg, double ebn0_db,
            const std::vector<double>& ia_grid, long samples,
            std::uint64_t master_seed, const std::string& out) {
  const std::string started = utc_timestamp();
  const auto points = exit_chart(cfg, ebn0_db, ia_grid, samples, master_seed);

  std::ostringstream csv;
  csv << "ia,ie,snr_db,constituent\n";
  for (const auto& p : points) {
    csv << csv_double(p.ia) << ',' << csv_double(p.ie) << ','
        << csv_double(p.snr_db) << ',' << (p.constituent + 1) << '\n';
  }
  write_file(out, csv.str());

  RunManifest m = base_manifest("exit", &cfg, master_seed, out, started);
  m.experiment = {{"ebn0_db", ebn0_db},
                  {"ia_grid", ia_grid},
                  {"samples_per_point", samples}};
  m.finished_at = utc_timestamp();
  save_manifest(m, manifest_path_for(out));
  return 0;
}

int do_evolve(bool covariance, const TurboConfig& cfg, double ebn0_db,
              int trials, const std::string& which, std::uint64_t master_seed,
              const std::string& out) {
  const std::string started = utc_timestamp();
  const EvolutionTrace trace = covariance
                                   ? extrinsic_covariance(cfg, ebn0_db, trials, master_seed)
                                   : snr_evolution(cfg, ebn0_db, trials, master_seed);

  std::ostringstream csv;
  csv << "iteration,value,constituent\n";
  auto emit = [&](int c) {
    const auto& vals = covariance ? trace.corr[c] : trace.snr[c];
    for (std::size_t it = 0; it < vals.size(); ++it) {
      csv << (it + 1) << ',' << csv_double(vals[it]) << ',' << (c + 1) << '\n';
    }
  };
  if (which == "both") {
    emit(0);
    emit(1);
  } else {
    emit(which == "1" ? 0 : 1);
  }
  write_file(out, csv.str());

  RunManifest m = base_manifest(covariance ? "cov" : "evolve", &cfg, master_seed,
                                out, started);
  m.experiment = {{"ebn0_db", ebn0_db},
                  {"trials", trials},
                  {"constituent", which}};
  m.finished_at = utc_timestamp();
  save_manifest(m, manifest_path_for(out));
  return 0;
}

int do_interleaver_generate(int len, int spread, std::uint64_t seed,
                            const std::string& out) {
  const std::string started = utc_timestamp();
  const Permutation p = make_srandom(len, spread, seed);
  save_permutation(p, out);
  RunManifest m = base_manifest("interleaver-generate", nullptr, seed, out, started);
  m.experiment = {{"len", len}, {"spread", spread}};
  m.finished_at = utc_timestamp();
  save_manifest(m, manifest_path_for(out));
  return 0;
}

int do_interleaver_compose(const CodecFlags& flags, std::uint64_t master_seed,
                           const std::string& out) {
  const std::string started = utc_timestamp();
  const TurboConfig cfg = flags.to_config(master_seed);
  const TurboCodec codec(cfg);
  const StreamPermutation& sp = codec.stream_perm();
  save_permutation(sp.perm, out);
  std::cout << "stream permutation: " << sp.perm.size() << " indices, span "
            << sp.span << ", srid_bits " << sp.srid_bits << ", clamp repairs "
            << sp.clamp_repairs << '\n';
  RunManifest m = base_manifest("interleaver-compose", &cfg, master_seed, out, started);
  m.finished_at = utc_timestamp();
  save_manifest(m, manifest_path_for(out));
  return 0;
}

int do_interleaver_validate(const std::string& file, int spread, int block_len,
                            int span, const std::string& boundary) {
  const Permutation p = load_permutation(file);  // throws with line number
  bool all_ok = true;
  std::cout << "bijectivity: pass (" << p.size() << " indices)\n";
  if (spread > 0) {
    const bool ok = check_spread(p, spread);
    std::cout << "spread >= " << spread << ": " << (ok ? "pass" : "FAIL") << '\n';
    all_ok = all_ok && ok;
  }
  if (block_len > 0) {
    require(p.size() % block_len == 0, "--block-len must divide the file length");
    const int d = max_block_displacement(p, block_len,
                                         boundary_from_string(boundary));
    const bool ok = span < 0 || d <= span;
    std::cout << "max block displacement: " << d;
    if (span >= 0) std::cout << " (bound " << span << "): " << (ok ? "pass" : "FAIL");
    std::cout << '\n';
    all_ok = all_ok && ok;
  }
  return all_ok ? 0 : 1;
}

int do_replay(const std::string& manifest_file, std::string out) {
  const RunManifest m = load_manifest(manifest_file);
  if (out.empty()) out = m.output;
  require(!out.empty(), "manifest has no output path; pass -o");
  const auto& e = m.experiment;
  if (m.command == "ber") {
    StopRule stop{e.at("max_blocks").get<long>(),
                  e.at("min_bit_errors").get<long>()};
    return do_ber(turbo_config_from_json(m.config),
                  e.at("ebn0_grid").get<std::vector<double>>(), stop,
                  m.master_seed, out);
  }
  if (m.command == "exit") {
    return do_exit(turbo_config_from_json(m.config), e.at("ebn0_db").get<double>(),
                   e.at("ia_grid").get<std::vector<double>>(),
                   e.at("samples_per_point").get<long>(), m.master_seed, out);
  }
  if (m.command == "evolve" || m.command == "cov") {
    return do_evolve(m.command == "cov", turbo_config_from_json(m.config),
                     e.at("ebn0_db").get<double>(), e.at("trials").get<int>(),
                     e.value("constituent", std::string("2")), m.master_seed, out);
  }
  if (m.command == "interleaver-generate") {
    return do_interleaver_generate(e.at("len").get<int>(),
                                   e.at("spread").get<int>(), m.master_seed, out);
  }
  if (m.command == "interleaver-compose") {
    const TurboConfig cfg = turbo_config_from_json(m.config);
    const std::string started = utc_timestamp();
    const TurboCodec codec(cfg);
    save_permutation(codec.stream_perm().perm, out);
    RunManifest nm = base_manifest("interleaver-compose", &cfg, m.master_seed,
                                   out, started);
    nm.finished_at = utc_timestamp();
    save_manifest(nm, manifest_path_for(out));
    return 0;
  }
  throw std::invalid_argument("manifest command not replayable: " + m.command);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"inter-block-permutation turbo code laboratory"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  int rc = 0;

  // ber
  auto* ber = app.add_subcommand("ber", "Monte-Carlo BER/FER sweep");
  CodecFlags ber_flags;
  ber_flags.add_to(ber);
  std::string ber_grid = "0.0:0.5:2.0";
  long ber_blocks = 1000, ber_min_errors = 100;
  std::uint64_t ber_seed = 1;
  std::string ber_out = "ber.csv";
  ber->add_option("--ebn0", ber_grid, "Eb/N0 grid, dB (start:step:stop or value)");
  ber->add_option("--blocks", ber_blocks, "block budget per grid point")
      ->check(CLI::PositiveNumber);
  ber->add_option("--min-errors", ber_min_errors, "stop point after this many bit errors")
      ->check(CLI::PositiveNumber);
  ber->add_option("--seed", ber_seed, "master seed");
  ber->add_option("-o,--output", ber_out, "CSV path");
  ber->callback([&] {
    rc = do_ber(ber_flags.to_config(ber_seed), parse_grid(ber_grid, "--ebn0"),
                StopRule{ber_blocks, ber_min_errors}, ber_seed, ber_out);
  });

  // exit
  auto* exit_cmd = app.add_subcommand("exit", "extrinsic-information transfer curve");
  CodecFlags exit_flags;
  exit_flags.add_to(exit_cmd);
  std::string exit_ia = "0.0:0.1:0.9", exit_out = "exit.csv";
  double exit_ebn0 = 0.5;
  long exit_samples = 100000;
  std::uint64_t exit_seed = 1;
  exit_cmd->add_option("--ebn0", exit_ebn0, "channel Eb/N0, dB");
  exit_cmd->add_option("--ia", exit_ia, "a-priori mutual information grid");
  exit_cmd->add_option("--samples", exit_samples, "bits per grid point")
      ->check(CLI::PositiveNumber);
  exit_cmd->add_option("--seed", exit_seed, "master seed");
  exit_cmd->add_option("-o,--output", exit_out, "CSV path");
  exit_cmd->callback([&] {
    rc = do_exit(exit_flags.to_config(exit_seed), exit_ebn0,
                 parse_grid(exit_ia, "--ia"), exit_samples, exit_seed, exit_out);
  });

  // evolve / cov
  auto* evolve = app.add_subcommand("evolve", "per-iteration extrinsic SNR trace");
  auto* cov = app.add_subcommand("cov", "per-iteration a-priori/extrinsic correlation");
  struct EvolveArgs {
    CodecFlags flags;
    double ebn0 = 0.5;
    int trials = 50;
    std::string constituent = "2";
    std::uint64_t seed = 1;
    std::string out;
  };
  EvolveArgs ev{{}, 0.5, 50, "2", 1, "evolve.csv"};
  EvolveArgs cv{{}, 0.5, 50, "2", 1, "cov.csv"};
  for (auto [cmd, args] : {std::pair{evolve, &ev}, std::pair{cov, &cv}}) {
    args->flags.add_to(cmd);
    cmd->add_option("--ebn0", args->ebn0, "channel Eb/N0, dB");
    cmd->add_option("--trials", args->trials, "stream frames to pool")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--constituent", args->constituent, "which decoder's trace")
        ->check(CLI::IsMember({"1", "2", "both"}));
    cmd->add_option("--seed", args->seed, "master seed");
    cmd->add_option("-o,--output", args->out, "CSV path");
  }
  evolve->callback([&] {
    rc = do_evolve(false, ev.flags.to_config(ev.seed), ev.ebn0, ev.trials,
                   ev.constituent, ev.seed, ev.out);
  });
  cov->callback([&] {
    rc = do_evolve(true, cv.flags.to_config(cv.seed), cv.ebn0, cv.trials,
                   cv.constituent, cv.seed, cv.out);
  });

  // interleaver
  auto* il = app.add_subcommand("interleaver", "permutation construction and checking");
  il->require_subcommand(1);

  auto* gen = il->add_subcommand("generate", "build an s-random permutation");
  int gen_len = 0, gen_spread = 1;
  std::uint64_t gen_seed = 1;
  std::string gen_out = "perm.txt";
  gen->add_option("--len", gen_len, "permutation length")->required()
      ->check(CLI::PositiveNumber);
  gen->add_option("--spread", gen_spread, "s-random spread")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "construction seed");
  gen->add_option("-o,--output", gen_out, "output file");
  gen->callback([&] { rc = do_interleaver_generate(gen_len, gen_spread, gen_seed, gen_out); });

  auto* val = il->add_subcommand("validate", "check a permutation file");
  std::string val_file, val_boundary = "wrap";
  int val_spread = 0, val_block_len = 0, val_span = -1;
  val->add_option("--file", val_file, "permutation file")->required();
  val->add_option("--spread", val_spread, "check the s-random spread rule");
  val->add_option("--block-len", val_block_len, "treat as B blocks of this length");
  val->add_option("--span", val_span, "block displacement bound to enforce");
  val->add_option("--boundary", val_boundary)->check(CLI::IsMember({"wrap", "clamp"}));
  val->callback([&] {
    rc = do_interleaver_validate(val_file, val_spread, val_block_len, val_span,
                                 val_boundary);
  });

  auto* comp = il->add_subcommand("compose", "export a composite stream permutation");
  CodecFlags comp_flags;
  comp_flags.add_to(comp);
  std::uint64_t comp_seed = 1;
  std::string comp_out = "stream_perm.txt";
  comp->add_option("--seed", comp_seed, "master seed");
  comp->add_option("-o,--output", comp_out, "output file");
  comp->callback([&] { rc = do_interleaver_compose(comp_flags, comp_seed, comp_out); });

  // replay
  auto* rep = app.add_subcommand("replay", "re-run a manifest bit-exactly");
  std::string rep_manifest, rep_out;
  rep->add_option("manifest", rep_manifest, "manifest JSON path")->required();
  rep->add_option("-o,--output", rep_out, "override the output path");
  rep->callback([&] { rc = do_replay(rep_manifest, rep_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return rc;
}
