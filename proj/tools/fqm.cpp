#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fqm/experiment.hpp"

namespace {

struct OutputPaths {
  std::string json;
  std::string csv;
};

void add_scheme_flags(CLI::App* cmd, fqm::ExperimentConfig& cfg) {
  cmd->add_option("--scheme", cfg.scheme, "scheme: simple or full")->capture_default_str();
  cmd->add_option("--n", cfg.n, "ambient dimension (multiple of 4)")->capture_default_str();
  cmd->add_option_function<std::size_t>(
      "--t", [&cfg](std::size_t v) { cfg.t = v; }, "indices drawn per key side");
  cmd->add_option_function<std::size_t>(
      "--big-n", [&cfg](std::size_t v) { cfg.big_n = v; }, "franchise id space size");
  cmd->add_option_function<std::size_t>(
      "--collusion-c", [&cfg](std::size_t v) { cfg.collusion_c = v; },
      "colluding key budget");
  cmd->add_option("--crypto", cfg.crypto, "crypto suite: test or openssl (full scheme)")
      ->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "master seed")->capture_default_str();
}

void add_run_flags(CLI::App* cmd, fqm::ExperimentConfig& cfg, OutputPaths& out) {
  cmd->add_option("--backend", cfg.backend, "state backend: symbolic or dense")
      ->capture_default_str();
  cmd->add_option("--trials", cfg.trials, "independent trials")->capture_default_str();
  cmd->add_option("--threads", cfg.threads, "worker threads")->capture_default_str();
  cmd->add_flag("--timing", cfg.timing, "record per-trial wall time in the CSV");
  cmd->add_option("--out-json", out.json, "write the JSON report to this path");
  cmd->add_option("--out-csv", out.csv, "write the per-trial CSV table to this path");
}

int run_game(const fqm::ExperimentConfig& cfg, const OutputPaths& out) {
  const fqm::GameResult result = fqm::run_experiment(cfg);
  const std::string json = fqm::report_json(result).dump(2) + "\n";
  std::cout << json;
  if (!out.json.empty()) fqm::write_text_file(out.json, json);
  if (!out.csv.empty()) fqm::write_text_file(out.csv, fqm::to_csv(result));
  return 0;
}

void check_scheme_and_backend(const fqm::ExperimentConfig& cfg) {
  if (cfg.scheme != "simple" && cfg.scheme != "full") {
    throw fqm::ConfigError("scheme", "must be 'simple' or 'full'");
  }
  if (cfg.backend != "symbolic" && cfg.backend != "dense") {
    throw fqm::ConfigError("backend", "must be 'symbolic' or 'dense'");
  }
  if (cfg.backend == "dense" && cfg.n > fqm::kDenseQubitCap) {
    throw fqm::ConfigError(
        "n", "dense backend caps n at " + std::to_string(fqm::kDenseQubitCap));
  }
}

int run_mint(const fqm::ExperimentConfig& cfg, const std::string& note_path) {
  check_scheme_and_backend(cfg);
  nlohmann::json status;
  if (cfg.scheme == "simple") {
    if (cfg.backend != "symbolic") {
      throw fqm::ConfigError("backend", "simple-scheme note files hold symbolic states only");
    }
    const fqm::SimpleParams p = cfg.simple_params();
    fqm::Rng master(cfg.seed);
    const fqm::SimpleMsk msk = fqm::setup(p, master);
    fqm::write_text_file(note_path, fqm::simple_note_to_text(fqm::mint(msk)));
  } else {
    const fqm::FullParams p = cfg.full_params();
    const fqm::CryptoSuite& crypto = fqm::crypto_by_name(cfg.crypto);
    fqm::Rng master(cfg.seed);
    const fqm::FullMsk msk = fqm::setup(p, crypto, master);
    fqm::Rng mint_rng = master.child(fqm::kMintStream);
    const fqm::FullBanknote note =
        cfg.backend == "dense" ? fqm::mint_dense(msk, mint_rng) : fqm::mint(msk, mint_rng);
    fqm::write_binary_file(note_path, fqm::serialize(note));
  }
  status["path"] = note_path;
  status["scheme"] = cfg.scheme;
  status["backend"] = cfg.backend;
  status["n"] = cfg.n;
  std::cout << status.dump(2) << "\n";
  return 0;
}

int run_franchise(const fqm::ExperimentConfig& cfg, std::size_t id,
                  const std::string& key_path) {
  check_scheme_and_backend(cfg);
  if (cfg.scheme == "simple") {
    const fqm::SimpleParams p = cfg.simple_params();
    if (id >= p.big_n) {
      throw fqm::ConfigError("id", "must be below big_n = " + std::to_string(p.big_n));
    }
    fqm::Rng master(cfg.seed);
    const fqm::SimpleMsk msk = fqm::setup(p, master);
    fqm::IdLedger ledger(p.big_n);
    fqm::write_text_file(key_path, fqm::simple_svk_to_json(fqm::franchise(msk, id, ledger)));
  } else {
    const fqm::FullParams p = cfg.full_params();
    const fqm::CryptoSuite& crypto = fqm::crypto_by_name(cfg.crypto);
    fqm::Rng master(cfg.seed);
    const fqm::FullMsk msk = fqm::setup(p, crypto, master);
    fqm::Rng key_rng = master.child(1 + id);
    fqm::write_binary_file(key_path, fqm::serialize_svk(fqm::franchise(msk, key_rng)));
  }
  nlohmann::json status;
  status["path"] = key_path;
  status["scheme"] = cfg.scheme;
  status["id"] = id;
  status["n"] = cfg.n;
  std::cout << status.dump(2) << "\n";
  return 0;
}

int run_verify(const std::string& scheme, const std::string& key_path,
               const std::string& note_path, std::uint64_t seed) {
  nlohmann::json verdict_json;
  fqm::Rng rng(seed);
  if (scheme == "simple") {
    const fqm::SimpleSvk svk = fqm::simple_svk_from_json(fqm::read_text_file(key_path));
    const fqm::SimpleBanknote note =
        fqm::simple_note_from_text(fqm::read_text_file(note_path));
    if (note.ambient_dim() != svk.ambient_dim) {
      throw fqm::ConfigError("note", "note dimension " + std::to_string(note.ambient_dim()) +
                                         " does not match key dimension " +
                                         std::to_string(svk.ambient_dim));
    }
    verdict_json["accepted"] = fqm::verify(svk, note, rng).accepted;
  } else if (scheme == "full") {
    const fqm::FullSvk svk = fqm::deserialize_svk(fqm::read_binary_file(key_path));
    const fqm::FullBanknote note = fqm::deserialize(fqm::read_binary_file(note_path));
    if (note.state.ambient_dim() != svk.n) {
      throw fqm::ConfigError("note",
                             "note dimension " + std::to_string(note.state.ambient_dim()) +
                                 " does not match key dimension " + std::to_string(svk.n));
    }
    const fqm::FullVerdict verdict = fqm::verify(svk, note, rng);
    verdict_json["accepted"] = verdict.accepted;
    verdict_json["reason"] = fqm::to_string(verdict.reason);
  } else {
    throw fqm::ConfigError("scheme", "must be 'simple' or 'full'");
  }
  std::cout << verdict_json.dump(2) << "\n";
  return 0;
}

int run_selftest_cmd() {
  bool all_passed = true;
  for (const fqm::SelfTestResult& r : fqm::run_selftest()) {
    if (r.passed) {
      std::cout << "[ok]   " << r.name << "\n";
    } else {
      std::cout << "[FAIL] " << r.name << ": " << r.detail << "\n";
      all_passed = false;
    }
  }
  std::cout << (all_passed ? "selftest passed\n" : "selftest FAILED\n");
  return all_passed ? 0 : 1;
}

int run_bench_cmd(std::size_t reps) {
  std::printf("%-28s %12s %6s\n", "kernel", "median_ms", "reps");
  for (const fqm::BenchRow& row : fqm::run_bench(reps)) {
    std::printf("%-28s %12.4f %6zu\n", row.name.c_str(), row.median_ms, row.reps);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"laboratory for franchised subspace-state banknotes"};
  app.set_version_flag("--version", "fqm 1.0.0");
  app.set_config("--config", "", "read option defaults from an INI/TOML file");
  app.require_subcommand(1);

  fqm::ExperimentConfig cfg;
  OutputPaths out;

  CLI::App* correctness =
      app.add_subcommand("correctness", "honest mint/franchise/verify loop");
  add_scheme_flags(correctness, cfg);
  add_run_flags(correctness, cfg, out);

  CLI::App* attack = app.add_subcommand("attack", "adversarial games");
  attack->require_subcommand(1);
  CLI::App* counterfeit =
      attack->add_subcommand("counterfeit", "submit more notes than were minted");
  CLI::App* sabotage =
      attack->add_subcommand("sabotage", "split two honest verifiers on one note");
  CLI::App* distinguish =
      attack->add_subcommand("distinguish", "tell the franchised oracle from the full one");
  for (CLI::App* game : {counterfeit, sabotage, distinguish}) {
    add_scheme_flags(game, cfg);
    add_run_flags(game, cfg, out);
    game->add_option("--adversary", cfg.adversary, "adversary strategy name");
  }
  counterfeit->add_option("--extra-dims", cfg.extra_dims,
                          "forged subspace dimensions beyond the pooled key span");
  counterfeit->add_option("--copies", cfg.copies, "forged notes per trial");
  counterfeit->add_option_function<std::size_t>(
      "--mints", [&cfg](std::size_t v) { cfg.mints = v; }, "mint queries per trial");
  sabotage->add_flag("--full-keys", cfg.full_keys,
                     "give both verifiers the bank's full key");
  distinguish->add_option("--queries", cfg.queries, "oracle queries per trial")
      ->capture_default_str();

  CLI::App* mint_cmd = app.add_subcommand("mint", "write one banknote to a file");
  add_scheme_flags(mint_cmd, cfg);
  mint_cmd->add_option("--backend", cfg.backend, "state backend: symbolic or dense")
      ->capture_default_str();
  std::string note_path;
  mint_cmd->add_option("--note", note_path, "output path for the banknote")->required();

  CLI::App* franchise_cmd =
      app.add_subcommand("franchise", "write one verification key to a file");
  add_scheme_flags(franchise_cmd, cfg);
  std::size_t franchise_id = 0;
  std::string key_path;
  franchise_cmd->add_option("--id", franchise_id, "key id (simple) or key index (full)")
      ->capture_default_str();
  franchise_cmd->add_option("--key", key_path, "output path for the key")->required();

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "check a banknote file against a key file");
  std::string verify_scheme = "simple";
  std::string verify_key, verify_note;
  std::uint64_t verify_seed = 0;
  verify_cmd->add_option("--scheme", verify_scheme, "scheme: simple or full")
      ->capture_default_str();
  verify_cmd->add_option("--key", verify_key, "verification key file")->required();
  verify_cmd->add_option("--note", verify_note, "banknote file")->required();
  verify_cmd->add_option("--seed", verify_seed, "seed for the verification draws")
      ->capture_default_str();

  CLI::App* selftest_cmd =
      app.add_subcommand("selftest", "run the built-in invariant checks");

  CLI::App* bench_cmd = app.add_subcommand("bench", "time the hot kernels");
  std::size_t bench_reps = 9;
  bench_cmd->add_option("--reps", bench_reps, "samples per kernel (median is reported)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);

    if (correctness->parsed()) {
      cfg.game = "correctness";
      return run_game(cfg, out);
    }
    if (attack->parsed()) {
      if (counterfeit->parsed()) cfg.game = "counterfeit";
      if (sabotage->parsed()) cfg.game = "sabotage";
      if (distinguish->parsed()) cfg.game = "distinguish";
      return run_game(cfg, out);
    }
    if (mint_cmd->parsed()) return run_mint(cfg, note_path);
    if (franchise_cmd->parsed()) return run_franchise(cfg, franchise_id, key_path);
    if (verify_cmd->parsed()) {
      return run_verify(verify_scheme, verify_key, verify_note, verify_seed);
    }
    if (selftest_cmd->parsed()) return run_selftest_cmd();
    if (bench_cmd->parsed()) return run_bench_cmd(bench_reps);
    return 0;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const fqm::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fqm::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
