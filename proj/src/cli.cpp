#include "clem/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "clem/instancegen.hpp"
#include "clem/pipeline.hpp"
#include "clem/serialize.hpp"

namespace fs = std::filesystem;

namespace clem {

#ifndef CLEM_DEFAULT_GAMES_DIR
#define CLEM_DEFAULT_GAMES_DIR "games"
#endif
#ifndef CLEM_DEFAULT_RESOURCES_DIR
#define CLEM_DEFAULT_RESOURCES_DIR "resources"
#endif

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

std::map<std::string, std::string> parse_config_file(const fs::path& path) {
  std::map<std::string, std::string> out;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto key = std::string(trim(std::string_view(line).substr(0, eq)));
    auto value = std::string(trim(std::string_view(line).substr(eq + 1)));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (!key.empty()) out[key] = value;
  }
  return out;
}

std::string resolve_setting(const std::string& key, const std::optional<std::string>& flag, const EnvLookup& env,
                            const std::map<std::string, std::string>& config, const std::string& fallback) {
  if (flag) return *flag;
  std::string env_name = "CLEM_" + key;
  std::transform(env_name.begin(), env_name.end(), env_name.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (auto v = env(env_name)) return *v;
  if (auto it = config.find(key); it != config.end()) return it->second;
  return fallback;
}

namespace {

struct CommonFlags {
  std::optional<std::string> config;
  std::optional<std::string> results_dir;
  std::optional<std::string> registry;
  std::optional<std::string> games_dir;
  std::optional<std::string> resources_dir;
};

struct Settings {
  fs::path results_dir;
  fs::path registry;
  fs::path games_dir;
  fs::path resources_dir;
  std::map<std::string, std::string> config;
};

Settings resolve(const CommonFlags& flags, const EnvLookup& env) {
  Settings s;
  std::optional<std::string> config_path = flags.config;
  if (!config_path) config_path = env("CLEM_CONFIG");
  std::error_code ec;
  if (!config_path && fs::is_regular_file("clem.conf", ec)) config_path = "clem.conf";
  if (config_path) s.config = parse_config_file(*config_path);
  s.results_dir = resolve_setting("results_dir", flags.results_dir, env, s.config, "results");
  s.registry = resolve_setting("registry", flags.registry, env, s.config, "model_registry.json");
  s.games_dir = resolve_setting("games_dir", flags.games_dir, env, s.config, CLEM_DEFAULT_GAMES_DIR);
  s.resources_dir = resolve_setting("resources_dir", flags.resources_dir, env, s.config, CLEM_DEFAULT_RESOURCES_DIR);
  return s;
}

class UsageError : public Error {
 public:
  using Error::Error;
};

int to_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    int v = std::stoi(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError("setting " + key + " must be an integer, got '" + value + "'");
}

std::vector<std::string> words_of(const fs::path& resource_path) {
  std::vector<std::string> words;
  for (const auto& e : load_word_resource(resource_path).entries) words.push_back(e.word);
  return words;
}

}  // namespace

int clem_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env) {
  CLI::App app{"Dialogue-game self-play benchmark runner", "clem"};
  app.require_subcommand(1);
  CommonFlags flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "key = value config file (default ./clem.conf)");
    sub->add_option("--results", flags.results_dir, "results directory [CLEM_RESULTS_DIR]");
    sub->add_option("--registry", flags.registry, "model registry file [CLEM_REGISTRY]");
    sub->add_option("--games-dir", flags.games_dir, "directory of game definitions [CLEM_GAMES_DIR]");
    sub->add_option("--resources-dir", flags.resources_dir, "word resources [CLEM_RESOURCES_DIR]");
  };

  auto* list = app.add_subcommand("list", "list games or models");
  std::string what;
  list->add_option("what", what, "games | models")->required()->check(CLI::IsMember({"games", "models"}));
  add_common(list);

  auto* run = app.add_subcommand("run", "play all selected instances");
  std::string game_arg;
  std::vector<std::string> model_args;
  std::optional<double> temperature;
  std::vector<std::string> experiments;
  std::optional<std::string> instances_file;
  std::uint64_t seed = 0;
  std::optional<std::string> parallel_flag;
  std::optional<std::string> reprompts_flag;
  bool strict = false;
  bool verbatim = false;
  bool wordle_dictionary = false;
  run->add_option("-g,--game", game_arg, "game name or 'all'")->required();
  run->add_option("-m,--model", model_args, "one model (self-play) or two, assigned to roles in order")
      ->required()
      ->expected(1, 2);
  run->add_option("-t,--temperature", temperature, "override every model's temperature");
  run->add_option("--experiments", experiments, "only these experiment names");
  run->add_option("--instances", instances_file, "instance file to play instead of the bundled one");
  run->add_option("--seed", seed, "seed recorded in every episode");
  run->add_option("--parallel", parallel_flag, "episodes in flight [CLEM_PARALLEL]");
  run->add_option("--max-reprompts", reprompts_flag, "reprompts after a format violation [CLEM_MAX_REPROMPTS]");
  run->add_flag("--strict", strict, "nonzero exit on backend/game errors; game errors stop the run");
  run->add_flag("--verbatim-relay", verbatim, "relay bare moves instead of templated messages");
  run->add_flag("--wordle-dictionary", wordle_dictionary, "reject Wordle guesses outside the word resource");
  add_common(run);

  auto* transcribe = app.add_subcommand("transcribe", "render transcript.html for each episode");
  add_common(transcribe);
  auto* score = app.add_subcommand("score", "write scores.json for each episode");
  add_common(score);
  auto* eval = app.add_subcommand("eval", "aggregate scores into results.csv/.md/.json");
  add_common(eval);

  auto* generate = app.add_subcommand("generate", "generate instance files from word resources");
  std::string gen_game;
  int gen_n = 10;
  std::uint64_t gen_seed = 42;
  std::string gen_lang = "en";
  bool gen_programmatic = false;
  std::optional<std::string> gen_out;
  generate->add_option("-g,--game", gen_game, "game name or 'all'")->required();
  generate->add_option("-n,--n", gen_n, "instances per stratum (or total, programmatic)");
  generate->add_option("--seed", gen_seed, "PRNG seed");
  generate->add_option("--lang", gen_lang, "language code");
  generate->add_flag("--programmatic", gen_programmatic, "use the game's programmatic generator");
  generate->add_option("--out", gen_out, "output file (single game only)");
  add_common(generate);

  auto* validate = app.add_subcommand("validate", "check every game definition and its templates");
  add_common(validate);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    Settings settings = resolve(flags, env);

    if (*list) {
      if (what == "games") {
        auto games = GameCatalog::load(settings.games_dir);
        for (const auto& name : games.names()) {
          const auto& spec = games.get(name).spec();
          out << spec.game_name << "\tv" << spec.version << "\t";
          for (std::size_t i = 0; i < spec.languages.size(); ++i) out << (i ? "," : "") << spec.languages[i];
          out << "\n";
        }
      } else {
        for (const auto& name : load_registry(settings.registry).names()) out << name << "\n";
      }
      return kExitOk;
    }

    if (*run) {
      auto games = GameCatalog::load(settings.games_dir);
      auto registry = load_registry(settings.registry);
      RunOptions options;
      options.games = {game_arg};
      options.models = model_args;
      options.temperature = temperature;
      options.experiments = experiments;
      options.results_dir = settings.results_dir;
      if (instances_file) options.instances = fs::path(*instances_file);
      options.seed = seed;
      options.parallel = to_int("parallel", resolve_setting("parallel", parallel_flag, env, settings.config, "1"));
      options.max_reprompts =
          to_int("max_reprompts", resolve_setting("max_reprompts", reprompts_flag, env, settings.config, "0"));
      if (options.parallel < 1) throw UsageError("--parallel must be at least 1");
      if (options.max_reprompts < 0) throw UsageError("--max-reprompts must be non-negative");
      options.strict = strict;
      options.relay_mode = verbatim ? RelayMode::verbatim : RelayMode::templated;

      // Validate names up front so typos fail with exit 2 before any work.
      if (game_arg != "all") games.get(game_arg);
      for (const auto& m : model_args) registry.resolve(m);

      if (wordle_dictionary && (game_arg == "all" || game_arg == "wordle")) {
        GameOptions opts = games.get("wordle").options();
        for (const auto& lang : games.get("wordle").spec().languages) {
          auto path = settings.resources_dir / "wordle" / lang / "words.json";
          auto words = words_of(path);
          opts.dictionary.insert(opts.dictionary.end(), words.begin(), words.end());
        }
        games.get_mutable("wordle").set_options(std::move(opts));
      }

      BackendPool pool;
      RunSummary summary = run_benchmark(games, registry, pool, options, err);
      out << "played " << summary.played << ", skipped " << summary.skipped << ", success " << summary.success
          << ", lost " << summary.lost << ", aborted " << summary.aborted << " (backend errors "
          << summary.backend_errors << ", game errors " << summary.game_errors << ")\n";
      if (strict && summary.failures() > 0) return kExitFailure;
      return kExitOk;
    }

    if (*transcribe) {
      int n = transcribe_results(settings.results_dir, err);
      out << "wrote " << n << " transcript(s)\n";
      return kExitOk;
    }

    if (*score) {
      auto games = GameCatalog::load(settings.games_dir);
      int n = score_results(settings.results_dir, games, err);
      out << "scored " << n << " episode(s)\n";
      return kExitOk;
    }

    if (*eval) {
      auto games = GameCatalog::load(settings.games_dir);
      auto results = eval_results(settings.results_dir, games, err);
      if (results.empty()) return kExitFailure;
      out << render_leaderboard(results).markdown;
      return kExitOk;
    }

    if (*generate) {
      auto games = GameCatalog::load(settings.games_dir);
      std::vector<std::string> names;
      if (gen_game == "all") {
        names = games.names();
      } else {
        games.get(gen_game);
        names = {gen_game};
      }
      if (gen_out && names.size() != 1) throw UsageError("--out needs exactly one game");
      for (const auto& name : names) {
        const Game& game = games.get(name);
        std::vector<Experiment> experiments_out;
        GenerationInfo info;
        info.seed = gen_seed;
        info.n = gen_n;
        if (gen_programmatic) {
          experiments_out = generate_programmatic(game, gen_n, gen_seed, gen_lang);
          info.method = "programmatic";
        } else {
          auto resource_path = settings.resources_dir / name / gen_lang / "words.json";
          std::string bytes = read_file(resource_path);
          auto resource = parse_word_resource(bytes);
          if (name == "taboo") {
            experiments_out = generate_taboo(resource, gen_n, gen_seed, gen_lang);
          } else if (name == "wordle") {
            experiments_out = generate_wordle(resource, gen_n, gen_seed, gen_lang);
          } else {
            throw UnsupportedOperation("no sampling generator for game '" + name + "'");
          }
          info.method = "sampling";
          info.resource_sha256 = sha256_hex(bytes);
        }
        fs::path target = gen_out ? fs::path(*gen_out) : instance_file_path(game.directory(), gen_lang, game.spec().version);
        write_if_changed(target, serialize_instance_file(experiments_out, info));
        Json manifest = {{"instance_file", target.filename().string()},
                         {"game_name", name},
                         {"lang", gen_lang},
                         {"method", info.method},
                         {"prng", info.prng},
                         {"seed", info.seed},
                         {"n", info.n},
                         {"resource_sha256", info.resource_sha256},
                         {"tool_version", info.tool_version}};
        fs::path manifest_path = target.parent_path() / (target.stem().string() + ".manifest.json");
        write_if_changed(manifest_path, canonical_dump(manifest));
        std::size_t count = 0;
        for (const auto& e : experiments_out) count += e.instances.size();
        out << name << ": " << count << " instance(s) in " << experiments_out.size() << " experiment(s) -> "
            << target.string() << "\n";
      }
      return kExitOk;
    }

    if (*validate) {
      auto games = GameCatalog::load(settings.games_dir);
      bool ok = true;
      for (const auto& name : games.names()) {
        auto report = games.get(name).validate();
        out << name << ": " << (report.ok() ? "ok" : "INVALID") << "\n";
        for (const auto& p : report.problems) out << "  " << p << "\n";
        ok = ok && report.ok();
      }
      return ok ? kExitOk : kExitFailure;
    }
  } catch (const UnknownNameError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const EpisodeFailure& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace clem
