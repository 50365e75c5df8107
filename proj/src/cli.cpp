#include "opsel/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "opsel/backtest.hpp"
#include "opsel/errors.hpp"
#include "opsel/synth.hpp"

namespace opsel {

namespace {

std::string sanitize_name(const std::string& token) {
  std::string out;
  out.reserve(token.size());
  for (char c : token) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-') {
      out.push_back(c);
    } else if (c == ':' || c == ',') {
      out.push_back('-');
    }
    // '=' and anything else drops out
  }
  return out;
}

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto pos = s.find(sep, start);
    if (pos == std::string::npos) pos = s.size();
    auto item = s.substr(start, pos - start);
    if (!item.empty()) out.push_back(item);
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError(what + " has non-numeric value \"" + s + "\"");
  }
  return v;
}

std::vector<StrategyKind> parse_strategies(const std::vector<std::string>& tokens) {
  std::vector<StrategyKind> kinds;
  for (const auto& token : tokens) {
    if (token == "all") {
      for (StrategyKind k : all_strategies()) kinds.push_back(k);
      continue;
    }
    kinds.push_back(strategy_from_token(token));
  }
  // Duplicates collapse into one run.
  std::vector<StrategyKind> unique;
  for (StrategyKind k : kinds) {
    if (std::find(unique.begin(), unique.end(), k) == unique.end()) unique.push_back(k);
  }
  return unique;
}

InputKind parse_input_kind(const std::string& s) {
  if (s == "prices") return InputKind::prices;
  if (s == "relatives") return InputKind::relatives;
  throw ValidationError("input kind must be prices or relatives, got \"" + s + "\"");
}

TableFormat parse_format(const std::string& s) {
  if (s == "csv") return TableFormat::csv;
  if (s == "markdown") return TableFormat::markdown;
  throw ValidationError("format must be csv or markdown, got \"" + s + "\"");
}

// Flat key=value file mirroring the CLI flags; '#' starts a comment.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in.is_open()) throw ValidationError("cannot open config file: " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    const auto end = line.find_last_not_of(" \t\r");
    line = line.substr(begin, end - begin + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": expected key=value");
    }
    auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t");
      return s.substr(b, e - b + 1);
    };
    kv[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
  }
  return kv;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out.is_open()) throw DataError("cannot write file: " + path.string());
  out << content;
  if (!out) throw DataError("write failed: " + path.string());
}

struct CliOptions {
  // shared
  std::vector<std::string> data;
  std::string input_kind = "prices";
  std::string format = "csv";
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::string config_path;
  // run
  std::vector<std::string> strategies;
  std::vector<double> gammas;
  std::optional<double> epsilon;
  std::optional<std::size_t> window;
  std::optional<double> eta;
  bool tco2_literal = false;
  // split
  std::size_t groups = 0;
  std::string cutoff;
};

}  // namespace

void RunConfig::validate() const {
  if (data.empty()) throw ValidationError("at least one dataset is required");
  if (strategies.empty()) throw ValidationError("at least one strategy is required");
  if (gammas.empty()) throw ValidationError("at least one transaction cost rate is required");
  for (double g : gammas) {
    if (!(g >= 0.0 && g <= 1.0)) {
      throw ValidationError("gamma " + shortest(g) + " outside [0, 1]");
    }
  }
  if (epsilon && !(*epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  if (window && *window < 1) throw ValidationError("window must be at least 1");
  if (eta && !(*eta > 0.0)) throw ValidationError("eta must be positive");
}

DatasetFile load_cli_dataset(const std::string& token, InputKind kind,
                             std::uint64_t seed) {
  if (is_synth_token(token)) {
    PriceMatrix prices = synth_market(parse_synth_spec(token), seed);
    std::vector<std::string> dates = prices.dates();
    RelativeMatrix relatives = to_relatives(prices);
    return DatasetFile{sanitize_name(token), std::move(dates), std::move(relatives),
                       std::move(prices)};
  }
  return load_dataset(token, kind);
}

std::vector<std::filesystem::path> cmd_run(const RunConfig& config) {
  config.validate();

  std::vector<DatasetFile> datasets;
  datasets.reserve(config.data.size());
  for (const auto& token : config.data) {
    datasets.push_back(load_cli_dataset(token, config.input_kind, config.seed));
    for (std::size_t i = 0; i + 1 < datasets.size(); ++i) {
      if (datasets[i].name == datasets.back().name) {
        throw ValidationError("datasets share the name \"" + datasets.back().name +
                              "\"; output files would collide");
      }
    }
  }

  // All runs complete before anything touches the filesystem.
  struct Payload {
    std::filesystem::path path;
    std::string content;
  };
  std::vector<Payload> files;

  for (double gamma : config.gammas) {
    std::vector<BacktestResult> results;
    for (const auto& ds : datasets) {
      for (StrategyKind kind : config.strategies) {
        StrategySpec spec = StrategySpec::defaults(kind, gamma);
        if (config.epsilon) spec.epsilon = *config.epsilon;
        if (config.window) spec.window = *config.window;
        if (config.eta) {
          spec.eta = *config.eta;
          spec.lambda = 10.0 * spec.eta * gamma;
        }
        spec.tco2_literal_predictor = config.tco2_literal_eq10;

        BacktestResult result = run(ds.relatives, spec, CostModel{gamma}, ds.name);
        files.push_back(Payload{
            config.out_dir / (ds.name + "__" + strategy_token(kind) + "__g" +
                              shortest(gamma) + ".csv"),
            render_run_csv(result)});
        results.push_back(std::move(result));
      }
    }
    const char* ext = config.format == TableFormat::markdown ? ".md" : ".csv";
    files.push_back(Payload{config.out_dir / ("summary_g" + shortest(gamma) + ext),
                            render(summarize(results), config.format)});
  }

  std::filesystem::create_directories(config.out_dir);
  std::vector<std::filesystem::path> written;
  written.reserve(files.size());
  for (const auto& f : files) {
    write_text_file(f.path, f.content);
    written.push_back(f.path);
  }
  return written;
}

namespace {

int cmd_describe(const CliOptions& opt, std::ostream& out, std::ostream& err) {
  if (opt.data.empty()) throw ValidationError("at least one dataset is required");
  const InputKind kind = parse_input_kind(opt.input_kind);
  const TableFormat format = parse_format(opt.format);

  std::vector<DatasetSummary> rows;
  std::vector<std::string> failures;
  bool data_failure = false;
  for (const auto& token : opt.data) {
    try {
      DatasetFile ds = load_cli_dataset(token, kind, opt.seed);
      rows.push_back(describe(ds.relatives, ds.name, ds.dates.front(), ds.dates.back()));
    } catch (const DataError& e) {
      failures.push_back(e.what());
      data_failure = true;
    } catch (const ValidationError& e) {
      failures.push_back(e.what());
    }
  }
  if (!rows.empty()) out << render_describe(rows, format);
  for (const auto& f : failures) err << "error: " << f << '\n';
  if (failures.empty()) return 0;
  return data_failure ? 2 : 1;
}

int cmd_split(const CliOptions& opt, std::ostream& out) {
  if (opt.data.size() != 1) throw ValidationError("split expects exactly one dataset");
  if (opt.groups == 0) throw ValidationError("group count must be at least 1");
  if (parse_input_kind(opt.input_kind) != InputKind::prices) {
    throw ValidationError("split operates on price data, not relatives");
  }

  // Loaded directly as prices: a pre-filter universe may carry NA holes that
  // would make the relatives conversion fail.
  const std::string& token = opt.data.front();
  std::string name;
  PriceMatrix universe = [&] {
    if (is_synth_token(token)) {
      name = sanitize_name(token);
      return synth_market(parse_synth_spec(token), opt.seed);
    }
    name = std::filesystem::path(token).stem().string();
    return load_prices(token);
  }();
  if (!opt.cutoff.empty()) universe = filter_by_listing(universe, opt.cutoff);

  const auto groups = split_universe(universe, opt.groups);
  std::filesystem::create_directories(opt.out_dir);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto path = std::filesystem::path(opt.out_dir) /
                      (name + "(" + std::to_string(g) + ").csv");
    write_prices_csv(groups[g], path);
    out << path.string() << ": " << groups[g].assets() << " assets\n";
  }
  return 0;
}

void apply_config_file(CliOptions& opt, const CLI::App* sub) {
  if (opt.config_path.empty()) return;
  auto kv = read_config_file(opt.config_path);
  auto unset = [&](const std::string& flag) {
    return sub->get_option("--" + flag)->count() == 0 && kv.count(flag) > 0;
  };
  // Dataset lists use ';' so synth tokens keep their commas.
  if (sub->get_option_no_throw("--data") && unset("data")) {
    opt.data = split_list(kv["data"], ';');
  }
  if (sub->get_option_no_throw("--input-kind") && unset("input-kind"))
    opt.input_kind = kv["input-kind"];
  if (sub->get_option_no_throw("--format") && unset("format")) opt.format = kv["format"];
  if (sub->get_option_no_throw("--out") && unset("out")) opt.out_dir = kv["out"];
  if (sub->get_option_no_throw("--seed") && unset("seed")) {
    opt.seed = static_cast<std::uint64_t>(parse_double(kv["seed"], "seed"));
  }
  if (sub->get_option_no_throw("--strategy") && unset("strategy"))
    opt.strategies = split_list(kv["strategy"]);
  if (sub->get_option_no_throw("--gamma") && unset("gamma")) {
    opt.gammas.clear();
    for (const auto& g : split_list(kv["gamma"])) {
      opt.gammas.push_back(parse_double(g, "gamma"));
    }
  }
  if (sub->get_option_no_throw("--epsilon") && unset("epsilon"))
    opt.epsilon = parse_double(kv["epsilon"], "epsilon");
  if (sub->get_option_no_throw("--window") && unset("window"))
    opt.window = static_cast<std::size_t>(parse_double(kv["window"], "window"));
  if (sub->get_option_no_throw("--eta") && unset("eta"))
    opt.eta = parse_double(kv["eta"], "eta");
  if (sub->get_option_no_throw("--tco2-literal-eq10") && unset("tco2-literal-eq10"))
    opt.tco2_literal = kv["tco2-literal-eq10"] == "true" || kv["tco2-literal-eq10"] == "1";
  if (sub->get_option_no_throw("--groups") && unset("groups"))
    opt.groups = static_cast<std::size_t>(parse_double(kv["groups"], "groups"));
  if (sub->get_option_no_throw("--cutoff") && unset("cutoff")) opt.cutoff = kv["cutoff"];
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Online portfolio selection backtester"};
  app.require_subcommand(1);
  CliOptions opt;

  auto add_shared = [&](CLI::App* sub, bool with_out) {
    // No comma delimiter here: synth tokens contain commas. Repeat the flag
    // for several datasets.
    sub->add_option("--data", opt.data,
                    "Dataset CSV path or synth:<process>:n=..,m=.. token (repeatable)");
    sub->add_option("--input-kind", opt.input_kind, "prices (default) or relatives");
    sub->add_option("--format", opt.format, "csv (default) or markdown");
    sub->add_option("--seed", opt.seed, "Seed for synthetic datasets");
    sub->add_option("--config", opt.config_path, "Flat key=value config file");
    if (with_out) sub->add_option("--out", opt.out_dir, "Output directory");
  };

  CLI::App* run_cmd = app.add_subcommand("run", "Run a strategy/cost grid over datasets");
  add_shared(run_cmd, true);
  run_cmd->add_option("--strategy", opt.strategies,
                      "Strategies: bah,crp,smr,smar,pamr,olmar,tco1,tco2 or all")
      ->delimiter(',');
  run_cmd->add_option("--gamma", opt.gammas, "Transaction cost rates in [0,1]")
      ->delimiter(',');
  run_cmd->add_option("--epsilon", opt.epsilon, "Override PAMR/OLMAR epsilon");
  run_cmd->add_option("--window", opt.window, "Override the SMA window");
  run_cmd->add_option("--eta", opt.eta, "Override TCO eta (lambda stays 10*eta*gamma)");
  run_cmd->add_flag("--tco2-literal-eq10", opt.tco2_literal,
                    "Divide the TCO-2 SMA by x_t instead of p_t");

  CLI::App* describe_cmd = app.add_subcommand("describe", "Summarize datasets");
  add_shared(describe_cmd, false);

  CLI::App* split_cmd = app.add_subcommand("split", "Sort assets and split into groups");
  add_shared(split_cmd, true);
  split_cmd->add_option("--groups", opt.groups, "Number of groups");
  split_cmd->add_option("--cutoff", opt.cutoff,
                        "Drop assets with missing data at or before this date");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (run_cmd->parsed()) {
      apply_config_file(opt, run_cmd);
      RunConfig config;
      config.data = opt.data;
      config.input_kind = parse_input_kind(opt.input_kind);
      config.strategies = parse_strategies(opt.strategies);
      if (opt.gammas.empty()) opt.gammas.push_back(0.0);
      config.gammas = opt.gammas;
      config.epsilon = opt.epsilon;
      config.window = opt.window;
      config.eta = opt.eta;
      config.tco2_literal_eq10 = opt.tco2_literal;
      config.format = parse_format(opt.format);
      config.out_dir = opt.out_dir;
      config.seed = opt.seed;
      const auto written = cmd_run(config);
      for (const auto& p : written) out << p.string() << '\n';
      return 0;
    }
    if (describe_cmd->parsed()) {
      apply_config_file(opt, describe_cmd);
      return cmd_describe(opt, out, err);
    }
    apply_config_file(opt, split_cmd);
    return cmd_split(opt, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace opsel
