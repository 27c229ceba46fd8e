// sparc: command-line entry point.
//
// Exit codes: 0 success, 1 domain error (bad input, unsolvable request,
// exhausted generation), 2 environment error (files, network).

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <thread>

#include "sparc/dataset.hpp"
#include "sparc/difficulty.hpp"
#include "sparc/eval.hpp"
#include "sparc/generator.hpp"
#include "sparc/prompt.hpp"
#include "sparc/rules.hpp"
#include "sparc/service.hpp"
#include "sparc/solver.hpp"
#include "sparc/svg.hpp"

namespace fs = std::filesystem;
using namespace sparc;

namespace {

// Machine-readable summary: stdout unless the payload went there.
void summary(json j, bool payload_on_stdout = false) {
  j["ok"] = true;
  (payload_on_stdout ? std::cerr : std::cout) << j.dump() << "\n";
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-")
    std::cout << text;
  else
    write_file(out, text);
}

const Puzzle& pick(const std::vector<Puzzle>& ps, const std::string& id) {
  if (id.empty()) {
    if (ps.size() == 1) return ps.front();
    throw Error("dataset holds " + std::to_string(ps.size()) + " puzzles; choose one with --id");
  }
  for (const auto& p : ps)
    if (p.id() == id) return p;
  throw Error("unknown puzzle id " + id);
}

// A .jsonl/.json dataset, or a bare grid file holding a single puzzle.
std::vector<Puzzle> load_puzzles(const std::string& file) {
  const auto bytes = read_file(file);
  const auto first = bytes.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && bytes[first] == '[') {
    return {parse_grid(bytes, fs::path(file).stem().string())};
  }
  return load_dataset(bytes);
}

Path parse_path_text(const std::string& text) {
  auto ex = extract_answer("####" + text);
  if (!ex.path) throw Error(std::string("cannot read path: ") + to_string(*ex.error));
  return *ex.path;
}

DifficultyParams difficulty_params(bool published, std::optional<double> mu, std::optional<double> sigma,
                                   const std::string& file) {
  DifficultyParams d = published ? DifficultyParams::published() : DifficultyParams{};
  if (!file.empty()) {
    const auto j = json::parse(read_file(file));
    d.mu = j.value("mu", d.mu);
    d.sigma = j.value("sigma", d.sigma);
  }
  if (mu) d.mu = *mu;
  if (sigma) d.sigma = *sigma;
  if (!(d.sigma > 0)) throw Error("sigma must be positive");
  return d;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial path puzzles: generate, solve, grade and evaluate."};
  app.set_config("--config", "", "TOML file mirroring the command-line flags");
  app.require_subcommand(1);
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--jobs", jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

  // Difficulty normalization, shared by several commands.
  bool published = false;
  std::optional<double> mu, sigma;
  std::string params_file;
  const auto add_difficulty = [&](CLI::App* cmd) {
    cmd->add_flag("--published", published, "Use the published normalization (mu 12.06, sigma 5.27)");
    cmd->add_option("--mu", mu, "Override the normalization mean");
    cmd->add_option("--sigma", sigma, "Override the normalization standard deviation");
    cmd->add_option("--params", params_file, "JSON file with mu and sigma (as written by calibrate)");
  };

  // generate
  auto* gen = app.add_subcommand("generate", "Generate puzzles as JSON lines");
  std::size_t count = 0;
  std::string split, out;
  GenConfig gcfg;
  bool balanced = false;
  std::size_t first_index = 0;
  gen->add_option("--count,-n", count, "Number of puzzles")->required()->check(CLI::PositiveNumber);
  gen->add_option("--split", split, "Rule subset, e.g. gaps, St-S, G-D-T, P-Y");
  gen->add_option("--seed", gcfg.seed, "RNG seed")->capture_default_str();
  gen->add_option("-o,--output", out, "Output file (default stdout)");
  gen->add_flag("--balanced", balanced, "Sample evenly across difficulty levels");
  gen->add_option("--first-index", first_index, "Index of the first puzzle within the seeded corpus");
  gen->add_option("--size-min", gcfg.size_min)->capture_default_str();
  gen->add_option("--size-max", gcfg.size_max)->capture_default_str();
  gen->add_option("--density", gcfg.initial_rule_density, "Initial rule density")->capture_default_str();
  gen->add_option("--density-step", gcfg.density_step)->capture_default_str();
  gen->add_option("--k-max", gcfg.k_max, "Largest accepted solution count")->capture_default_str();
  gen->add_option("--max-attempts", gcfg.max_attempts)->capture_default_str();
  gen->add_option("--edge-marks", gcfg.edge_mark_density, "Dots and gaps per drawable cell")->capture_default_str();
  gen->add_option("--colors-per-puzzle", gcfg.colors_per_puzzle)->capture_default_str();
  gen->add_option("--solve-budget", gcfg.solve_budget, "Solver expansions per attempt")->capture_default_str();
  add_difficulty(gen);

  // solve
  auto* sol = app.add_subcommand("solve", "Enumerate solution paths");
  std::string file, id;
  std::size_t cap = 50;
  std::uint64_t budget = SolveConfig{}.budget;
  sol->add_option("file", file, "Dataset or grid file")->required();
  sol->add_option("--id", id, "Puzzle id");
  sol->add_option("--cap", cap, "Maximum number of solutions to list")->capture_default_str();
  sol->add_option("--budget", budget, "Expansion budget")->capture_default_str();

  // validate
  auto* val = app.add_subcommand("validate", "Check a dataset, or a path against one puzzle");
  std::string path_text;
  val->add_option("file", file, "Dataset or grid file")->required();
  val->add_option("--id", id, "Puzzle id");
  val->add_option("--path", path_text, "Path as (x,y),(x,y),...");

  // difficulty
  auto* dif = app.add_subcommand("difficulty", "Score puzzles and write the difficulty fields");
  dif->add_option("file", file, "Dataset file")->required();
  dif->add_option("-o,--output", out, "Output file (default stdout)");
  add_difficulty(dif);

  // render
  auto* ren = app.add_subcommand("render", "Render one puzzle as SVG");
  bool with_solution = false;
  ren->add_option("file", file, "Dataset or grid file")->required();
  ren->add_option("--id", id, "Puzzle id");
  ren->add_option("-o,--output", out, "Output file (default stdout)");
  ren->add_option("--path", path_text, "Overlay this path");
  ren->add_flag("--solution", with_solution, "Overlay the first solution");

  // prompt
  auto* pro = app.add_subcommand("prompt", "Print the model prompt for one puzzle");
  std::string variant = "default";
  int shots = 0;
  pro->add_option("file", file, "Dataset or grid file")->required();
  pro->add_option("--id", id, "Puzzle id");
  pro->add_option("--variant", variant, "default, alternative or vision_text")->capture_default_str();
  pro->add_option("--shots", shots, "Worked examples to include")->check(CLI::Range(0, 2))->capture_default_str();
  pro->add_option("-o,--output", out, "Output file (default stdout)");

  // grade
  auto* gra = app.add_subcommand("grade", "Grade answer files named <puzzle id>.txt");
  std::string answers;
  gra->add_option("file", file, "Dataset file")->required();
  gra->add_option("--answers", answers, "Directory of answer files")->required();
  gra->add_option("-o,--output", out, "Write grade records as JSON lines");

  // eval
  auto* ev = app.add_subcommand("eval", "Query a chat endpoint and report metrics");
  ModelEndpoint ep;
  EvalOptions eopt;
  std::string dataset_file, out_dir = "eval_out";
  ev->add_option("--dataset", dataset_file, "Dataset file")->required();
  ev->add_option("--endpoint", ep.base_url, "Base URL, e.g. http://localhost:8000/v1")->required();
  ev->add_option("--model", ep.model, "Model name")->capture_default_str();
  ev->add_option("--k", eopt.k, "Samples per puzzle")->check(CLI::PositiveNumber)->capture_default_str();
  ev->add_option("--variant", variant, "Prompt variant")->capture_default_str();
  ev->add_option("--shots", shots, "Worked examples")->check(CLI::Range(0, 2))->capture_default_str();
  ev->add_option("--temperature", ep.temperature)->capture_default_str();
  ev->add_option("--max-tokens", ep.max_tokens)->capture_default_str();
  ev->add_option("--concurrency", ep.concurrency, "Requests in flight")->check(CLI::PositiveNumber)->capture_default_str();
  ev->add_option("--retries", ep.max_retries)->capture_default_str();
  ev->add_option("--backoff", ep.backoff_base_s, "Backoff base in seconds")->capture_default_str();
  ev->add_option("--timeout", ep.timeout_s, "Request timeout in seconds")->capture_default_str();
  ev->add_option("--token-env", ep.token_env, "Environment variable holding the API token")->capture_default_str();
  ev->add_flag("!--no-n", ep.request_n, "Never ask for several choices in one request");
  ev->add_option("--seed", ep.seed, "Backoff jitter seed")->capture_default_str();
  ev->add_option("--out", out_dir, "Run directory")->capture_default_str();

  // regrade
  auto* reg = app.add_subcommand("regrade", "Re-grade a stored eval run offline");
  std::string run_dir;
  reg->add_option("--dataset", dataset_file, "Dataset file")->required();
  reg->add_option("--run", run_dir, "Run directory written by eval")->required();
  reg->add_option("--out", out_dir, "Report directory")->required();

  // serve
  auto* srv = app.add_subcommand("serve", "Serve the puzzle API and the player bundle");
  std::string host = "127.0.0.1", static_dir, annotations_file = "annotations.jsonl";
  int port = 8080;
  srv->add_option("--dataset", dataset_file, "Dataset file")->required();
  srv->add_option("--host", host)->capture_default_str();
  srv->add_option("--port", port)->capture_default_str();
  srv->add_option("--static", static_dir, "Directory served at /");
  srv->add_option("--annotations", annotations_file, "Annotation JSON-lines file")->capture_default_str();

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "Fit mu and sigma to a corpus");
  std::string corpus;
  std::size_t generate_n = 0;
  GenConfig ccfg;
  cal->add_option("--corpus", corpus, "Existing dataset to fit");
  cal->add_option("--generate", generate_n, "Generate this many puzzles to fit instead");
  cal->add_option("--seed", ccfg.seed, "Seed for --generate")->capture_default_str();
  cal->add_option("--save-corpus", dataset_file, "Write the generated corpus here");
  cal->add_option("-o,--output", out, "Write {mu, sigma} JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gen) {
      gcfg.jobs = jobs;
      gcfg.difficulty = difficulty_params(published, mu, sigma, params_file);
      std::vector<Puzzle> ps;
      if (balanced) {
        if (!split.empty()) {
          gcfg.rule_palette = parse_split(split);
          if (gcfg.rule_palette.contains(RuleKind::ylop)) gcfg.rule_palette.insert(RuleKind::poly);
          gcfg.require_all_kinds = true;
          gcfg.split = split;
        }
        ps = generate_balanced(gcfg, count);
      } else if (!split.empty()) {
        ps = generate_split(gcfg, split, count);
      } else {
        ps = generate_batch(gcfg, first_index, count);
      }
      emit(save_dataset(ps), out);
      std::array<int, 5> levels{};
      for (const auto& p : ps) ++levels[static_cast<std::size_t>(p.difficulty->level - 1)];
      summary({{"command", "generate"}, {"count", ps.size()}, {"seed", gcfg.seed}, {"levels", levels}},
              out.empty() || out == "-");
    } else if (*sol) {
      const auto ps = load_puzzles(file);
      const auto& p = pick(ps, id);
      SolveConfig cfg;
      cfg.max_solutions = cap;
      cfg.budget = budget;
      cfg.jobs = jobs;
      const auto r = solve(p, cfg);
      for (const auto& s : r.solutions) std::cout << format_path(s) << "\n";
      std::cout << r.solutions.size() << " solutions" << (r.capped ? " (capped)" : "") << "\n";
      summary({{"command", "solve"}, {"id", p.id()}, {"solutions", r.solutions.size()}, {"capped", r.capped},
               {"expanded", r.nodes_expanded}});
    } else if (*val) {
      const auto ps = load_puzzles(file);
      if (path_text.empty()) {
        summary({{"command", "validate"}, {"puzzles", ps.size()}, {"schema", "ok"}});
      } else {
        const auto& p = pick(ps, id);
        const auto v = check_solution(p, parse_path_text(path_text));
        std::cout << PuzzleService::verdict_json(v).dump(2) << "\n";
        summary({{"command", "validate"}, {"id", p.id()}, {"solved", v.solved}});
      }
    } else if (*dif) {
      auto ps = load_dataset_file(file);
      const auto params = difficulty_params(published, mu, sigma, params_file);
      for (auto& p : ps) p.difficulty = difficulty_tag(p, params);
      emit(save_dataset(ps), out);
      summary({{"command", "difficulty"}, {"count", ps.size()}, {"mu", params.mu}, {"sigma", params.sigma}},
              out.empty() || out == "-");
    } else if (*ren) {
      const auto ps = load_puzzles(file);
      const auto& p = pick(ps, id);
      SvgOptions opt;
      if (!path_text.empty()) opt.path = parse_path_text(path_text);
      if (with_solution) {
        SolveConfig cfg;
        cfg.max_solutions = 1;
        const auto r = solve(p, cfg);
        if (r.solutions.empty()) throw Error("puzzle has no solution");
        opt.path = r.solutions.front();
      }
      emit(render_svg(p, opt), out);
      summary({{"command", "render"}, {"id", p.id()}}, out.empty() || out == "-");
    } else if (*pro) {
      const auto ps = load_puzzles(file);
      const auto& p = pick(ps, id);
      emit(render_prompt(p, {parse_prompt_variant(variant), shots}), out);
      summary({{"command", "prompt"}, {"id", p.id()}}, out.empty() || out == "-");
    } else if (*gra) {
      const auto ps = load_dataset_file(file);
      if (!fs::is_directory(answers)) throw IoError("not a directory: " + answers);
      std::string records;
      std::size_t graded = 0, solved = 0, ungraded = 0;
      for (const auto& p : ps) {
        const auto f = fs::path(answers) / (p.id() + ".txt");
        if (!fs::exists(f)) {
          ++ungraded;
          continue;
        }
        const auto r = grade(p, read_file(f.string()));
        records += to_json(r).dump() + "\n";
        ++graded;
        solved += r.solved;
      }
      if (!out.empty()) write_file(out, records);
      else std::cout << records;
      const double acc = graded ? static_cast<double>(solved) / static_cast<double>(graded) : 0.0;
      summary({{"command", "grade"}, {"graded", graded}, {"solved", solved}, {"ungraded", ungraded}, {"accuracy", acc}},
              out.empty());
    } else if (*ev) {
      const auto ps = load_dataset_file(dataset_file);
      eopt.prompt = {parse_prompt_variant(variant), shots};
      eopt.out_dir = out_dir;
      const auto r = run_eval(ps, ep, eopt);
      summary({{"command", "eval"}, {"graded", r.graded}, {"ungraded", r.ungraded}, {"partial", r.partial},
               {"accuracy", r.accuracy.value()}, {"out", out_dir}});
      if (r.partial) {
        std::cerr << "warning: " << r.ungraded << " puzzles could not be graded\n";
        return 2;
      }
    } else if (*reg) {
      const auto ps = load_dataset_file(dataset_file);
      const auto outcomes = regrade(ps, run_dir);
      fs::create_directories(out_dir);
      write_file((fs::path(out_dir) / "records.jsonl").string(), save_outcomes(outcomes));
      const auto r = aggregate(outcomes);
      write_report(out_dir, r);
      summary({{"command", "regrade"}, {"graded", r.graded}, {"accuracy", r.accuracy.value()}, {"out", out_dir}});
    } else if (*srv) {
      auto ps = load_dataset_file(dataset_file);
      const auto n = ps.size();
      ServiceOptions opt;
      if (!static_dir.empty()) opt.static_dir = static_dir;
      opt.solve.jobs = 1;
      PuzzleService service(std::move(ps), std::make_shared<JsonLinesStore>(annotations_file), opt);
      httplib::Server server;
      service.install(server);
      if (!server.bind_to_port(host, port)) throw IoError("cannot bind " + host + ":" + std::to_string(port));
      summary({{"command", "serve"}, {"puzzles", n}, {"url", "http://" + host + ":" + std::to_string(port)}});
      std::cout.flush();
      server.listen_after_bind();
    } else if (*cal) {
      std::vector<Puzzle> ps;
      if (!corpus.empty()) {
        ps = load_dataset_file(corpus);
      } else if (generate_n > 0) {
        ccfg.jobs = jobs;
        ps = generate_batch(ccfg, 0, generate_n);
        if (!dataset_file.empty()) write_file(dataset_file, save_dataset(ps));
      } else {
        throw Error("calibrate needs --corpus or --generate");
      }
      const auto params = calibrate(ps);
      const json j = {{"mu", params.mu}, {"sigma", params.sigma}, {"corpus_size", ps.size()}};
      if (!out.empty()) write_file(out, j.dump(2) + "\n");
      summary({{"command", "calibrate"}, {"mu", params.mu}, {"sigma", params.sigma}, {"corpus_size", ps.size()}});
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const EndpointUnreachable& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
