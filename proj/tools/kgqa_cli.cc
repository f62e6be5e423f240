// kgqa: answer questions over a SPARQL endpoint, run benchmarks, or serve the
// REST API and fixture endpoints.

#include <csignal>
#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "kgqa/config.h"
#include "kgqa/fixture_endpoint.h"
#include "kgqa/pipeline.h"
#include "kgqa/service.h"

namespace {

struct SettingFlag {
  std::string name;
  std::string value;
  CLI::Option* option = nullptr;
};

const std::map<std::string, std::string> kHelp = {
    {"endpoint", "SPARQL endpoint URL"},
    {"dialect", "text search dialect: virtuoso, stardog or generic_regex"},
    {"embeddings", "word vector file (token v1 ... vD per line)"},
    {"max-vr", "vertices fetched per entity probe (maxVR)"},
    {"k-vertices", "relevant vertices kept per node (k_v)"},
    {"k-predicates", "relevant predicates kept per edge (k_p)"},
    {"per-vertex-limit", "predicates fetched per vertex and direction"},
    {"max-queries", "SPARQL queries executed per question (K)"},
    {"tau", "semantic type filter threshold"},
    {"qu-url", "remote question understanding model; offline extractor when empty"},
    {"qu-timeout-ms", "timeout for the question understanding model"},
    {"parallelism", "plans executed concurrently"},
    {"fixture", "comma-separated N-Triples files served in-process"},
    {"timeout-ms", "SPARQL request timeout"},
    {"max-retries", "retries on transport failure (0-5)"},
    {"default-graph", "default graph IRI sent with every query"},
    {"connection-limit", "concurrent requests per endpoint"},
    {"coarse-url", "sentence embedding service for whole-label affinity"},
};

kgqa::PipelineConfig build_config(const std::string& config_file,
                                  const std::vector<SettingFlag>& flags) {
  kgqa::PipelineConfig cfg;
  if (!config_file.empty()) kgqa::apply_config_file(cfg, config_file);
  kgqa::apply_env(cfg);
  for (const auto& f : flags) {
    if (f.option->count() > 0) kgqa::apply_setting(cfg, f.name, f.value);
  }
  return cfg;
}

kgqa::Service* g_service = nullptr;
kgqa::FixtureServer* g_fixture = nullptr;

void on_signal(int) {
  if (g_service) g_service->stop();
  if (g_fixture) g_fixture->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"On-demand question answering over SPARQL endpoints"};
  app.require_subcommand(1);

  std::string config_file;
  app.add_option("--config", config_file, "key = value configuration file")
      ->check(CLI::ExistingFile);
  std::vector<SettingFlag> flags;
  flags.reserve(kgqa::setting_names().size());
  for (const auto& name : kgqa::setting_names()) {
    flags.push_back({name, {}, nullptr});
    auto it = kHelp.find(name);
    flags.back().option =
        app.add_option("--" + name, flags.back().value, it == kHelp.end() ? "" : it->second);
  }

  auto* answer = app.add_subcommand("answer", "answer one question and print the result as JSON");
  answer->fallthrough();
  std::string question;
  bool answers_only = false;
  answer->add_option("question", question, "English question")->required();
  answer->add_flag("--answers-only", answers_only, "print one answer per line");

  auto* bench = app.add_subcommand("bench", "evaluate a benchmark file and print the report");
  bench->fallthrough();
  std::string bench_file;
  bench->add_option("file", bench_file, "JSON benchmark")->required()->check(CLI::ExistingFile);

  auto* serve = app.add_subcommand("serve", "serve the REST API");
  serve->fallthrough();
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string request_log;
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "port");
  serve->add_option("--request-log", request_log, "append JSON-lines request log here");

  auto* fixture_serve = app.add_subcommand("fixture-serve", "serve N-Triples files as a SPARQL endpoint");
  fixture_serve->fallthrough();
  std::vector<std::string> fixture_files;
  std::string fixture_host = "127.0.0.1";
  int fixture_port = 8890;
  bool no_bif = false;
  fixture_serve->add_option("files", fixture_files, "N-Triples files")->required()
      ->check(CLI::ExistingFile);
  fixture_serve->add_option("--host", fixture_host, "bind address");
  fixture_serve->add_option("--port", fixture_port, "port");
  fixture_serve->add_flag("--no-bif-contains", no_bif, "reject Virtuoso bif:contains");

  CLI11_PARSE(app, argc, argv);

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  try {
    if (*fixture_serve) {
      kgqa::FixtureOptions options;
      options.bif_contains = !no_bif;
      std::vector<std::filesystem::path> paths(fixture_files.begin(), fixture_files.end());
      kgqa::FixtureServer server(kgqa::FixtureEndpoint::load(paths, options));
      g_fixture = &server;
      std::cerr << "serving " << fixture_files.size() << " file(s) at http://" << fixture_host
                << ":" << fixture_port << "/sparql\n";
      server.listen(fixture_host, fixture_port);
      g_fixture = nullptr;
      return 0;
    }

    kgqa::PipelineConfig cfg = build_config(config_file, flags);
    if (*answer) {
      kgqa::Pipeline pipeline(cfg);
      kgqa::PipelineResult r = pipeline.answer(question);
      if (answers_only) {
        for (const auto& key : r.answer_keys()) std::cout << key << "\n";
      } else {
        std::cout << kgqa::to_json(r).dump(2) << "\n";
      }
      return 0;
    }
    if (*bench) {
      kgqa::Pipeline pipeline(cfg);
      std::cout << kgqa::to_json(pipeline.run_benchmark_file(bench_file)).dump(2) << "\n";
      return 0;
    }
    if (*serve) {
      std::ofstream log_file;
      std::ostream* log = nullptr;
      if (!request_log.empty()) {
        log_file.open(request_log, std::ios::app);
        if (!log_file) {
          std::cerr << "error: cannot open " << request_log << "\n";
          return 2;
        }
        log = &log_file;
      }
      kgqa::Service service(cfg, nullptr, log);
      g_service = &service;
      std::cerr << "serving API at http://" << host << ":" << port << "/api\n";
      service.listen(host, port);
      g_service = nullptr;
      return 0;
    }
  } catch (const kgqa::PipelineError& e) {
    std::cerr << "error [" << kgqa::to_string(e.phase()) << "/" << kgqa::to_string(e.code())
              << "]: " << e.what() << "\n";
    return 1;
  } catch (const kgqa::Error& e) {
    std::cerr << "error [" << kgqa::to_string(e.code()) << "]: " << e.what() << "\n";
    return e.code() == kgqa::ErrorCode::kConfigError ? 2 : 1;
  }
  return 0;
}
