#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "labelvar/analytics/serialize.hpp"
#include "labelvar/core/errors.hpp"
#include "labelvar/ingest/aggregate.hpp"
#include "labelvar/ingest/derive.hpp"
#include "labelvar/ingest/fixture.hpp"
#include "labelvar/ingest/loader.hpp"
#include "labelvar/query/ast.hpp"
#include "labelvar/query/evaluator.hpp"
#include "labelvar/query/parser.hpp"
#include "labelvar/report/report.hpp"
#include "labelvar/service/http.hpp"
#include "labelvar/service/workbench.hpp"

namespace labelvar::cli {

int exit_code_for(const std::exception& e) {
  if (const auto* nested = dynamic_cast<const std::nested_exception*>(&e); nested && nested->nested_ptr()) {
    try {
      nested->rethrow_nested();
    } catch (const std::exception& inner) {
      return exit_code_for(inner);
    } catch (...) {
      return kInternal;
    }
  }
  if (dynamic_cast<const UnknownColumnError*>(&e) || dynamic_cast<const SyntaxError*>(&e)) return kUsage;
  if (dynamic_cast<const InfeasibleSpecError*>(&e)) return kInfeasible;
  if (dynamic_cast<const LoadError*>(&e) || dynamic_cast<const SchemaError*>(&e) ||
      dynamic_cast<const DegenerateInputError*>(&e) || dynamic_cast<const SelectionMismatchError*>(&e))
    return kData;
  return kInternal;
}

namespace {

Dataset load_ct(const std::string& manifest_path) {
  Dataset d = ingest::load(ingest::read_manifest(manifest_path));
  return d.level() == Level::slice ? ingest::aggregate_to_ct(d) : d;
}

void write_output(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  file << text;
  if (!file) throw LoadError("cannot write '" + path + "'");
}

struct GenerateArgs {
  std::string spec;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string format = "json";
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  ingest::FixtureSpec spec = ingest::read_fixture_spec(a.spec);
  if (a.seed) spec.seed = *a.seed;
  const auto fixture = ingest::generate_fixture(spec);
  const auto manifest = ingest::write_fixture(fixture, a.out);
  if (a.format == "text") {
    out << "wrote " << fixture.dataset.row_count() << " scans to " << manifest.parent_path().string() << "\n"
        << "manifest " << manifest.string() << "\n"
        << "fingerprint " << fixture.dataset.fingerprint() << "\n"
        << "all targets met: " << (fixture.summary.value("all_met", false) ? "yes" : "no") << "\n";
  } else {
    nlohmann::ordered_json doc = fixture.summary;
    doc["manifest"] = manifest.string();
    out << doc.dump(2) << "\n";
  }
  return kOk;
}

struct ReportArgs {
  std::string manifest;
  std::string config;
  std::string out;
  std::optional<double> threshold;
  std::string tie_policy;
  std::string format = "json";
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
  report::ReportConfig config = a.config.empty() ? report::ReportConfig{} : report::read_report_config(a.config);
  if (a.threshold) config.threshold = *a.threshold;
  if (!a.tie_policy.empty()) config.tie_policy = ingest::parse_tie_policy(a.tie_policy);
  const Dataset d = load_ct(a.manifest);
  const auto doc = report::build_report(d, config, a.manifest, report::utc_timestamp());
  write_output(a.format == "text" ? report::render_text(doc) : doc.dump(2) + "\n", a.out, out);
  return kOk;
}

struct QueryArgs {
  std::string manifest;
  std::string text;
  bool count_only = false;
  std::string tie_policy = "positive";
  std::string format = "text";
};

int cmd_query(const QueryArgs& a, std::ostream& out) {
  const auto parsed = query::parse(a.text);
  const Dataset d = ingest::derive_all(load_ct(a.manifest), ingest::parse_tie_policy(a.tie_policy));
  const auto selection = query::evaluate(parsed, d, a.text);
  if (a.format == "json") {
    nlohmann::ordered_json doc{{"query", a.text}, {"canonical", query::print(parsed)}, {"count", selection.size()}};
    if (!a.count_only) doc["keys"] = analytics::keys_to_json(selection);
    out << doc.dump(2) << "\n";
  } else if (a.count_only) {
    out << selection.size() << "\n";
  } else {
    out << "count " << selection.size() << "\n";
    for (const auto& k : selection.keys()) out << to_string(k) << "\n";
  }
  return kOk;
}

struct ServeArgs {
  std::string manifest;
  std::string host = "127.0.0.1";
  int port = 8080;
};

int cmd_serve(const ServeArgs& a, std::ostream& out, std::ostream& err) {
  service::Workbench bench;
  if (!a.manifest.empty()) out << bench.load({{"manifest", a.manifest}}).dump() << "\n" << std::flush;
  err << "listening on http://" << a.host << ":" << a.port << "\n" << std::flush;
  if (!service::serve(bench, a.host, a.port)) {
    err << "labelvar: error: cannot listen on " << a.host << ":" << a.port << "\n";
    return kData;
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Inter-annotator label variability workbench"};
  app.name("labelvar");
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Realize a fixture spec as a data file plus manifest");
  generate->add_option("--spec", gen.spec, "Fixture spec JSON")->required();
  generate->add_option("--out", gen.out, "Output directory")->required();
  generate->add_option("--seed", gen.seed, "Override the spec's seed");
  generate->add_option("--format", gen.format, "Summary format")->check(CLI::IsMember({"json", "text"}));

  ReportArgs rep;
  auto* report_cmd = app.add_subcommand("report", "Run analysis cycles I-IV and emit a report");
  report_cmd->add_option("--manifest", rep.manifest, "Ingest manifest JSON")->required();
  report_cmd->add_option("--config", rep.config, "Report config JSON");
  report_cmd->add_option("--out", rep.out, "Write the report here instead of stdout");
  report_cmd->add_option("--threshold", rep.threshold, "Binarization threshold")->check(CLI::Range(0.0, 1.0));
  report_cmd->add_option("--tie-policy", rep.tie_policy, "Consensus tie policy")
      ->check(CLI::IsMember({"positive", "negative", "missing"}));
  report_cmd->add_option("--format", rep.format, "Report format")->check(CLI::IsMember({"json", "text"}));

  QueryArgs q;
  auto* query_cmd = app.add_subcommand("query", "Select rows with a query expression");
  query_cmd->add_option("--manifest", q.manifest, "Ingest manifest JSON")->required();
  query_cmd->add_option("query", q.text, "Query text")->required();
  query_cmd->add_flag("--count-only", q.count_only, "Print only the number of selected rows");
  query_cmd->add_option("--tie-policy", q.tie_policy, "Consensus tie policy")
      ->check(CLI::IsMember({"positive", "negative", "missing"}));
  query_cmd->add_option("--format", q.format, "Output format")->check(CLI::IsMember({"json", "text"}));

  ServeArgs srv;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP workbench service");
  serve_cmd->add_option("--manifest", srv.manifest, "Load this manifest into a first session");
  serve_cmd->add_option("--host", srv.host, "Bind address");
  serve_cmd->add_option("--port", srv.port, "Port")->check(CLI::Range(1, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*generate) return cmd_generate(gen, out);
    if (*report_cmd) return cmd_report(rep, out);
    if (*query_cmd) return cmd_query(q, out);
    if (*serve_cmd) return cmd_serve(srv, out, err);
  } catch (const service::ApiError& e) {
    err << "labelvar: error: " << e.what() << "\n";
    return e.status() == 400 ? kData : kInternal;
  } catch (const std::exception& e) {
    err << "labelvar: error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kUsage;
}

}  // namespace labelvar::cli
