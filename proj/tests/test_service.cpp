#include "doctest.h"

#include <atomic>
#include <fstream>
#include <thread>

#include "httplib.h"
#include "labelvar/core/errors.hpp"
#include "labelvar/ingest/fixture.hpp"
#include "labelvar/ingest/loader.hpp"
#include "labelvar/report/report.hpp"
#include "labelvar/service/http.hpp"
#include "labelvar/service/workbench.hpp"
#include "support.hpp"

using namespace labelvar;
using namespace labelvar::service;

namespace {

const std::string kPng("\x89PNG\r\n\x1a\n-raw-", 13);
const std::string kHeat("\x89PNG\r\n\x1a\n-heat-", 14);

// The cycle IV fixture on disk with overlays for its first two scans; built
// once and shared by every case.
struct ServiceFixture {
  testing::TempDir dir;
  std::filesystem::path manifest;
  std::vector<std::string> keys;

  ServiceFixture() {
    const auto f = ingest::generate_fixture(ingest::read_fixture_spec(testing::fixture_spec("cycle4.spec.json")));
    manifest = ingest::write_fixture(f, dir.path());
    for (const auto& k : f.dataset.keys()) keys.push_back(to_string(k));
    std::ofstream(dir / "a.png", std::ios::binary) << kPng;
    std::ofstream(dir / "a_heat.png", std::ios::binary) << kHeat;
    nlohmann::json overlays = {
        {"images",
         {{keys[0],
           {{"image_path", "a.png"},
            {"heatmap_path", "a_heat.png"},
            {"bounding_boxes", {{{"subtype", "epidural"}, {"x", 10}, {"y", 20}, {"width", 30}, {"height", 40}}}}}},
          {keys[1], {{"image_path", "gone.png"}}}}}};
    std::ofstream(dir / "overlays.json") << overlays.dump();
  }
};

const ServiceFixture& fixture() {
  static const ServiceFixture f;
  return f;
}

int status_of(const std::function<void()>& call, std::string* code = nullptr) {
  try {
    call();
  } catch (const ApiError& e) {
    if (code) *code = e.code();
    return e.status();
  }
  return 200;
}

std::string open(Workbench& bench) {
  return bench.load({{"manifest", fixture().manifest.string()}})["session_id"].get<std::string>();
}

}  // namespace

TEST_SUITE("service") {
  TEST_CASE("load reports the dataset and starts at revision 0") {
    Workbench bench;
    const Json out = bench.load({{"manifest", fixture().manifest.string()}});
    CHECK(out["revision"] == 0);
    CHECK(out["rows"] == 490);
    CHECK(out["gt_column"] == "consensus_any");
    CHECK(out["has_overlays"] == true);
    const Json info = bench.info(out["session_id"]);
    CHECK(info["selection"]["count"] == 490);
    CHECK(info["tie_policy"] == "positive");

    std::string code;
    CHECK(status_of([&] { bench.load({{"manifest", "/nonexistent/manifest.json"}}); }, &code) == 400);
    CHECK(code == "load_error");
    CHECK(status_of([&] { bench.load(Json::object()); }, &code) == 400);
    CHECK(status_of([&] { bench.info("nope"); }, &code) == 404);
    CHECK(code == "unknown_session");
  }

  TEST_CASE("queries select, intersect and bump the revision") {
    Workbench bench;
    const std::string id = open(bench);
    Json out = bench.query(id, {{"text", "agree_count_epidural >= 1"}});
    CHECK(out["count"] == 32);
    CHECK(out["revision"] == 1);
    CHECK(out["canonical"] == "(agree_count_epidural >= 1)");

    out = bench.query(id, {{"text", "epidural == 1 and subdural == 0"}, {"combine", "intersect"}, {"name", "cycle4"}});
    CHECK(out["count"] == 7);
    CHECK(out["revision"] == 2);
    CHECK(bench.info(id)["named_queries"]["cycle4"] == "((epidural == 1) and (subdural == 0))");

    out = bench.query(id, {{"text", ""}});
    CHECK(out["count"] == 490);

    std::string code;
    CHECK(status_of([&] { bench.query(id, {{"text", "and and"}}); }, &code) == 400);
    CHECK(code == "syntax_error");
    CHECK(status_of([&] { bench.query(id, {{"text", "epidurall == 1"}}); }, &code) == 400);
    CHECK(code == "unknown_column");
    CHECK(status_of([&] { bench.query(id, {{"text", "x"}, {"combine", "union"}}); }, &code) == 400);
    // Failed requests leave the revision alone.
    CHECK(bench.info(id)["revision"] == 3);
  }

  TEST_CASE("brushing by keys") {
    Workbench bench;
    const std::string id = open(bench);
    const auto& keys = fixture().keys;
    Json brushed = Json::array();
    for (int i = 0; i < 10; ++i) brushed.push_back(keys[static_cast<std::size_t>(i) * 3]);
    CHECK(bench.query(id, {{"keys", brushed}})["count"] == 10);
    const Json table = bench.widget(id, "table", {{"columns", "epidural,pred_epidural"}});
    CHECK(table["total"] == 10);
    CHECK(table["rows"].size() == 10);
    CHECK(table["rows"][1]["key"] == keys[3]);

    std::string code;
    CHECK(status_of([&] { bench.query(id, {{"keys", {"no-such-scan"}}}); }, &code) == 400);
    CHECK(code == "unknown_key");
  }

  TEST_CASE("switching the ground truth changes the metrics") {
    Workbench bench;
    const std::string id = open(bench);
    Json gt = bench.set_ground_truth(id, {{"column", "epidural"}});
    CHECK(gt["revision"] == 1);
    Json m = bench.metrics(id, {{"pred", "pred_epidural"}});
    CHECK(m["tp"] == 1);
    CHECK(m["fn"] == 12);
    m = bench.metrics(id, {{"pred", "pred_subdural"}});
    CHECK(m["display"]["recall"] == "84.6%");

    std::string code;
    CHECK(status_of([&] { bench.set_ground_truth(id, {{"column", "pred_any"}}); }, &code) == 400);
    CHECK(code == "not_binary");
    CHECK(status_of([&] { bench.set_ground_truth(id, {{"column", "epidurall"}}); }, &code) == 400);
    CHECK(code == "unknown_column");
    CHECK(status_of([&] { bench.metrics(id, {}); }, &code) == 400);
    CHECK(code == "missing_parameter");
    CHECK(status_of([&] { bench.set_ground_truth(id, {{"column", "any"}, {"threshold", 2}}); }) == 400);
  }

  TEST_CASE("metrics can be restricted to the selection") {
    Workbench bench;
    const std::string id = open(bench);
    bench.set_ground_truth(id, {{"column", "any"}});
    bench.query(id, {{"text", "agree_count_any == 4"}});
    const Json all = bench.metrics(id, {{"pred", "pred_any"}});
    const Json sel = bench.metrics(id, {{"pred", "pred_any"}, {"scope", "selection"}});
    CHECK(all["n_evaluated"] == 490);
    CHECK(sel["n_evaluated"] == 161);
    CHECK(sel["scope"] == "selection");
  }

  TEST_CASE("widgets") {
    Workbench bench;
    const std::string id = open(bench);
    Json w = bench.widget(id, "minority_profile", {{"subtype", "epidural"}});
    CHECK(w["counts"] == Json::parse(R"({"4": 6, "3": 13, "2": 4, "1": 9})"));

    w = bench.widget(id, "overlap_table", {{"subtype", "any"}});
    CHECK(w["rows"][0]["cases"] == 161);

    w = bench.widget(id, "pearson", {});
    CHECK(w["r"].get<double>() > 0.0);

    bench.query(id, {{"text", "epidural == 1"}});
    w = bench.widget(id, "scatter", {{"columns", "agree_count_epidural,pred_epidural"}});
    CHECK(w["series"][0]["points"].size() == 13);
    CHECK(w["scope"] == "selection");
    w = bench.widget(id, "scatter", {{"columns", "pred_epidural"}, {"scope", "all"}});
    CHECK(w["series"][0]["points"].size() == 490);

    bench.query(id, {{"text", ""}});
    w = bench.widget(id, "concordance_metrics", {{"subtype", "any"}});
    CHECK(w["unanimous"]["metrics"]["accuracy"].get<double>() > w["disputed"]["metrics"]["accuracy"].get<double>());

    w = bench.widget(id, "table", {{"offset", "488"}, {"limit", "10"}});
    CHECK(w["rows"].size() == 2);

    std::string code;
    CHECK(status_of([&] { bench.widget(id, "pie", {}); }, &code) == 404);
    CHECK(code == "unknown_widget");
    CHECK(status_of([&] { bench.widget(id, "table", {{"limit", "-1"}}); }) == 400);
    CHECK(status_of([&] { bench.widget(id, "scatter", {{"columns", "nope"}}); }, &code) == 400);
    CHECK(code == "unknown_column");
    bench.query(id, {{"text", "agree_count_any == 4 and pred_any < 0.5 and epidural == 1"}});
    CHECK(status_of([&] { bench.widget(id, "pearson", {}); }, &code) == 400);
    CHECK(code == "degenerate_input");
  }

  TEST_CASE("image layers") {
    Workbench bench;
    const std::string id = open(bench);
    const auto& keys = fixture().keys;
    Json img = bench.image(id, keys[0], {});
    CHECK(img["layers"]["raw"]["base64"] == "iVBORw0KGgotcmF3LQ==");
    CHECK(img["layers"]["boxes"][0]["width"] == 30);
    CHECK_FALSE(img["layers"].contains("heatmap"));
    img = bench.image(id, keys[0], {{"layers", "heatmap"}});
    CHECK(img["layers"].contains("heatmap"));
    CHECK(bench.image_bytes(id, keys[0], {{"layer", "heatmap"}}).bytes == kHeat);

    std::string code;
    CHECK(status_of([&] { bench.image(id, keys[1], {}); }, &code) == 404);
    CHECK(code == "image_missing");
    CHECK(status_of([&] { bench.image(id, keys[1], {{"layers", "boxes,heatmap"}}); }, &code) == 409);
    CHECK(code == "layer_absent");
    CHECK(status_of([&] { bench.image(id, keys[2], {}); }, &code) == 404);
    CHECK(code == "unknown_scan");
    CHECK(status_of([&] { bench.image(id, keys[0], {{"layers", "xray"}}); }) == 400);
  }

  TEST_CASE("overlay manifests reject bad geometry and absolute paths") {
    testing::TempDir dir;
    std::ofstream(dir / "o.json") << R"({"images": {"a": {"image_path": "a.png",
        "bounding_boxes": [{"subtype": "x", "x": -1, "y": 0, "width": 1, "height": 1}]}}})";
    CHECK_THROWS_AS(read_overlay_manifest(dir / "o.json", dir.path()), LoadError);
    std::ofstream(dir / "p.json") << R"({"images": {"a": {"image_path": "/etc/passwd"}}})";
    CHECK_THROWS_AS(read_overlay_manifest(dir / "p.json", dir.path()), LoadError);
  }

  TEST_CASE("state save and restore") {
    Workbench bench;
    const std::string id = open(bench);
    bench.set_ground_truth(id, {{"column", "epidural"}, {"threshold", 0.4}});
    bench.query(id, {{"text", "agree_count_epidural == 3"}, {"name", "three"}});
    const Json doc = bench.save_state(id);
    CHECK(doc["format"] == "labelvar-session/1");
    CHECK(doc["selection"]["keys"].size() == 13);

    const Json restored = bench.restore_state(id, doc);
    const std::string copy = restored["session_id"];
    CHECK(copy != id);
    CHECK(restored["revision"] == 0);
    const Json info = bench.info(copy);
    CHECK(info["gt_column"] == "epidural");
    CHECK(info["threshold"] == 0.4);
    CHECK(info["selection"]["count"] == 13);
    CHECK(info["named_queries"]["three"] == "(agree_count_epidural == 3)");
    CHECK(bench.session_count() == 2);

    Json tampered = doc;
    tampered["fingerprint"] = "0000";
    std::string code;
    CHECK(status_of([&] { bench.restore_state(id, tampered); }, &code) == 409);
    CHECK(code == "fingerprint_mismatch");
    CHECK(status_of([&] { bench.restore_state(id, Json::object()); }, &code) == 400);
    CHECK(code == "invalid_document");
  }

  TEST_CASE("concurrent readers see coherent revisions") {
    Workbench bench;
    const std::string id = open(bench);
    std::atomic<bool> stop{false};
    std::atomic<int> incoherent{0};
    std::vector<std::thread> readers;
    for (int t = 0; t < 4; ++t) {
      readers.emplace_back([&] {
        while (!stop) {
          const Json info = bench.info(id);
          // Even revisions select every row, odd revisions the k = 4 bucket.
          const int rev = info["revision"].get<int>();
          const int count = info["selection"]["count"].get<int>();
          if ((rev % 2 == 0 && count != 490) || (rev % 2 == 1 && count != 161)) ++incoherent;
        }
      });
    }
    for (int i = 0; i < 100; ++i) {
      bench.query(id, {{"text", "agree_count_any == 4"}});
      bench.query(id, {{"text", ""}});
    }
    stop = true;
    for (auto& r : readers) r.join();
    CHECK(incoherent == 0);
    CHECK(bench.info(id)["revision"] == 200);
  }

  TEST_CASE("edge cases from the endpoint contracts") {
    Workbench bench;
    const std::string id = open(bench);
    CHECK(open(bench) != id);

    CHECK(bench.query(id, {{"text", "agree_count_any == 1"}})["count"] == 25);
    CHECK(bench.query(id, {{"text", "agree_count_any == 2"}, {"combine", "intersect"}})["count"] == 0);
    const Json m = bench.metrics(id, {{"pred", "pred_any"}, {"scope", "selection"}});
    CHECK(m["n_evaluated"] == 0);
    CHECK(m["accuracy"] == 0.0);
    const Json scatter = bench.widget(id, "scatter", {{"columns", "pred_any"}});
    CHECK(scatter["series"][0]["points"].empty());

    const auto before = bench.info(id)["revision"].get<int>();
    bench.set_ground_truth(id, {{"column", "rad4_any"}});
    bench.set_ground_truth(id, {{"column", "rad4_any"}});
    CHECK(bench.info(id)["revision"] == before + 2);
    CHECK(bench.metrics(id, {{"pred", "pred_any"}})["gt_column"] == "rad4_any");

    std::string code;
    CHECK(status_of([&] { bench.metrics(id, {{"pred", "pred_nothing"}}); }, &code) == 400);
    CHECK(code == "unknown_column");
  }

  TEST_CASE("a restored session answers like the original") {
    Workbench bench;
    const std::string id = open(bench);
    bench.set_ground_truth(id, {{"column", "subdural"}, {"threshold", 0.3}});
    bench.query(id, {{"text", "agree_count_subdural >= 2"}});
    const std::string copy = bench.restore_state(id, bench.save_state(id))["session_id"];
    for (const char* widget : {"overlap_table", "minority_profile", "concordance_metrics", "table"}) {
      Json a = bench.widget(id, widget, {{"subtype", "subdural"}});
      Json b = bench.widget(copy, widget, {{"subtype", "subdural"}});
      for (auto* j : {&a, &b}) {
        j->erase("session_id");
        j->erase("revision");
      }
      CHECK(a == b);
    }
  }

  TEST_CASE("service metrics match the batch report") {
    Workbench bench;
    const std::string id = open(bench);
    bench.set_ground_truth(id, {{"column", "epidural"}});
    Json live = bench.metrics(id, {{"pred", "pred_subdural"}});

    const Dataset d = ingest::load(ingest::read_manifest(fixture().manifest));
    report::ReportConfig config;
    config.cycle_IV.comparisons = {{"epidural", "pred_subdural"}};
    const auto doc = report::build_report(d, config, "x", "t");
    Json batch;
    for (const auto& s : doc["sections"])
      if (s["name"] == "cycle_IV") batch = s["comparisons"][0];
    for (const char* k : {"scope", "session_id", "revision"}) live.erase(k);
    CHECK(live == batch);
  }

  TEST_CASE("HTTP routes") {
    Workbench bench;
    httplib::Server server;
    register_routes(server, bench);
    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread worker([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    auto res = client.Get("/health");
    REQUIRE(res);
    CHECK(res->status == 200);

    res = client.Post("/load", Json{{"manifest", fixture().manifest.string()}}.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    const std::string id = Json::parse(res->body)["session_id"];
    const std::string base = "/session/" + id;

    res = client.Post(base + "/query", R"({"text": "agree_count_any == 1"})", "application/json");
    REQUIRE(res);
    CHECK(Json::parse(res->body)["count"] == 25);

    res = client.Post(base + "/query", R"({"text": "agree_count_any =="})", "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);
    CHECK(Json::parse(res->body)["code"] == "syntax_error");
    CHECK(Json::parse(res->body)["detail"]["offset"] == 18);

    res = client.Post(base + "/query", "{not json", "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);
    CHECK(Json::parse(res->body)["code"] == "bad_json");

    res = client.Post(base + "/gt", R"({"column": "epidural"})", "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    res = client.Get(base + "/metrics?pred=pred_subdural");
    REQUIRE(res);
    CHECK(Json::parse(res->body)["display"]["recall"] == "84.6%");

    res = client.Get(base + "/widget/minority_profile?subtype=epidural&scope=all");
    REQUIRE(res);
    CHECK(Json::parse(res->body)["counts"]["3"] == 13);

    res = client.Get(base + "/image/" + fixture().keys[0] + "?format=png&layer=raw");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->get_header_value("Content-Type") == "image/png");
    CHECK(res->body == kPng);

    res = client.Get(base + "/image/" + fixture().keys[0] + "?layers=raw,boxes,heatmap");
    REQUIRE(res);
    CHECK(Json::parse(res->body)["layers"].size() == 3);

    res = client.Get(base + "/state");
    REQUIRE(res);
    const Json doc = Json::parse(res->body);
    res = client.Post(base + "/state", doc.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);

    res = client.Get("/session/missing/metrics?pred=pred_any");
    REQUIRE(res);
    CHECK(res->status == 404);
    CHECK(Json::parse(res->body)["code"] == "unknown_session");

    server.stop();
    worker.join();
  }
}
