#include "doctest.h"

#include <fstream>
#include <sstream>

#include "labelvar/core/errors.hpp"
#include "labelvar/ingest/aggregate.hpp"
#include "labelvar/ingest/csv.hpp"
#include "labelvar/ingest/derive.hpp"
#include "labelvar/ingest/loader.hpp"
#include "labelvar/ingest/manifest.hpp"
#include "support.hpp"

using namespace labelvar;
using namespace labelvar::ingest;

namespace {

double num(const Cell& c) { return std::get<double>(c); }

Dataset labels_only(const std::vector<std::vector<Cell>>& rows) {
  // rows[r] = labels of annotators a0..aN for subtype "any"
  std::vector<ColumnSchema> schema;
  const std::size_t n = rows.empty() ? 0 : rows.front().size();
  for (std::size_t a = 0; a < n; ++a)
    schema.push_back({"a" + std::to_string(a) + "_any", ColumnRole::annotation, "a" + std::to_string(a), "any",
                      ValueKind::binary});
  std::vector<std::vector<Cell>> cols(n);
  std::vector<ScanKey> keys;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    keys.push_back({"s" + std::to_string(r), {}});
    for (std::size_t a = 0; a < n; ++a) cols[a].push_back(rows[r][a]);
  }
  return Dataset(Level::ct, schema, keys, cols);
}

}  // namespace

TEST_SUITE("ingest") {
  TEST_CASE("delimited reader handles quotes, CRLF, blank lines and a BOM") {
    std::istringstream in("\xEF\xBB\xBFid,note\r\n1,\"a, \"\"quoted\"\" value\"\r\n\r\n2,plain\n");
    const auto t = read_delimited(in);
    CHECK(t.header == std::vector<std::string>{"id", "note"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][1] == "a, \"quoted\" value");
    CHECK(t.lines[1] == 4);
  }

  TEST_CASE("delimited reader reports the line of a ragged row") {
    std::istringstream in("a,b\n1,2\n3\n");
    try {
      read_delimited(in);
      FAIL("expected LoadError");
    } catch (const LoadError& e) {
      CHECK(e.line() == std::optional<std::size_t>(3));
    }
  }

  TEST_CASE("delimited writer quotes only when needed") {
    std::ostringstream out;
    std::vector<std::string> fields{"plain", "with,comma", "with \"quote\""};
    write_delimited_row(out, fields);
    CHECK(out.str() == "plain,\"with,comma\",\"with \"\"quote\"\"\"\n");
  }

  TEST_CASE("manifest JSON uses the published key names and round-trips") {
    IngestManifest m = testing::panel_manifest({"r1"}, {"any"});
    m.data_path = "data.csv";
    m.delimiter = ';';
    m.slice_column = "slice";
    m.image_root = "images";
    const auto j = manifest_to_json(m);
    for (const char* key : {"data_path", "delimiter", "key_column", "slice_column", "column_roles", "image_root"})
      CHECK(j.contains(key));
    const IngestManifest back = manifest_from_json(nlohmann::json::parse(j.dump()), "/base");
    CHECK(back.delimiter == ';');
    CHECK(back.slice_column == std::optional<std::string>("slice"));
    CHECK(back.column_roles.at("r1_any").annotator == std::optional<std::string>("r1"));
    CHECK(back.resolved_data_path() == std::filesystem::path("/base/data.csv"));
  }

  TEST_CASE("load builds the schema from column roles and infers the rest") {
    const auto m = testing::panel_manifest({"r1", "r2"}, {"any"});
    const Dataset d = testing::load_text(m, "scan_id,r1_any,r2_any,pred_any,site,age\n"
                                            "a,1,0,0.9,north,61\n"
                                            "b,0,,0.2,south,\n");
    CHECK(d.row_count() == 2);
    CHECK(d.column_schema("r1_any").role == ColumnRole::annotation);
    CHECK(d.column_schema("pred_any").value_kind == ValueKind::score);
    CHECK(d.column_schema("site").role == ColumnRole::metadata);
    CHECK(d.column_schema("site").value_kind == ValueKind::categorical);
    CHECK(d.column_schema("age").value_kind == ValueKind::numeric);
    CHECK(is_missing(d.values("r2_any")[1]));
    CHECK(is_missing(d.values("age")[1]));
  }

  TEST_CASE("an empty file with a valid header loads as zero rows") {
    const auto m = testing::panel_manifest({"r1"}, {"any"});
    const Dataset d = testing::load_text(m, "scan_id,r1_any,pred_any\n");
    CHECK(d.row_count() == 0);
    CHECK(d.column_count() == 2);
  }

  TEST_CASE("a non-binary annotation names column, line and value") {
    const auto m = testing::panel_manifest({"r1"}, {"any"});
    try {
      testing::load_text(m, "scan_id,r1_any,pred_any\na,1,0.5\nb,2,0.5\n");
      FAIL("expected LoadError");
    } catch (const LoadError& e) {
      CHECK(e.line() == std::optional<std::size_t>(3));
      CHECK(e.column() == "r1_any");
      CHECK(e.value() == "2");
    }
  }

  TEST_CASE("load rejects missing header columns and duplicate keys") {
    const auto m = testing::panel_manifest({"r1"}, {"any"});
    CHECK_THROWS_AS(testing::load_text(m, "scan_id,pred_any\na,0.5\n"), LoadError);
    CHECK_THROWS_AS(testing::load_text(m, "scan_id,r1_any,pred_any\na,1,0.5\na,0,0.5\n"), LoadError);
    IngestManifest other = m;
    other.key_column = "id";
    CHECK_THROWS_AS(testing::load_text(other, "scan_id,r1_any,pred_any\na,1,0.5\n"), LoadError);
  }

  TEST_CASE("load reads a manifest from disk with relative paths") {
    testing::TempDir dir;
    IngestManifest m = testing::panel_manifest({"r1"}, {"any"});
    m.data_path = "data.csv";
    std::ofstream(dir / "data.csv") << "scan_id,r1_any,pred_any\na,1,0.75\n";
    write_manifest(m, dir / "manifest.json");
    const Dataset d = load(read_manifest(dir / "manifest.json"));
    CHECK(d.row_count() == 1);
    CHECK(num(d.values("pred_any")[0]) == 0.75);
    CHECK_THROWS_AS(read_manifest(dir / "absent.json"), LoadError);
  }

  TEST_CASE("aggregate_to_ct takes the maximum per scan") {
    IngestManifest m = testing::panel_manifest({"r1"}, {"any"});
    m.slice_column = "slice";
    const Dataset slices = testing::load_text(m, "scan_id,slice,r1_any,pred_any,site\n"
                                                 "a,2,0,0.2,left\n"
                                                 "a,0,1,0.9,right\n"
                                                 "a,1,0,0.4,mid\n"
                                                 "b,0,,,x\n"
                                                 "b,1,,0.3,y\n"
                                                 "c,0,,,z\n");
    CHECK(slices.level() == Level::slice);
    const Dataset ct = aggregate_to_ct(slices);
    CHECK(ct.level() == Level::ct);
    REQUIRE(ct.row_count() == 3);
    CHECK(num(ct.values("pred_any")[0]) == 0.9);
    CHECK(num(ct.values("r1_any")[0]) == 1.0);
    CHECK(num(ct.values("pred_any")[1]) == 0.3);
    CHECK(is_missing(ct.values("r1_any")[1]));
    CHECK(is_missing(ct.values("pred_any")[2]));
    // Metadata comes from the lowest slice index.
    CHECK(std::get<std::string>(ct.values("site")[0]) == "right");
  }

  TEST_CASE("aggregate_to_ct leaves CT-level data unchanged") {
    const Dataset d = labels_only({{1.0, 0.0}, {0.0, 0.0}});
    const Dataset e = aggregate_to_ct(d);
    CHECK(e.fingerprint() == d.fingerprint());
    CHECK(aggregate_to_ct(Dataset()).row_count() == 0);
  }

  TEST_CASE("derive_agreement counts positives over non-missing labels") {
    const Dataset d = derive_agreement(labels_only({{1.0, 1.0, 0.0, 1.0},
                                                    {0.0, 0.0, 0.0, 0.0},
                                                    {1.0, Missing{}, 0.0, 1.0},
                                                    {Missing{}, Missing{}, Missing{}, Missing{}}}),
                                       "any");
    const auto count = d.values("agree_count_any");
    const auto prop = d.values("agree_prop_any");
    CHECK(num(count[0]) == 3);
    CHECK(num(prop[0]) == doctest::Approx(0.75));
    CHECK(num(count[1]) == 0);
    CHECK(num(prop[1]) == 0.0);
    CHECK(num(count[2]) == 2);
    CHECK(num(prop[2]) == doctest::Approx(2.0 / 3.0));
    CHECK(num(count[3]) == 0);
    CHECK(is_missing(prop[3]));
    CHECK_THROWS_AS(derive_agreement(labels_only({{1.0}}), "epidural"), SchemaError);
  }

  TEST_CASE("derive_consensus uses a strict majority and the tie policy") {
    const Dataset three = labels_only({{1.0, 1.0, 0.0}, {0.0, 0.0, 1.0}});
    const Dataset voted = derive_consensus(three, "any");
    const auto c3 = voted.values("consensus_any");
    CHECK(num(c3[0]) == 1.0);
    CHECK(num(c3[1]) == 0.0);

    const Dataset tie = labels_only({{1.0, 1.0, 0.0, 0.0}, {Missing{}, Missing{}, Missing{}, Missing{}}});
    CHECK(num(derive_consensus(tie, "any", TiePolicy::positive).values("consensus_any")[0]) == 1.0);
    CHECK(num(derive_consensus(tie, "any", TiePolicy::negative).values("consensus_any")[0]) == 0.0);
    CHECK(is_missing(derive_consensus(tie, "any", TiePolicy::missing).values("consensus_any")[0]));
    CHECK(is_missing(derive_consensus(tie, "any", TiePolicy::positive).values("consensus_any")[1]));
  }

  TEST_CASE("consensus over a subset of annotators") {
    const Dataset d = labels_only({{1.0, 0.0, 0.0}});
    const std::vector<std::string> who{"a0"};
    const auto out = derive_consensus(d, "any", TiePolicy::positive, who, "gt_a0");
    CHECK(num(out.values("gt_a0")[0]) == 1.0);
  }

  TEST_CASE("an odd complete panel never needs the tie policy") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<std::vector<Cell>> rows;
      for (int r = 0; r < 20; ++r) {
        std::vector<Cell> row;
        for (int a = 0; a < 5; ++a) row.push_back(static_cast<double>(rng() % 2));
        rows.push_back(row);
      }
      const Dataset d = labels_only(rows);
      const Dataset positive = derive_consensus(d, "any", TiePolicy::positive);
      const Dataset missing = derive_consensus(d, "any", TiePolicy::missing);
      const auto pos = positive.values("consensus_any");
      const auto miss = missing.values("consensus_any");
      for (std::size_t r = 0; r < rows.size(); ++r) CHECK(pos[r] == miss[r]);
    }
  }

  TEST_CASE("agreement bounds hold on random panels with missing labels") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<std::vector<Cell>> rows;
      for (int r = 0; r < 15; ++r) {
        std::vector<Cell> row;
        for (int a = 0; a < 4; ++a) {
          const auto v = rng() % 3;
          row.push_back(v == 2 ? Cell{Missing{}} : Cell{static_cast<double>(v)});
        }
        rows.push_back(row);
      }
      const Dataset d = derive_agreement(labels_only(rows), "any");
      const auto count = d.values("agree_count_any");
      const auto prop = d.values("agree_prop_any");
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const double c = num(count[r]);
        std::size_t den = 0;
        for (const auto& cell : rows[r]) den += !is_missing(cell);
        CHECK(c <= den);
        CHECK(den <= 4);
        if (den > 0) CHECK(num(prop[r]) == doctest::Approx(c / den));
      }
    }
  }

  TEST_CASE("derive_all adds agreement and consensus for every subtype") {
    const auto m = testing::panel_manifest({"r1", "r2", "r3"}, {"any", "epidural"});
    const Dataset d = testing::load_text(m, "scan_id,r1_any,r2_any,r3_any,pred_any,r1_epidural,r2_epidural,r3_epidural,"
                                            "pred_epidural\na,1,1,0,0.9,0,0,1,0.1\n");
    const Dataset e = derive_all(d);
    for (const char* c : {"agree_count_any", "agree_prop_any", "consensus_any", "agree_count_epidural",
                          "agree_prop_epidural", "consensus_epidural"})
      CHECK(e.find_column(c).has_value());
    CHECK(num(e.values("consensus_any")[0]) == 1.0);
    CHECK(num(e.values("consensus_epidural")[0]) == 0.0);
    // Running it again replaces the derived columns instead of failing.
    CHECK(derive_all(e).column_count() == e.column_count());
  }

  TEST_CASE("tie policy names parse and print") {
    CHECK(parse_tie_policy("negative") == TiePolicy::negative);
    CHECK(to_string(TiePolicy::missing) == "missing");
    CHECK_THROWS_AS(parse_tie_policy("coin"), SchemaError);
  }
}
