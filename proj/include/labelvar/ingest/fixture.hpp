#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "labelvar/core/dataset.hpp"
#include "labelvar/ingest/manifest.hpp"

namespace labelvar::ingest {

struct BucketTarget {
  std::size_t cases = 0;
  std::size_t model_positives = 0;
};

// Reference label of gt_subtype against the binarized pred_<pred_subtype>:
// `positives` reference-positive scans of which `true_positives` are predicted.
struct ConfusionTarget {
  std::string gt_subtype;
  std::string pred_subtype;
  std::size_t true_positives = 0;
  std::size_t positives = 0;
};

// Scans whose reference labels are positive for both subtypes.
struct CooccurrenceTarget {
  std::string first;
  std::string second;
  std::size_t count = 0;
};

// pearson(agree_count_<subtype>, pred_<subtype>).
struct CorrelationTarget {
  std::string subtype;
  double value = 0.0;
  double tolerance = 0.01;
};

struct AnnotatorMetricTarget {
  std::string annotator;
  std::string subtype;
  double accuracy = 0.0;
  double f1 = 0.0;
  std::size_t positive_count = 0;
  double tolerance = 0.0005;
};

// Declarative description of a synthetic multi-annotator dataset. The
// generator either realizes every count exactly (and the correlation within
// tolerance) or throws InfeasibleSpecError.
struct FixtureSpec {
  std::size_t n_scans = 0;
  std::vector<std::string> annotators;
  std::vector<std::string> subtypes;
  // subtype -> agreement count k (>= 1) -> target
  std::map<std::string, std::map<int, BucketTarget>> bucket_targets;
  // subtype -> number of reference-positive scans; defaults to the strict
  // panel majority, or to the positives of a confusion target on the subtype.
  std::map<std::string, std::size_t> reference_positives;
  std::vector<ConfusionTarget> confusion_targets;
  std::vector<CooccurrenceTarget> cooccurrence_targets;
  std::optional<CorrelationTarget> correlation_target;
  std::vector<AnnotatorMetricTarget> per_annotator_metric_targets;
  double threshold = 0.5;
  std::uint64_t seed = 0;
  std::string id_prefix = "CT";
};

FixtureSpec fixture_spec_from_json(const nlohmann::json& doc);
nlohmann::ordered_json fixture_spec_to_json(const FixtureSpec& spec);
FixtureSpec read_fixture_spec(const std::filesystem::path& path);

// Throws InfeasibleSpecError naming the first violated structural constraint.
void validate(const FixtureSpec& spec);

// Column names used by generated fixtures.
std::string annotation_column(std::string_view annotator, std::string_view subtype);
std::string prediction_column(std::string_view subtype);
std::string reference_column(std::string_view subtype);

struct GeneratedFixture {
  Dataset dataset;
  IngestManifest manifest;  // data_path relative to the output directory
  std::string data_text;
  // Every target next to the value analytics recovers from the dataset.
  nlohmann::ordered_json summary;
};

GeneratedFixture generate_fixture(const FixtureSpec& spec);

// Lowest and highest pearson(agree_count, pred) the score model can reach for
// the correlation subtype (the target's, or the first subtype) given every
// count target of the spec. Throws InfeasibleSpecError like generate_fixture.
std::pair<double, double> correlation_range(const FixtureSpec& spec);

// Writes fixture.csv and manifest.json into out_dir (created if needed) and
// returns the manifest path.
std::filesystem::path write_fixture(const GeneratedFixture& fixture, const std::filesystem::path& out_dir);

}  // namespace labelvar::ingest
