#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "labelvar/core/dataset.hpp"
#include "labelvar/core/selection.hpp"
#include "labelvar/ingest/derive.hpp"

namespace labelvar::service {

struct BoundingBox {
  std::string subtype;
  double x = 0, y = 0, width = 0, height = 0;
};

struct OverlayEntry {
  std::filesystem::path image_path;
  std::vector<BoundingBox> bounding_boxes;
  std::optional<std::filesystem::path> heatmap_path;
};

// Image and box annotations per scan, read from overlays.json next to the data
// manifest. Paths are relative to image_root.
struct OverlayManifest {
  std::filesystem::path image_root;
  std::map<std::string, OverlayEntry> entries;
};

// Throws LoadError on malformed documents or negative box geometry.
OverlayManifest read_overlay_manifest(const std::filesystem::path& path, const std::filesystem::path& image_root);

// Everything a request needs, frozen at one revision. Readers hold a
// shared_ptr to it, so a concurrent mutation never changes what they see.
struct SessionState {
  std::shared_ptr<const Dataset> dataset;  // loaded data plus derived columns
  std::string fingerprint;                 // of the loaded data, before derivation
  std::string manifest_path;
  std::shared_ptr<const OverlayManifest> overlays;  // null when there is no overlays.json
  ingest::TiePolicy tie_policy = ingest::TiePolicy::positive;
  std::string gt_column;
  double threshold = 0.5;
  std::map<std::string, std::string> named_queries;
  SelectionSet selection;
  std::uint64_t revision = 0;
};

class Session {
 public:
  Session(std::string id, SessionState initial);

  const std::string& id() const { return id_; }
  std::shared_ptr<const SessionState> snapshot() const;

  // Applies one mutation to a copy of the current state and publishes it with
  // the revision incremented by one. Writers are serialized; if `change`
  // throws, nothing is published.
  std::shared_ptr<const SessionState> mutate(const std::function<void(SessionState&)>& change);

 private:
  std::string id_;
  std::mutex writer_;
  mutable std::mutex publish_;
  std::shared_ptr<const SessionState> state_;
};

}  // namespace labelvar::service
