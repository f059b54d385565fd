#include "labelvar/service/session.hpp"

#include <fstream>

#include "json.hpp"

#include "labelvar/core/errors.hpp"

namespace labelvar::service {

OverlayManifest read_overlay_manifest(const std::filesystem::path& path, const std::filesystem::path& image_root) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open overlay manifest '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw LoadError("overlay manifest '" + path.string() + "' is not valid JSON: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("images") || !doc.at("images").is_object())
    throw LoadError("overlay manifest needs an 'images' object keyed by scan id");

  OverlayManifest out;
  out.image_root = image_root;
  try {
    for (const auto& [scan, item] : doc.at("images").items()) {
      OverlayEntry entry;
      entry.image_path = item.at("image_path").get<std::string>();
      if (item.contains("heatmap_path") && !item.at("heatmap_path").is_null())
        entry.heatmap_path = item.at("heatmap_path").get<std::string>();
      for (const auto& b : item.value("bounding_boxes", nlohmann::json::array())) {
        BoundingBox box{b.at("subtype").get<std::string>(), b.at("x").get<double>(), b.at("y").get<double>(),
                        b.at("width").get<double>(), b.at("height").get<double>()};
        if (box.x < 0 || box.y < 0 || box.width < 0 || box.height < 0)
          throw LoadError("overlay for '" + scan + "' has a box with negative geometry");
        entry.bounding_boxes.push_back(std::move(box));
      }
      if (entry.image_path.is_absolute() || (entry.heatmap_path && entry.heatmap_path->is_absolute()))
        throw LoadError("overlay paths for '" + scan + "' must be relative to the image root");
      out.entries.emplace(scan, std::move(entry));
    }
  } catch (const nlohmann::json::exception& e) {
    throw LoadError("overlay manifest '" + path.string() + "': " + e.what());
  }
  return out;
}

Session::Session(std::string id, SessionState initial)
    : id_(std::move(id)), state_(std::make_shared<const SessionState>(std::move(initial))) {}

std::shared_ptr<const SessionState> Session::snapshot() const {
  std::lock_guard lock(publish_);
  return state_;
}

std::shared_ptr<const SessionState> Session::mutate(const std::function<void(SessionState&)>& change) {
  std::lock_guard writer(writer_);
  SessionState next = *snapshot();
  change(next);
  next.revision += 1;
  auto published = std::make_shared<const SessionState>(std::move(next));
  std::lock_guard lock(publish_);
  state_ = published;
  return published;
}

}  // namespace labelvar::service
