#pragma once

// Asset catalog: placeable asset definitions, the scan-category to asset-type map,
// and IoU-gated replacement selection. File format: `.catalog.json`, documented in
// docs/formats/catalog.md.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scenesmith/geometry.hpp"
#include "scenesmith/rng.hpp"
#include "scenesmith/template.hpp"

namespace scenesmith {

enum class Mount { floor, surface, wall };

std::string_view to_string(Mount m);

/// Horizontal support rectangle in the asset's local frame. `height` is measured from
/// the asset's bottom.
struct ReceptacleSurface {
  Vec2d center = Vec2d::Zero();
  Vec2d half_size = Vec2d::Zero();
  double height = 0;

  double area() const { return 4 * half_size.x() * half_size.y(); }
  bool operator==(const ReceptacleSurface&) const = default;
};

struct AssetTags {
  bool is_clutter = false;
  bool is_small = false;
  bool is_target_candidate = false;

  bool operator==(const AssetTags&) const = default;
};

struct AssetDef {
  std::string id;
  std::string asset_type;
  Vec3d bounding = Vec3d::Constant(0.5);  ///< half extents
  Mount placeable_on = Mount::floor;
  std::vector<ReceptacleSurface> receptacle_surfaces;
  AssetTags tags;
  std::string material_class;

  bool operator==(const AssetDef&) const = default;
};

class Catalog {
 public:
  Catalog() = default;
  /// Validates and indexes. Throws SchemaError / DanglingTypeError.
  Catalog(std::vector<AssetDef> assets, std::map<ScanCategory, std::vector<std::string>> category_map);
  Catalog(const Catalog& other);
  Catalog& operator=(const Catalog& other);
  Catalog(Catalog&&) noexcept = default;
  Catalog& operator=(Catalog&&) noexcept = default;

  /// Sorted by id.
  const std::vector<AssetDef>& assets() const { return assets_; }
  const std::map<ScanCategory, std::vector<std::string>>& category_map() const { return category_map_; }

  const AssetDef* find(std::string_view id) const;
  const std::vector<const AssetDef*>& of_type(std::string_view type) const;
  const std::vector<std::string>& types_for(ScanCategory c) const;
  bool has_type(std::string_view type) const { return by_type_.contains(std::string(type)); }

  const std::vector<const AssetDef*>& small_assets() const { return small_; }
  const std::vector<const AssetDef*>& clutter_assets() const { return clutter_; }

 private:
  void build_index();

  std::vector<AssetDef> assets_;
  std::map<ScanCategory, std::vector<std::string>> category_map_;
  std::map<std::string, std::vector<const AssetDef*>, std::less<>> by_type_;
  std::vector<const AssetDef*> small_;
  std::vector<const AssetDef*> clutter_;
};

Catalog load_catalog(std::string_view bytes);
Catalog load_catalog_file(const std::filesystem::path& path);
std::string write_catalog(const Catalog& c);

/// What to do when no asset passes the IoU gate.
enum class FallbackMode { skip, best_iou };

struct Candidate {
  const AssetDef* asset = nullptr;
  double iou = 0;            ///< volume IoU, the gated quantity
  double footprint_iou = 0;  ///< floor-plane IoU, kept for comparison only
};

/// The asset's box posed like the scanned one: same (x, z) center and yaw, bottoms
/// aligned.
OrientedBoxd pose_like(const AssetDef& asset, const OrientedBoxd& scanned);

/// Assets of every type mapped from the scanned category whose posed box has volume
/// IoU >= tau with the scanned box, ordered by asset id.
std::vector<Candidate> eligible_assets(const ScannedObject& scanned, const Catalog& catalog,
                                       double tau = 0.75);

/// Uniform choice among eligible_assets. With FallbackMode::best_iou an empty eligible
/// set falls back to the mapped asset of highest IoU.
std::optional<Candidate> sample_replacement(const ScannedObject& scanned, const Catalog& catalog,
                                            double tau, Rng& rng,
                                            FallbackMode fallback = FallbackMode::skip);

}  // namespace scenesmith
