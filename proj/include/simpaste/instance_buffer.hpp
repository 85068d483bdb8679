#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "simpaste/image.hpp"
#include "simpaste/rng.hpp"

namespace simpaste {

inline constexpr int kDefaultMinCutoutArea = 64;

/// One real object: color patch, its foreground mask, and provenance.
struct InstanceCutout {
  std::string id;
  RgbImage color;
  Mask mask;
  std::string source;

  std::size_t area() const { return mask.count(); }
};

/// Immutable, id-sorted set of cutouts with a content digest.
class CutoutBuffer {
 public:
  CutoutBuffer() = default;
  /// Validates ids are unique and shapes agree; sorts by id. Throws
  /// EmptyBuffer when `items` is empty.
  explicit CutoutBuffer(std::vector<InstanceCutout> items);

  const std::vector<InstanceCutout>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const std::string& manifest_digest() const { return digest_; }

 private:
  std::vector<InstanceCutout> items_;
  std::string digest_;
};

struct SkippedPair {
  std::string id;
  std::string reason;
};

struct IngestResult {
  CutoutBuffer buffer;
  std::vector<SkippedPair> skipped;
};

/// Reads `<id>.rgb.png` + `<id>.mask.png` pairs from `directory`.
/// Pairs that are incomplete, mismatched in shape or below `min_cutout_area`
/// are skipped and reported. Throws EmptyBuffer when nothing valid remains
/// and IoError for unreadable files.
IngestResult ingest_buffer(const std::filesystem::path& directory, int min_cutout_area = kDefaultMinCutoutArea);

/// Uniform draw with replacement. Throws EmptyBuffer.
const InstanceCutout& sample_cutout(const CutoutBuffer& buffer, Rng& rng);

/// SHA-256 over ids, shapes, pixels and sources, hex encoded.
std::string compute_manifest_digest(const std::vector<InstanceCutout>& items);

/// `buffer.json`: items {id, width, height, area_px, source} plus digest.
std::string buffer_manifest_json(const IngestResult& result, std::uint64_t seed, int min_cutout_area);

}  // namespace simpaste
