#include "simpaste/instance_buffer.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <map>
#include <memory>
#include <set>

#include <nlohmann/json.hpp>

#include "simpaste/png_io.hpp"

namespace simpaste {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kRgbSuffix = ".rgb.png";
constexpr std::string_view kMaskSuffix = ".mask.png";

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) { EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr); }

  void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_.get(), data, n); }
  void update_str(const std::string& s) {
    update_u64(s.size());
    update(s.data(), s.size());
  }
  void update_u64(std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    update(b, 8);
  }

  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), md, &len);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out += kHex[md[i] >> 4];
      out += kHex[md[i] & 0xF];
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

}  // namespace

CutoutBuffer::CutoutBuffer(std::vector<InstanceCutout> items) : items_(std::move(items)) {
  if (items_.empty()) throw EmptyBuffer("cutout buffer has no items");
  std::sort(items_.begin(), items_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < items_.size(); ++i) {
    const auto& c = items_[i];
    if (i > 0 && items_[i - 1].id == c.id) throw Error("DuplicateId", "duplicate cutout id " + c.id);
    if (c.color.width() != c.mask.width() || c.color.height() != c.mask.height())
      throw ShapeMismatch("cutout " + c.id + ": color and mask dimensions differ");
    if (!c.mask.any()) throw EmptyMask("cutout " + c.id + " has an empty mask");
  }
  digest_ = compute_manifest_digest(items_);
}

std::string compute_manifest_digest(const std::vector<InstanceCutout>& items) {
  Sha256 h;
  h.update_u64(items.size());
  for (const auto& c : items) {
    h.update_str(c.id);
    h.update_str(c.source);
    h.update_u64(static_cast<std::uint64_t>(c.mask.width()));
    h.update_u64(static_cast<std::uint64_t>(c.mask.height()));
    h.update(c.mask.bits().data(), c.mask.bits().size());
    h.update(c.color.data().data(), c.color.data().size());
  }
  return h.hex();
}

IngestResult ingest_buffer(const fs::path& directory, int min_cutout_area) {
  std::error_code ec;
  if (!fs::is_directory(directory, ec)) throw IoError("not a directory: " + directory.string());

  std::set<std::string> rgb_ids, mask_ids;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (ends_with(name, kRgbSuffix)) rgb_ids.insert(name.substr(0, name.size() - kRgbSuffix.size()));
    if (ends_with(name, kMaskSuffix)) mask_ids.insert(name.substr(0, name.size() - kMaskSuffix.size()));
  }

  std::set<std::string> all_ids = rgb_ids;
  all_ids.insert(mask_ids.begin(), mask_ids.end());

  IngestResult result;
  std::vector<InstanceCutout> items;
  for (const auto& id : all_ids) {
    if (!rgb_ids.contains(id)) {
      result.skipped.push_back({id, "missing " + id + std::string(kRgbSuffix)});
      continue;
    }
    if (!mask_ids.contains(id)) {
      result.skipped.push_back({id, "missing " + id + std::string(kMaskSuffix)});
      continue;
    }
    const std::string rgb_name = id + std::string(kRgbSuffix);
    InstanceCutout c;
    c.id = id;
    c.source = rgb_name;
    c.color = png::read_rgb(directory / rgb_name);
    c.mask = png::read_mask(directory / (id + std::string(kMaskSuffix)));
    if (c.color.width() != c.mask.width() || c.color.height() != c.mask.height()) {
      result.skipped.push_back({id, "ShapeMismatch: color " + std::to_string(c.color.width()) + "x" +
                                        std::to_string(c.color.height()) + " vs mask " +
                                        std::to_string(c.mask.width()) + "x" + std::to_string(c.mask.height())});
      continue;
    }
    const std::size_t area = c.mask.count();
    if (area < static_cast<std::size_t>(std::max(min_cutout_area, 1))) {
      result.skipped.push_back(
          {id, "area " + std::to_string(area) + " px below min_cutout_area " + std::to_string(min_cutout_area)});
      continue;
    }
    items.push_back(std::move(c));
  }
  if (items.empty()) throw EmptyBuffer("no valid cutout pairs in " + directory.string());
  result.buffer = CutoutBuffer(std::move(items));
  return result;
}

const InstanceCutout& sample_cutout(const CutoutBuffer& buffer, Rng& rng) {
  if (buffer.empty()) throw EmptyBuffer("cannot sample from an empty buffer");
  return buffer.items()[rng.uniform_below(buffer.size())];
}

std::string buffer_manifest_json(const IngestResult& result, std::uint64_t seed, int min_cutout_area) {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["min_cutout_area"] = min_cutout_area;
  j["items"] = nlohmann::ordered_json::array();
  for (const auto& c : result.buffer.items()) {
    j["items"].push_back({{"id", c.id},
                          {"width", c.mask.width()},
                          {"height", c.mask.height()},
                          {"area_px", c.area()},
                          {"source", c.source}});
  }
  j["skipped"] = nlohmann::ordered_json::array();
  for (const auto& s : result.skipped) j["skipped"].push_back({{"id", s.id}, {"reason", s.reason}});
  j["manifest_digest"] = result.buffer.manifest_digest();
  return j.dump(2) + "\n";
}

}  // namespace simpaste
