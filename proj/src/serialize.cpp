#include "aug3d/serialize.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include "aug3d/error.hpp"
#include "aug3d/rng.hpp"

namespace aug3d {

using ordered_json = nlohmann::ordered_json;

std::string quality_to_json(const QualityReport& q) {
  ordered_json j;
  j["per_cluster_mean"] = q.per_cluster_mean;
  j["global_mean"] = q.global_mean;
  j["global_min"] = q.global_min;
  j["zero_pair_fraction"] = q.zero_pair_fraction;
  j["flagged_clusters"] = q.flagged_clusters;
  return j.dump(2) + "\n";
}

QualityReport parse_quality_json(std::string_view json) {
  try {
    const auto j = ordered_json::parse(json);
    QualityReport q;
    q.per_cluster_mean = j.at("per_cluster_mean").get<std::vector<double>>();
    q.global_mean = j.at("global_mean").get<double>();
    q.global_min = j.at("global_min").get<double>();
    q.zero_pair_fraction = j.at("zero_pair_fraction").get<double>();
    q.flagged_clusters = j.at("flagged_clusters").get<std::vector<std::size_t>>();
    return q;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, std::string("quality report: ") + e.what());
  }
}

std::string boxes_to_json(std::span<const Box2D> boxes) {
  ordered_json arr = ordered_json::array();
  for (const Box2D& b : boxes) {
    ordered_json o;
    o["min"] = {b.min.x(), b.min.y()};
    o["max"] = {b.max.x(), b.max.y()};
    o["members"] = b.member_ids;
    arr.push_back(std::move(o));
  }
  ordered_json j;
  j["boxes"] = std::move(arr);
  return j.dump(2) + "\n";
}

std::vector<Box2D> parse_boxes_json(std::string_view json) {
  try {
    const auto j = ordered_json::parse(json);
    std::vector<Box2D> out;
    for (const auto& o : j.at("boxes")) {
      Box2D b;
      const auto lo = o.at("min").get<std::vector<double>>();
      const auto hi = o.at("max").get<std::vector<double>>();
      if (lo.size() != 2 || hi.size() != 2) throw Error(ErrorKind::Format, "box corners must have 2 values");
      b.min = Vec2(lo[0], lo[1]);
      b.max = Vec2(hi[0], hi[1]);
      b.member_ids = o.at("members").get<std::vector<std::size_t>>();
      out.push_back(std::move(b));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, std::string("boxes json: ") + e.what());
  }
}

std::string domes_to_json(std::span<const DomeSpec> domes, DomeMode mode, std::uint64_t seed) {
  ordered_json j;
  j["rng"] = std::string(kRngAlgorithm);
  j["seed"] = seed;
  j["mode"] = mode == DomeMode::Random ? "random" : "spiral";
  j["domes"] = ordered_json::array();
  for (const DomeSpec& d : domes) {
    ordered_json o;
    o["tag"] = d.tag;
    o["center"] = {d.center.x(), d.center.y(), d.center.z()};
    o["radius"] = d.radius;
    o["az_range"] = {d.azimuth.min, d.azimuth.max};
    o["el_range"] = {d.elevation.min, d.elevation.max};
    j["domes"].push_back(std::move(o));
  }
  return j.dump(2) + "\n";
}

std::string encode_mask_pgm(const BinaryMask& mask) {
  std::string out = fmt::format("P5\n{} {}\n255\n", mask.width, mask.height);
  out.reserve(out.size() + mask.bits.size());
  for (std::uint8_t b : mask.bits) out.push_back(static_cast<char>(b ? 255 : 0));
  return out;
}

}  // namespace aug3d
